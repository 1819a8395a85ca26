//! n = 2 specializations: harmonic mappings f = a + b̄ on the unit disk
//! given by Taylor coefficients, the coefficient inequalities with the
//! weights c_q(k) = binom(k+q-1, k), the sharp constant C_p, and the
//! isoperimetric-type inequality on the disk.
//!
//! Quadrature here is planar: uniform trapezoid on the circle (spectral
//! for trigonometric polynomials) and Gauss-Legendre × trapezoid on the
//! disk, with the (1-r²)^{α-2} weight handled by the same endpoint
//! substitution as the Bergman norms.

use crate::error::{Error, Result};
use crate::quad::{self, gauss_legendre};
use crate::specfun::lgamma;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::io::BufRead;

const CIRCLE_NODES: usize = 4096;
const DISK_RADIAL: usize = 256;
const DISK_ANGULAR: usize = 512;

/// Harmonic mapping f = a + b̄ by Taylor coefficients, b₀ = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicMapping {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl HarmonicMapping {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if let Some(b0) = b.first() {
            if b0.norm() != 0.0 {
                return Err(Error::Domain(format!("b_0 must vanish, got {b0}")));
            }
        }
        if a.is_empty() && b.is_empty() {
            return Err(Error::Domain(
                "mapping needs at least one coefficient".into(),
            ));
        }
        Ok(HarmonicMapping { a, b })
    }

    pub fn analytic(a: Vec<Complex64>) -> Result<Self> {
        Self::new(a, Vec::new())
    }

    pub fn a_coeffs(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b_coeffs(&self) -> &[Complex64] {
        &self.b
    }

    pub fn degree(&self) -> usize {
        self.a.len().max(self.b.len()).saturating_sub(1)
    }

    fn eval_a(&self, z: Complex64) -> Complex64 {
        horner(&self.a, z)
    }

    fn eval_b(&self, z: Complex64) -> Complex64 {
        horner(&self.b, z)
    }

    /// f(z) = a(z) + conj(b(z)).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_a(z) + self.eval_b(z).conj()
    }

    /// |a(z)|² + |b(z)|² (whose square root has subharmonic log).
    pub fn modulus_sq(&self, z: Complex64) -> f64 {
        self.eval_a(z).norm_sqr() + self.eval_b(z).norm_sqr()
    }

    /// Random truncated mapping: complex Gaussian coefficients scaled by
    /// (k+1)^{-2}, b₀ = 0.
    pub fn random(rng: &mut impl Rng, degree: usize) -> Self {
        let gauss = |rng: &mut dyn rand::RngCore| {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            Complex64::new(
                r * (2.0 * std::f64::consts::PI * u2).cos(),
                r * (2.0 * std::f64::consts::PI * u2).sin(),
            )
        };
        let a: Vec<Complex64> = (0..=degree)
            .map(|k| gauss(rng) / ((k + 1) as f64 * (k + 1) as f64))
            .collect();
        let mut b: Vec<Complex64> = (0..=degree)
            .map(|k| gauss(rng) / ((k + 1) as f64 * (k + 1) as f64))
            .collect();
        b[0] = Complex64::new(0.0, 0.0);
        HarmonicMapping { a, b }
    }

    /// Read coefficients from CSV rows `k, Re aₖ, Im aₖ, Re bₖ, Im bₖ`
    /// (header row optional).
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows: Vec<(usize, Complex64, Complex64)> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let cells: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if lineno == 0 && cells[0].parse::<usize>().is_err() {
                continue; // header
            }
            if cells.len() != 5 {
                return Err(Error::Parse(format!(
                    "coefficient row needs 5 cells (k, Re a, Im a, Re b, Im b): '{trimmed}'"
                )));
            }
            let k: usize = cells[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad index '{}'", cells[0])))?;
            let nums: Vec<f64> = cells[1..]
                .iter()
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number '{c}'")))
                })
                .collect::<Result<_>>()?;
            rows.push((
                k,
                Complex64::new(nums[0], nums[1]),
                Complex64::new(nums[2], nums[3]),
            ));
        }
        if rows.is_empty() {
            return Err(Error::Parse("no coefficient rows".into()));
        }
        let deg = rows.iter().map(|r| r.0).max().unwrap();
        let mut a = vec![Complex64::new(0.0, 0.0); deg + 1];
        let mut b = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (k, ak, bk) in rows {
            a[k] = ak;
            b[k] = bk;
        }
        HarmonicMapping::new(a, b)
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Generalized binomial weight `c_q(k) = binom(k + q - 1, k)` with
/// q = 2/p, evaluated through log-gamma.
pub fn binom_weight(p: f64, k: usize) -> f64 {
    debug_assert!(p > 1.0 && p <= 2.0, "coefficient weights use p in (1, 2]");
    let q = 2.0 / p;
    (lgamma(k as f64 + q) - lgamma(k as f64 + 1.0) - lgamma(q)).exp()
}

/// Σ (|aₖ|² + |bₖ|²)/c_{2/p}(k): the Bergman-side coefficient sum.
pub fn coefficient_sum(f: &HarmonicMapping, p: f64) -> f64 {
    let kmax = f.a.len().max(f.b.len());
    (0..kmax)
        .map(|k| {
            let a2 = f.a.get(k).map_or(0.0, |c| c.norm_sqr());
            let b2 = f.b.get(k).map_or(0.0, |c| c.norm_sqr());
            (a2 + b2) / binom_weight(p, k)
        })
        .sum()
}

fn circle_mean<F: Fn(Complex64) -> f64>(f: &F) -> f64 {
    quad::circle_mean(&|th| f(Complex64::new(th.cos(), th.sin())), CIRCLE_NODES)
}

/// (α-1)-weighted disk integral `(α-1)∫ g(z) (1-|z|²)^{α-2} dA/π` with
/// the endpoint weight handled by substitution in u = r².
fn weighted_disk_integral<F: Fn(Complex64) -> f64>(g: &F, alpha: f64) -> Result<f64> {
    let beta = alpha - 1.0;
    let angular: Vec<(f64, f64)> = (0..DISK_ANGULAR)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / DISK_ANGULAR as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let radial_fn = |u: f64| {
        let r = u.max(0.0).sqrt();
        let mut acc = 0.0;
        for (c, s) in &angular {
            acc += g(Complex64::new(r * c, r * s));
        }
        acc / DISK_ANGULAR as f64
    };
    // dA/π = du dθ/(2π):  (α-1) ∫₀¹ mean(√u) (1-u)^{α-2} du.
    let integral = quad::weighted_unit_integral(&radial_fn, beta, 1e-10, 2000)?;
    Ok(beta * integral.value)
}

/// Unweighted disk integral `∫ g dA/π` (Gauss-Legendre in r²).
fn disk_integral<F: Fn(Complex64) -> f64>(g: &F) -> f64 {
    let (nodes, weights) = gauss_legendre(DISK_RADIAL);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        // u = r² on [0,1]: u = (x+1)/2, weight w/2.
        let u = 0.5 * (x + 1.0);
        let r = u.sqrt();
        let mut ang = 0.0;
        for j in 0..DISK_ANGULAR {
            let th = 2.0 * std::f64::consts::PI * j as f64 / DISK_ANGULAR as f64;
            ang += g(Complex64::new(r * th.cos(), r * th.sin()));
        }
        acc += 0.5 * w * ang / DISK_ANGULAR as f64;
    }
    acc
}

/// Margins of the coefficient inequalities for one mapping.
#[derive(Debug, Clone, Serialize)]
pub struct CoeffReport {
    pub p: f64,
    /// Σ (|aₖ|²+|bₖ|²)/c_{2/p}(k).
    pub coefficient_sum: f64,
    /// The same quantity by weighted area quadrature (Parseval route).
    pub bergman_quadrature: f64,
    /// ‖√(|a|²+|b|²)‖²_{h^p}: the triple-bar Hardy bound.
    pub modulus_hardy_sq: f64,
    /// ‖f‖²_p / (1-|cos π/p|).
    pub scaled_hardy_sq: f64,
    /// modulus_hardy_sq - coefficient_sum (first inequality).
    pub margin_modulus: f64,
    /// scaled_hardy_sq - coefficient_sum (second inequality).
    pub margin_scaled: f64,
}

/// Check the coefficient inequalities for `p ∈ (1, 2)`: the sum is
/// bounded by the squared Hardy norm of √(|a|²+|b|²) and by
/// ‖f‖²_p/(1-|cos π/p|). Also cross-checks the sum against weighted
/// area quadrature (Parseval with the (α-1)(1-|z|²)^{α-2} weight,
/// α = 2/p); the two bounds are reported separately and never mixed.
pub fn coefficient_inequality_check(f: &HarmonicMapping, p: f64) -> Result<CoeffReport> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Domain(format!(
            "coefficient inequalities need p in (1, 2), got {p}"
        )));
    }
    let alpha = 2.0 / p;
    let sum = coefficient_sum(f, p);
    if !sum.is_finite() {
        return Err(Error::Divergent("coefficient sum diverges".into()));
    }
    let bergman_quadrature = weighted_disk_integral(&|z| f.modulus_sq(z), alpha)?;
    let modulus_hardy_sq = circle_mean(&|z| f.modulus_sq(z).powf(p / 2.0)).powf(2.0 / p);
    let hardy_p = circle_mean(&|z| f.eval(z).norm().powf(p));
    let scaled_hardy_sq = hardy_p.powf(2.0 / p) / (1.0 - (std::f64::consts::PI / p).cos().abs());
    Ok(CoeffReport {
        p,
        coefficient_sum: sum,
        bergman_quadrature,
        modulus_hardy_sq,
        scaled_hardy_sq,
        margin_modulus: modulus_hardy_sq - sum,
        margin_scaled: scaled_hardy_sq - sum,
    })
}

/// Sharp constant `C_p = √2 cos(π/4p) / (1-|cos π/p|)^{1/2}`.
pub fn isoperimetric_constant(p: f64) -> f64 {
    debug_assert!(p > 1.0);
    let pi = std::f64::consts::PI;
    2.0f64.sqrt() * (pi / (4.0 * p)).cos() / (1.0 - (pi / p).cos().abs()).sqrt()
}

/// Alternative closed forms: ½csc(π/4p) for p ≥ 2 and
/// cos(π/4p)·sec(π/2p) for p ∈ (1, 2]; cross-checks of the main
/// expression.
pub fn isoperimetric_constant_alt(p: f64) -> f64 {
    let pi = std::f64::consts::PI;
    if p >= 2.0 {
        0.5 / (pi / (4.0 * p)).sin()
    } else {
        (pi / (4.0 * p)).cos() / (pi / (2.0 * p)).cos()
    }
}

/// Margin of the isoperimetric-type inequality ‖f‖_{B^{2p}} ≤ C_p ‖f‖_p.
#[derive(Debug, Clone, Serialize)]
pub struct IsoiReport {
    pub p: f64,
    /// Unweighted Bergman norm (∫|f|^{2p} dA/π)^{1/2p}.
    pub bergman_2p: f64,
    /// Hardy norm (circle) ‖f‖_p.
    pub hardy_p: f64,
    pub constant: f64,
    /// C_p‖f‖_p - ‖f‖_{B^{2p}} ≥ 0.
    pub margin: f64,
}

pub fn isoperimetric_inequality_check(f: &HarmonicMapping, p: f64) -> Result<IsoiReport> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!(
            "isoperimetric inequality needs p > 1, got {p}"
        )));
    }
    let bergman_2p = disk_integral(&|z| f.eval(z).norm().powf(2.0 * p)).powf(1.0 / (2.0 * p));
    let hardy_p = circle_mean(&|z| f.eval(z).norm().powf(p)).powf(1.0 / p);
    let constant = isoperimetric_constant(p);
    Ok(IsoiReport {
        p,
        bergman_2p,
        hardy_p,
        constant,
        margin: constant * hardy_p - bergman_2p,
    })
}

/// Data fed to the weighted-vs-Hardy contraction check: either a
/// harmonic mapping (the modulus √(|a|²+|b|²)) or a caller-supplied
/// positive integrand (e.g. |f_x|² = |p|(1+|q|²) of a conformal
/// minimal-surface parameterization, or 1/J of a harmonic
/// diffeomorphism).
pub enum PositiveIntegrand<'a> {
    Mapping(&'a HarmonicMapping),
    Custom {
        label: String,
        value: Box<dyn Fn(Complex64) -> f64 + 'a>,
    },
}

impl PositiveIntegrand<'_> {
    fn value(&self, z: Complex64) -> f64 {
        match self {
            PositiveIntegrand::Mapping(m) => m.modulus_sq(z).sqrt(),
            PositiveIntegrand::Custom { value, .. } => value(z),
        }
    }

    fn label(&self) -> String {
        match self {
            PositiveIntegrand::Mapping(_) => "sqrt(|a|^2+|b|^2)".into(),
            PositiveIntegrand::Custom { label, .. } => label.clone(),
        }
    }
}

/// Margin of the weighted Bergman-to-Hardy contraction
/// `((α-1)∫ g^p (1-|z|²)^{α-2} dA/π)^{1/p} ≤ ‖g‖_{p/α}` for positive
/// log-subharmonic data g.
#[derive(Debug, Clone, Serialize)]
pub struct Co32Report {
    pub p: f64,
    pub alpha: f64,
    pub integrand: String,
    pub weighted_bergman: f64,
    pub hardy: f64,
    pub margin: f64,
    pub note: String,
}

pub fn corollary_co32_check(
    data: &PositiveIntegrand<'_>,
    p: f64,
    alpha: f64,
) -> Result<Co32Report> {
    if !(p > 1.0) || !(alpha > 1.0) {
        return Err(Error::Domain(format!(
            "need p > 1 and alpha > 1, got ({p}, {alpha})"
        )));
    }
    // Positivity of custom data is a precondition: sample it.
    if let PositiveIntegrand::Custom { value, .. } = data {
        for k in 0..64u32 {
            let th = 0.37 + k as f64;
            let r = 0.97 * ((k * 37 % 64) as f64 / 64.0);
            let z = Complex64::new(r * th.cos(), r * th.sin());
            if !(value(z) > 0.0) {
                return Err(Error::Domain(format!(
                    "custom integrand is not positive at {z} (value {})",
                    value(z)
                )));
            }
        }
    }
    let weighted = weighted_disk_integral(&|z| data.value(z).powf(p), alpha)?.powf(1.0 / p);
    let r_exp = p / alpha;
    let hardy = circle_mean(&|z| data.value(z).powf(r_exp)).powf(1.0 / r_exp);
    let note = if (p - 2.0).abs() < 1e-12 && (alpha - 2.0).abs() < 1e-12 {
        "p = alpha = 2: the isoperimetric inequality for minimal surfaces".into()
    } else {
        String::new()
    };
    Ok(Co32Report {
        p,
        alpha,
        integrand: data.label(),
        weighted_bergman: weighted,
        hardy,
        margin: hardy - weighted,
        note,
    })
}

/// Deterministic mapping ensemble for the batch checks.
pub fn random_mappings(seed: u64, count: usize, degree: usize) -> Vec<HarmonicMapping> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| HarmonicMapping::random(&mut rng, degree))
        .collect()
}


#[cfg(test)]
mod boundary_case_tests {
    use super::*;

    #[test]
    fn coefficient_sum_at_p_two_is_plancherel() {
        // q = 2/p = 1 makes every weight 1: the sum is Σ|aₖ|²+|bₖ|².
        let f = HarmonicMapping::analytic(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap();
        assert!((coefficient_sum(&f, 2.0) - 2.0).abs() < 1e-12);
    }
}
