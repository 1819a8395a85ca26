//! Gamma/beta/Pochhammer support and the hypergeometric series used by
//! the radial weights.
//!
//! The central object is the series
//!
//! ```text
//! F[a,b,c; u,v; t] = Σ_k  (a)ₖ(b)ₖ(c)ₖ / (k! (u)ₖ(v)ₖ) · tᵏ
//! ```
//!
//! evaluated with a reported truncation bound: for |t| < 1 the geometric
//! tail `|termₖ|·ρ/(1-ρ)`, and at t = 1 (allowed only with positive
//! parameter excess) an Euler–Maclaurin tail of the `Σ k^{-1-excess}`
//! comparison series.

use crate::error::{Error, Result};
use crate::scalar::Real;

// Lanczos g = 7, n = 9 (Godfrey/Boost coefficients).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, reflection
/// below 1/2).
pub fn lgamma<R: Real>(x: R) -> R {
    if x < R::half() {
        // Γ(x)Γ(1-x) = π/sin(πx)
        let pi = R::pi();
        return (pi / (pi * x).sin()).ln() - lgamma(R::one() - x);
    }
    let z = x - R::one();
    let mut sum = R::cst(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS[1..].iter().enumerate() {
        sum += R::cst(c) / (z + R::of(i + 1));
    }
    let t = z + R::cst(LANCZOS_G) + R::half();
    let log_sqrt_two_pi = R::cst(0.918_938_533_204_672_74);
    log_sqrt_two_pi + (z + R::half()) * t.ln() - t + (sum).ln()
}

/// Gamma function for `x > 0`.
pub fn gamma_fn<R: Real>(x: R) -> Result<R> {
    if x <= R::zero() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(lgamma(x).exp())
}

/// Beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b) for `a, b > 0`.
pub fn beta<R: Real>(a: R, b: R) -> Result<R> {
    Ok(ln_beta(a, b)?.exp())
}

/// ln B(a, b) for `a, b > 0`.
pub fn ln_beta<R: Real>(a: R, b: R) -> Result<R> {
    if a <= R::zero() || b <= R::zero() {
        return Err(Error::Domain(format!(
            "beta requires positive arguments, got ({a}, {b})"
        )));
    }
    Ok(lgamma(a) + lgamma(b) - lgamma(a + b))
}

/// Shifted factorial (a)ₖ = a(a+1)⋯(a+k-1); empty product for k = 0.
pub fn pochhammer<R: Real>(a: R, k: u32) -> Result<R> {
    let mut acc = R::one();
    for i in 0..k {
        acc *= a + R::of(i as usize);
    }
    if acc.is_finite() {
        Ok(acc)
    } else {
        Err(Error::Range(format!("pochhammer({a}, {k}) overflows")))
    }
}

/// Partial sum with a reported truncation bound.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue<R> {
    pub value: R,
    /// Upper estimate of the dropped tail (absolute).
    pub tail_bound: R,
    pub terms: usize,
}

/// Kahan compensated accumulator; slow series at t = 1 run tens of
/// thousands of terms and naive summation costs ~n·ε of accuracy.
struct KahanSum<R> {
    sum: R,
    carry: R,
}

impl<R: Real> KahanSum<R> {
    fn new(init: R) -> Self {
        KahanSum {
            sum: init,
            carry: R::zero(),
        }
    }

    #[inline]
    fn add(&mut self, x: R) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> R {
        self.sum
    }
}

/// Parameter block for the series `F`: numerators (a, b, c, ...) and
/// denominators (u, v, ...) excluding the implicit k! factor.
#[derive(Debug, Clone)]
pub struct HypergeometricSpec<R> {
    numerators: Vec<R>,
    denominators: Vec<R>,
    tol: R,
    max_terms: usize,
}

fn is_nonpositive_integer<R: Real>(x: R) -> bool {
    x <= R::cst(1e-12) && (x - x.round()).abs() < R::cst(1e-12)
}

impl<R: Real> HypergeometricSpec<R> {
    pub const DEFAULT_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_TERMS: usize = 100_000;

    pub fn new(numerators: Vec<R>, denominators: Vec<R>, tol: R, max_terms: usize) -> Result<Self> {
        if !(tol > R::zero()) {
            return Err(Error::Domain(format!("tol must be positive, got {tol}")));
        }
        if max_terms == 0 {
            return Err(Error::Domain("max_terms must be at least 1".into()));
        }
        for &d in &denominators {
            if is_nonpositive_integer(d) {
                return Err(Error::Domain(format!(
                    "denominator parameter {d} is a nonpositive integer"
                )));
            }
        }
        Ok(HypergeometricSpec {
            numerators,
            denominators,
            tol,
            max_terms,
        })
    }

    /// Spec with the crate defaults (tol 1e-12, 100000 terms).
    pub fn with_defaults(numerators: Vec<R>, denominators: Vec<R>) -> Result<Self> {
        Self::new(
            numerators,
            denominators,
            R::cst(Self::DEFAULT_TOL),
            Self::DEFAULT_MAX_TERMS,
        )
    }

    pub fn numerators(&self) -> &[R] {
        &self.numerators
    }

    pub fn denominators(&self) -> &[R] {
        &self.denominators
    }

    /// Parameter excess Σdenominators - Σnumerators; terms decay like
    /// k^{-1-excess} at t = 1, so the series there converges iff the
    /// excess is positive.
    pub fn excess(&self) -> R {
        let num: R = self.numerators.iter().cloned().sum();
        let den: R = self.denominators.iter().cloned().sum();
        den - num
    }

    fn term_ratio(&self, k: usize, t: R) -> R {
        let kf = R::of(k);
        let mut r = t / (kf + R::one());
        for &a in &self.numerators {
            r *= a + kf;
        }
        for &u in &self.denominators {
            r /= u + kf;
        }
        r
    }

    /// Evaluate the series at `t ∈ (-1, 1]`.
    ///
    /// At t = 1 the parameter excess must be positive; the partial sum is
    /// then corrected by an Euler–Maclaurin estimate of the power tail.
    pub fn evaluate(&self, t: R) -> Result<SeriesValue<R>> {
        if t.abs() > R::one() {
            return Err(Error::Domain(format!(
                "series argument {t} outside (-1, 1]"
            )));
        }
        if t == R::one() {
            return self.evaluate_at_one();
        }

        let mut sum = KahanSum::new(R::one());
        let mut term = R::one();
        let mut quiet = 0usize;
        for k in 0..self.max_terms {
            let ratio = self.term_ratio(k, t);
            let prev = term;
            term *= ratio;
            if term == R::zero() {
                // A numerator hit a nonpositive integer: exact polynomial.
                return Ok(SeriesValue {
                    value: sum.value(),
                    tail_bound: R::zero(),
                    terms: k + 1,
                });
            }
            sum.add(term);
            // Tail-aware stop: the term ratios approach t, so
            // max(|term/prev|, |t|) eventually dominates every later
            // ratio and the geometric bound below is honest.
            let rho = (term / prev).abs().max(t.abs());
            if rho < R::one() {
                let tail = term.abs() * rho / (R::one() - rho);
                if tail <= self.tol * sum.value().abs() {
                    quiet += 1;
                    if quiet >= 3 {
                        return Ok(SeriesValue {
                            value: sum.value(),
                            tail_bound: tail,
                            terms: k + 2,
                        });
                    }
                } else {
                    quiet = 0;
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::Convergence(format!(
            "series did not meet tol {} within {} terms",
            self.tol, self.max_terms
        )))
    }

    fn evaluate_at_one(&self) -> Result<SeriesValue<R>> {
        let excess = self.excess();
        if excess <= R::zero() {
            return Err(Error::Domain(format!(
                "series at t = 1 diverges: parameter excess {excess} <= 0"
            )));
        }
        // termₖ ~ C k^{-s} with s = 1 + excess; Euler-Maclaurin tail:
        // Σ_{j>k} j^{-s} ≈ k^{1-s}/(s-1) - k^{-s}/2 + s k^{-s-1}/12.
        let s = R::one() + excess;
        let safety = R::cst(10.0) * s / excess;
        let mut sum = KahanSum::new(R::one());
        let mut term = R::one();
        for k in 0..self.max_terms {
            term *= self.term_ratio(k, R::one());
            if term == R::zero() {
                return Ok(SeriesValue {
                    value: sum.value(),
                    tail_bound: R::zero(),
                    terms: k + 1,
                });
            }
            sum.add(term);
            let kf = R::of(k + 1);
            if kf > R::cst(50.0) && term.abs() * safety <= self.tol * sum.value().abs() {
                let tail = term * (kf / excess - R::half() + s / (R::cst(12.0) * kf));
                return Ok(SeriesValue {
                    value: sum.value() + tail,
                    tail_bound: term.abs() * safety,
                    terms: k + 2,
                });
            }
        }
        Err(Error::Convergence(format!(
            "series at t = 1 did not meet tol {} within {} terms (excess {excess})",
            self.tol, self.max_terms
        )))
    }
}

/// The five-parameter series `F[a,b,c; u,v; t]` with default tolerances.
pub fn series_f<R: Real>(a: R, b: R, c: R, u: R, v: R, t: R) -> Result<SeriesValue<R>> {
    HypergeometricSpec::with_defaults(vec![a, b, c], vec![u, v])?.evaluate(t)
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for `z ∈ [0, 1)` by
/// series; exact (terminating) when a or b is a nonpositive integer.
pub fn gauss_2f1<R: Real>(a: R, b: R, c: R, z: R) -> Result<R> {
    if z < R::zero() || z >= R::one() {
        return Err(Error::Domain(format!(
            "gauss_2f1 argument {z} outside [0, 1)"
        )));
    }
    let spec = HypergeometricSpec::with_defaults(vec![a, b], vec![c])?;
    Ok(spec.evaluate(z)?.value)
}

/// Euler-integral route for ₂F₁(a, b; c; z), valid for `c > b > 0`:
///
/// ```text
/// F₀[a,b;c;z] = (1/B(b, c-b)) ∫_0^1 x^{b-1} (1-x)^{c-b-1} (1-zx)^{-a} dx
/// ```
///
/// Independent cross-check for [`gauss_2f1`]; the substitution
/// `x = sin²θ` absorbs both endpoint singularities.
pub fn gauss_2f1_euler(a: f64, b: f64, c: f64, z: f64, rel_tol: f64) -> Result<f64> {
    if !(c > b && b > 0.0) {
        return Err(Error::Domain(format!(
            "euler integral requires c > b > 0, got b = {b}, c = {c}"
        )));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "euler integral argument {z} outside [0, 1)"
        )));
    }
    let d = c - b;
    let f = |theta: f64| {
        let (s, co) = theta.sin_cos();
        let x = s * s;
        2.0 * s.powf(2.0 * b - 1.0) * co.powf(2.0 * d - 1.0) * (1.0 - z * x).powf(-a)
    };
    let integral = crate::quad::adaptive(&f, 0.0, std::f64::consts::FRAC_PI_2, rel_tol, 0.0, 4000)?;
    Ok(integral.value / beta(b, d)?)
}
