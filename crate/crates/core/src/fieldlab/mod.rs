//! Test fields on the ball built from constructors that keep the
//! log-modulus hyperbolically subharmonic: constants, exponentials of
//! Poisson extensions, products, nonnegative powers, positive
//! combinations, Möbius pullbacks, and (n = 2) moduli of harmonic
//! mappings given by Taylor coefficients.
//!
//! Each field carries its construction tree as a structural certificate;
//! [`certify_log_subharmonic`] adds a numerical one by sampling a
//! finite-difference hyperbolic Laplacian of the log-modulus.
//!
//! Evaluation happens in log space throughout. The weight ratios of
//! Möbius pullbacks use the bracket identity
//! `1-|φ_a(x)|² = (1-|a|²)(1-|x|²)/[x,a]²`, so fields stay finite (and
//! exact) up to the boundary sphere.

mod parse;
mod presets;

pub use parse::{field_to_text, parse_field};
pub use presets::{preset, preset_names, pullback_unit};

use crate::ballgeo::{BallPoint, MobiusMap, SpherePoint};
use crate::error::{Error, Result};
use crate::quad::SphereGrid;
use crate::specfun::lgamma;
use crate::weightfn::log_phi_smooth_cached;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Smooth boundary data on the sphere: the affine family
/// `h(ζ) = c₀ + Σ cⱼ ζⱼ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    c0: f64,
    linear: Vec<f64>,
}

impl BoundaryData {
    pub fn new(c0: f64, linear: Vec<f64>) -> Result<Self> {
        if linear.len() < 2 {
            return Err(Error::Field("boundary data needs dimension >= 2".into()));
        }
        if !c0.is_finite() || linear.iter().any(|c| !c.is_finite()) {
            return Err(Error::Field(
                "boundary data coefficients must be finite".into(),
            ));
        }
        Ok(BoundaryData { c0, linear })
    }

    pub fn constant(c0: f64, dim: usize) -> Self {
        BoundaryData {
            c0,
            linear: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, zeta: &[f64]) -> f64 {
        self.c0
            + self
                .linear
                .iter()
                .zip(zeta)
                .map(|(c, z)| c * z)
                .sum::<f64>()
    }

    /// Exact extrema over the sphere (Cauchy-Schwarz on the linear part).
    pub fn range(&self) -> (f64, f64) {
        let norm: f64 = self.linear.iter().map(|c| c * c).sum::<f64>().sqrt();
        (self.c0 - norm, self.c0 + norm)
    }

    /// Declared-positivity check, by the exact minimum.
    pub fn is_positive(&self) -> bool {
        self.range().0 > 0.0
    }

    fn is_constant(&self) -> bool {
        self.linear.iter().all(|&c| c == 0.0)
    }
}

/// Poisson kernel for the hyperbolic Laplacian:
/// `P_h(x, ζ) = (1-|x|²)^{n-1} / |x-ζ|^{2n-2}`.
pub fn poisson_kernel(x: &BallPoint<f64>, zeta: &SpherePoint<f64>) -> f64 {
    let n = x.dim();
    assert_eq!(n, zeta.dim(), "dimension mismatch");
    poisson_kernel_coords(n, x.coords(), zeta.coords())
}

fn poisson_kernel_coords(n: usize, x: &[f64], zeta: &[f64]) -> f64 {
    let mut dist_sq = 0.0;
    let mut norm_sq = 0.0;
    for (xi, zi) in x.iter().zip(zeta) {
        dist_sq += (xi - zi) * (xi - zi);
        norm_sq += xi * xi;
    }
    ((1.0 - norm_sq) / dist_sq).powi(n as i32 - 1)
}

/// Poisson extension `P_h[h](x) = ∫ P_h(x,ζ) h(ζ) dσ(ζ)` by sphere
/// quadrature.
pub fn poisson_extend(data: &BoundaryData, x: &BallPoint<f64>, grid: &SphereGrid) -> f64 {
    let n = x.dim();
    grid.mean(|zeta| poisson_kernel_coords(n, x.coords(), zeta) * data.eval(zeta))
}

/// Poisson extension with an error estimate from grid refinement; the
/// kernel peaks like (1-|x|)^{1-n} so the estimate grows toward the
/// boundary.
pub fn poisson_extend_with_err(
    data: &BoundaryData,
    x: &BallPoint<f64>,
    grid: &SphereGrid,
    refined: &SphereGrid,
) -> crate::quad::QuadValue<f64> {
    let coarse = poisson_extend(data, x, grid);
    let fine = poisson_extend(data, x, refined);
    crate::quad::QuadValue {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

// ---------------------------------------------------------------------------
// Exact radial profile of the hyperbolic-harmonic extension of linear data.
// ---------------------------------------------------------------------------

struct PsiTable {
    coeffs: Vec<f64>,
    at_cut: f64,
    at_one: f64,
}

const PSI_TABLE_CUT: f64 = 1.0 - 1e-7;
const DIRECT_TABLE_DIMS: usize = 16;

fn psi_table(n: usize) -> Arc<PsiTable> {
    static SLOTS: [OnceLock<Arc<PsiTable>>; DIRECT_TABLE_DIMS] =
        [const { OnceLock::new() }; DIRECT_TABLE_DIMS];
    static OVERFLOW: OnceLock<Mutex<HashMap<usize, Arc<PsiTable>>>> = OnceLock::new();
    if n < DIRECT_TABLE_DIMS {
        return SLOTS[n]
            .get_or_init(|| Arc::new(build_psi_table(n)))
            .clone();
    }
    let cache = OVERFLOW.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(build_psi_table(n)))
        .clone()
}

fn build_psi_table(n: usize) -> PsiTable {
    // 2F1(1, 1-n/2; 1+n/2; t): d₀ = 1,
    // d_{k+1}/d_k = (k+1-n/2)/(k+1+n/2).
    let cap = if n == 3 { 400_000 } else { 20_000 };
    let b = 1.0 - n as f64 / 2.0;
    let c = 1.0 + n as f64 / 2.0;
    let mut coeffs = Vec::with_capacity(1024);
    let mut d = 1.0f64;
    for k in 0..cap {
        coeffs.push(d);
        let kf = k as f64;
        d *= (b + kf) / (c + kf);
        if d == 0.0 || d.abs() < 1e-18 {
            break;
        }
    }
    let at_cut = sum_psi(&coeffs, PSI_TABLE_CUT);
    // Gauss: 2F1(a,b;c;1) = Γ(c)Γ(c-a-b)/(Γ(c-a)Γ(c-b)).
    let at_one =
        (lgamma(c) + lgamma(n as f64 - 1.0) - lgamma(n as f64 / 2.0) - lgamma(n as f64)).exp();
    PsiTable {
        coeffs,
        at_cut,
        at_one,
    }
}

fn sum_psi(coeffs: &[f64], t: f64) -> f64 {
    let mut sum = 0.0;
    let mut tk = 1.0;
    for &d in coeffs {
        let term = d * tk;
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            break;
        }
        tk *= t;
    }
    sum
}

/// Radial profile ψₙ(t) of the hyperbolic-harmonic extension of a linear
/// boundary function: `P_h[ζⱼ](x) = xⱼ ψₙ(|x|²)`, normalized so
/// ψₙ(1) = 1. Equals `2F1(1,1-n/2;1+n/2;t)` over its value at 1; for
/// n = 2 the profile is identically 1 and for n = 4 it is (3-t)/2.
pub fn radial_profile(n: usize, t: f64) -> f64 {
    debug_assert!((0.0..=1.0 + 1e-12).contains(&t));
    if n == 2 {
        return 1.0;
    }
    let table = psi_table(n);
    if t > PSI_TABLE_CUT {
        let w = (t.min(1.0) - PSI_TABLE_CUT) / (1.0 - PSI_TABLE_CUT);
        let f = table.at_cut + w * (table.at_one - table.at_cut);
        return f / table.at_one;
    }
    sum_psi(&table.coeffs, t) / table.at_one
}

/// Exact hyperbolic-harmonic extension of affine boundary data:
/// `c₀ + ψₙ(|x|²) Σ cⱼ xⱼ`. Agrees with [`poisson_extend`] to
/// quadrature accuracy and is what field evaluation uses.
pub fn harmonic_extension(n: usize, data: &BoundaryData, x: &[f64]) -> f64 {
    let t: f64 = x.iter().map(|c| c * c).sum();
    let lin: f64 = data.linear.iter().zip(x).map(|(c, xi)| c * xi).sum();
    data.c0 + radial_profile(n, t.min(1.0)) * lin
}

// ---------------------------------------------------------------------------
// Field trees.
// ---------------------------------------------------------------------------

/// Construction tree of a test field; every node kind is one of the
/// closure rules of the admissible monoid, so log|field| is
/// hyperbolically subharmonic by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldNode {
    /// Positive constant c.
    Constant(f64),
    /// exp(H) with H the hyperbolic-harmonic extension of the data.
    ExpHarmonic(BoundaryData),
    /// base^exponent with exponent ≥ 0.
    Power { base: Box<FieldNode>, exponent: f64 },
    /// Pointwise product.
    Product(Vec<FieldNode>),
    /// Σ wᵢ·childᵢ with wᵢ > 0.
    PositiveCombination(Vec<(f64, FieldNode)>),
    /// f(φ_a(x)) · Φₙ^e(|φ_a(x)|) / Φₙ^e(|x|) with e = α/p ≥ 0.
    MobiusPullback {
        inner: Box<FieldNode>,
        center: Vec<f64>,
        weight_exponent: f64,
    },
    /// n = 2 only: √(|a(z)|² + |b(z)|²) from Taylor coefficients with
    /// b₀ = 0; log of it is subharmonic.
    PlanarModulus {
        a: Vec<Complex64>,
        b: Vec<Complex64>,
    },
}

/// An evaluable test field: a construction tree plus its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TestField {
    dim: usize,
    node: FieldNode,
}

impl TestField {
    pub fn new(dim: usize, node: FieldNode) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Field(format!("dimension {dim} < 2")));
        }
        validate(&node, dim)?;
        Ok(TestField { dim, node })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self) -> &FieldNode {
        &self.node
    }

    /// log|field| at `x`; finite on the closed ball for the shipped
    /// constructors except at exact zeros of planar moduli (-∞).
    pub fn log_eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        log_eval_node(&self.node, self.dim, x)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.log_eval(x).exp()
    }

    /// Certified upper bound for log|field| over the closed ball.
    pub fn log_sup_bound(&self) -> f64 {
        log_sup_node(&self.node, self.dim)
    }

    /// All shipped constructors yield bounded fields; the flag is kept
    /// for interface completeness and recorded per tree.
    pub fn is_bounded(&self) -> bool {
        self.log_sup_bound().is_finite()
    }

    /// True when the field value depends only on |x|.
    pub fn is_radial(&self) -> bool {
        is_radial_node(&self.node)
    }

    /// The field scaled by a positive constant (stays in the monoid).
    pub fn scaled(&self, factor: f64) -> Result<TestField> {
        if !(factor > 0.0) {
            return Err(Error::Field(format!(
                "scale factor {factor} must be positive"
            )));
        }
        TestField::new(
            self.dim,
            FieldNode::Product(vec![FieldNode::Constant(factor), self.node.clone()]),
        )
    }

    /// Construction tree in the plain-text field format (the structural
    /// certificate).
    pub fn describe(&self) -> String {
        field_to_text(self)
    }
}

fn validate(node: &FieldNode, dim: usize) -> Result<()> {
    match node {
        FieldNode::Constant(c) => {
            if !(*c > 0.0) || !c.is_finite() {
                return Err(Error::Field(format!(
                    "constant {c} must be positive and finite"
                )));
            }
        }
        FieldNode::ExpHarmonic(d) => {
            if d.dim() != dim {
                return Err(Error::Field(format!(
                    "boundary data dimension {} != field dimension {dim}",
                    d.dim()
                )));
            }
        }
        FieldNode::Power { base, exponent } => {
            if !(*exponent >= 0.0) {
                return Err(Error::Field(format!(
                    "power exponent {exponent} is negative: not a monoid operation"
                )));
            }
            validate(base, dim)?;
        }
        FieldNode::Product(children) => {
            if children.is_empty() {
                return Err(Error::Field("empty product".into()));
            }
            for c in children {
                validate(c, dim)?;
            }
        }
        FieldNode::PositiveCombination(terms) => {
            if terms.is_empty() {
                return Err(Error::Field("empty positive combination".into()));
            }
            for (w, c) in terms {
                if !(*w > 0.0) {
                    return Err(Error::Field(format!(
                        "combination weight {w} must be strictly positive"
                    )));
                }
                validate(c, dim)?;
            }
        }
        FieldNode::MobiusPullback {
            inner,
            center,
            weight_exponent,
        } => {
            if center.len() != dim {
                return Err(Error::Field("pullback center dimension mismatch".into()));
            }
            let norm_sq: f64 = center.iter().map(|c| c * c).sum();
            if !(norm_sq < 1.0) {
                return Err(Error::Field(
                    "pullback center must lie inside the ball".into(),
                ));
            }
            if !(*weight_exponent >= 0.0) {
                return Err(Error::Field("pullback weight exponent must be >= 0".into()));
            }
            validate(inner, dim)?;
        }
        FieldNode::PlanarModulus { a, b } => {
            if dim != 2 {
                return Err(Error::Field(
                    "planar modulus fields exist only for n = 2".into(),
                ));
            }
            if let Some(b0) = b.first() {
                if b0.norm() != 0.0 {
                    return Err(Error::Field("planar modulus requires b_0 = 0".into()));
                }
            }
            if a.iter().all(|c| c.norm() == 0.0) && b.iter().all(|c| c.norm() == 0.0) {
                return Err(Error::Field(
                    "planar modulus with all-zero coefficients".into(),
                ));
            }
        }
    }
    Ok(())
}

fn log_eval_node(node: &FieldNode, n: usize, x: &[f64]) -> f64 {
    match node {
        FieldNode::Constant(c) => c.ln(),
        FieldNode::ExpHarmonic(d) => harmonic_extension(n, d, x),
        FieldNode::Power { base, exponent } => {
            if *exponent == 0.0 {
                0.0
            } else {
                exponent * log_eval_node(base, n, x)
            }
        }
        FieldNode::Product(children) => children.iter().map(|c| log_eval_node(c, n, x)).sum(),
        FieldNode::PositiveCombination(terms) => {
            let logs: Vec<f64> = terms
                .iter()
                .map(|(w, c)| w.ln() + log_eval_node(c, n, x))
                .collect();
            log_sum_exp(&logs)
        }
        FieldNode::MobiusPullback {
            inner,
            center,
            weight_exponent,
        } => {
            let map = pullback_map(n, center);
            let image = map.apply_coords(x);
            let t_img: f64 = image.iter().map(|c| c * c).sum();
            let t_x: f64 = x.iter().map(|c| c * c).sum();
            let child = log_eval_node(inner, n, &image);
            // log Φ(|m(x)|) - log Φ(|x|) via the bracket identity for
            // the singular (1-r²) part.
            let center_norm_sq: f64 = center.iter().map(|c| c * c).sum();
            let ratio = if map.is_identity() {
                0.0
            } else {
                ((1.0 - center_norm_sq) / map.bracket_sq(x)).ln()
            };
            let smooth = log_phi_smooth_cached(n, t_img.clamp(0.0, 1.0))
                - log_phi_smooth_cached(n, t_x.clamp(0.0, 1.0));
            child + weight_exponent * (smooth + (n as f64 - 1.0) * ratio)
        }
        FieldNode::PlanarModulus { a, b } => {
            let z = Complex64::new(x[0], x[1]);
            let va = horner(a, z);
            let vb = horner(b, z);
            0.5 * (va.norm_sqr() + vb.norm_sqr()).ln()
        }
    }
}

fn pullback_map(n: usize, center: &[f64]) -> MobiusMap<f64> {
    let point = BallPoint::new(center.to_vec()).unwrap_or_else(|_| BallPoint::origin(n));
    MobiusMap::new(point)
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

fn log_sup_node(node: &FieldNode, n: usize) -> f64 {
    match node {
        FieldNode::Constant(c) => c.ln(),
        FieldNode::ExpHarmonic(d) => d.range().1,
        FieldNode::Power { base, exponent } => {
            if *exponent == 0.0 {
                0.0
            } else {
                exponent * log_sup_node(base, n)
            }
        }
        FieldNode::Product(children) => children.iter().map(|c| log_sup_node(c, n)).sum(),
        FieldNode::PositiveCombination(terms) => {
            let logs: Vec<f64> = terms
                .iter()
                .map(|(w, c)| w.ln() + log_sup_node(c, n))
                .collect();
            log_sum_exp(&logs)
        }
        FieldNode::MobiusPullback {
            inner,
            center,
            weight_exponent,
        } => {
            // Φ-ratio ≤ exp(|ln Eₙ|)·((1+|a|)/(1-|a|))^{n-1}.
            let a: f64 = center.iter().map(|c| c * c).sum::<f64>().sqrt();
            let ln_en = log_phi_smooth_cached(n, 1.0);
            log_sup_node(inner, n)
                + weight_exponent * (ln_en.abs() + (n as f64 - 1.0) * ((1.0 + a) / (1.0 - a)).ln())
        }
        FieldNode::PlanarModulus { a, b } => {
            // Max-modulus principle: sup on the closed disk is on the
            // circle; dense grid plus a small guard for the gaps.
            let m = 4096;
            let mut best = f64::NEG_INFINITY;
            for j in 0..m {
                let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let z = Complex64::new(th.cos(), th.sin());
                let v = horner(a, z).norm_sqr() + horner(b, z).norm_sqr();
                best = best.max(v);
            }
            0.5 * best.ln() + 1e-5
        }
    }
}

fn is_radial_node(node: &FieldNode) -> bool {
    match node {
        FieldNode::Constant(_) => true,
        FieldNode::ExpHarmonic(d) => d.is_constant(),
        FieldNode::Power { base, .. } => is_radial_node(base),
        FieldNode::Product(children) => children.iter().all(is_radial_node),
        FieldNode::PositiveCombination(terms) => terms.iter().all(|(_, c)| is_radial_node(c)),
        FieldNode::MobiusPullback { inner, center, .. } => {
            center.iter().all(|&c| c == 0.0) && is_radial_node(inner)
        }
        FieldNode::PlanarModulus { a, b } => {
            a.iter().filter(|c| c.norm() != 0.0).count() <= 1
                && b.iter().filter(|c| c.norm() != 0.0).count() <= 1
        }
    }
}

/// Möbius pullback `g(x) = f(φ_a(x)) Φₙ^{α/p}(|φ_a(x)|)/Φₙ^{α/p}(|x|)`;
/// preserves the Bergman (α, p)-norm and the distribution of
/// |f|^p Φₙ^α under the invariant measure.
pub fn mobius_pullback(
    field: &TestField,
    center: Vec<f64>,
    alpha: f64,
    p: f64,
) -> Result<TestField> {
    if !(p > 0.0) || !(alpha > 0.0) {
        return Err(Error::Field(format!(
            "pullback needs alpha, p > 0; got ({alpha}, {p})"
        )));
    }
    TestField::new(
        field.dim,
        FieldNode::MobiusPullback {
            inner: Box::new(field.node.clone()),
            center,
            weight_exponent: alpha / p,
        },
    )
}

// ---------------------------------------------------------------------------
// Finite-difference hyperbolic Laplacian and the subharmonicity certificate.
// ---------------------------------------------------------------------------

/// Central-difference evaluation of
/// `Δ_h u = (1-|x|²)² Δu + 2(n-2)(1-|x|²) Σ xᵢ ∂ᵢu` with step `h`.
pub fn fd_hyperbolic_laplacian<F: Fn(&[f64]) -> f64>(
    u: &F,
    n: usize,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    let norm_sq: f64 = x.iter().map(|c| c * c).sum();
    let norm = norm_sq.sqrt();
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step {h} must be positive")));
    }
    if norm + h * (n as f64).sqrt() >= 1.0 {
        return Err(Error::Domain(format!(
            "step {h} too large near the boundary (|x| = {norm:.6})"
        )));
    }
    let u0 = u(x);
    let mut lap = 0.0;
    let mut radial = 0.0;
    let mut xs = x.to_vec();
    for i in 0..n {
        let xi = x[i];
        xs[i] = xi + h;
        let up = u(&xs);
        xs[i] = xi - h;
        let um = u(&xs);
        xs[i] = xi;
        lap += (up - 2.0 * u0 + um) / (h * h);
        radial += xi * (up - um) / (2.0 * h);
    }
    let w = 1.0 - norm_sq;
    Ok(w * w * lap + 2.0 * (n as f64 - 2.0) * w * radial)
}

/// FD Laplacian with a Richardson error estimate (h and h/2).
pub fn fd_hyperbolic_laplacian_with_err<F: Fn(&[f64]) -> f64>(
    u: &F,
    n: usize,
    x: &[f64],
    h: f64,
) -> Result<(f64, f64)> {
    let coarse = fd_hyperbolic_laplacian(u, n, x, h)?;
    let fine = fd_hyperbolic_laplacian(u, n, x, h / 2.0)?;
    // O(h²) scheme: extrapolate and bound the local error.
    let value = (4.0 * fine - coarse) / 3.0;
    let err = (fine - coarse).abs() / 3.0;
    Ok((value, err))
}

/// Adaptive FD step `1e-3 (1-|x|)`.
pub fn default_fd_step(x: &[f64]) -> f64 {
    let norm: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    1e-3 * (1.0 - norm)
}

/// One sampled violation of the certificate.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CertificateViolation {
    pub point: Vec<f64>,
    pub value: f64,
    pub tolerance: f64,
}

/// Result of [`certify_log_subharmonic`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct CertificateReport {
    pub samples: usize,
    pub seed: u64,
    /// Smallest sampled Δ_h log|f| (signed).
    pub min_value: f64,
    /// Construction tree: the structural half of the certificate.
    pub structure: String,
    pub violations: Vec<CertificateViolation>,
    pub passed: bool,
}

/// Sample `Δ_h log|field| ≥ -ε` at random interior points, with ε from
/// the per-point Richardson truncation estimate. Points where the log
/// is -∞ (zeros) are resampled.
pub fn certify_log_subharmonic(field: &TestField, samples: usize, seed: u64) -> CertificateReport {
    let n = field.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_f = |x: &[f64]| field.log_eval(x);
    let mut min_value = f64::INFINITY;
    let mut violations = Vec::new();
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < samples && attempts < samples * 10 {
        attempts += 1;
        // Radius capped away from the boundary so the stencil fits.
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm_sq: f64 = x.iter().map(|c| c * c).sum();
        if !(1e-8..=1.0).contains(&norm_sq) {
            continue;
        }
        let r_target = 0.9 * rng.gen_range(0.0f64..1.0).powf(1.0 / n as f64);
        let scale = r_target / norm_sq.sqrt();
        x.iter_mut().for_each(|c| *c *= scale);
        if !field.log_eval(&x).is_finite() {
            continue;
        }
        let h = default_fd_step(&x);
        let Ok((value, err)) = fd_hyperbolic_laplacian_with_err(&log_f, n, &x, h) else {
            continue;
        };
        let tolerance = 10.0 * err + 1e-6 * (1.0 + value.abs());
        min_value = min_value.min(value);
        if value < -tolerance {
            violations.push(CertificateViolation {
                point: x,
                value,
                tolerance,
            });
        }
        done += 1;
    }
    CertificateReport {
        samples: done,
        seed,
        min_value,
        structure: field.describe(),
        passed: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballgeo::{BallPoint, SpherePoint};
    use crate::quad::SphereGrid;
    use crate::weightfn;

    fn ball(coords: &[f64]) -> BallPoint<f64> {
        BallPoint::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn poisson_kernel_anchors() {
        // x = 0: kernel is 1 for every ζ.
        let zeta = SpherePoint::new(vec![0.6, 0.8]).unwrap();
        assert_eq!(poisson_kernel(&ball(&[0.0, 0.0]), &zeta), 1.0);
        // n=2 colinear: (1+r)/(1-r).
        for r in [0.2, 0.5, 0.9] {
            let x = ball(&[0.6 * r, 0.8 * r]);
            let p = poisson_kernel(&x, &zeta);
            assert!((p - (1.0 + r) / (1.0 - r)).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn poisson_kernel_mean_is_one() {
        // P_h[1] ≡ 1 (constants are hyperbolically harmonic).
        let g2 = SphereGrid::standard(2, 1);
        let x2 = ball(&[0.3, -0.5]);
        let m2 = g2.mean(|z| poisson_kernel_coords(2, x2.coords(), z));
        assert!((m2 - 1.0).abs() < 1e-12, "n=2 mean {m2}");
        let g3 = SphereGrid::standard(3, 1);
        let x3 = ball(&[0.3, -0.2, 0.4]);
        let m3 = g3.mean(|z| poisson_kernel_coords(3, x3.coords(), z));
        assert!((m3 - 1.0).abs() < 1e-10, "n=3 mean {m3}");
    }

    #[test]
    fn poisson_extension_constant_data() {
        let data = BoundaryData::constant(2.5, 3);
        let grid = SphereGrid::standard(3, 1);
        assert!((poisson_extend(&data, &BallPoint::origin(3), &grid) - 2.5).abs() < 1e-12);
        assert!((poisson_extend(&data, &ball(&[0.5, 0.2, -0.3]), &grid) - 2.5).abs() < 1e-7);
        // Near the boundary the kernel peak outruns the grid; the
        // refinement-based estimate has to cover the actual error.
        let refined = SphereGrid::standard(3, 4);
        let v = poisson_extend_with_err(&data, &ball(&[0.7, 0.0, 0.5]), &grid, &refined);
        assert!(
            (v.value - 2.5).abs() <= v.error.max(1e-9),
            "err {} est {}",
            (v.value - 2.5).abs(),
            v.error
        );
    }

    #[test]
    fn poisson_extension_at_origin_is_mean() {
        let data = BoundaryData::new(0.7, vec![0.4, -0.1, 0.2]).unwrap();
        let grid = SphereGrid::standard(3, 1);
        let v = poisson_extend(&data, &BallPoint::origin(3), &grid);
        // Mean of linear terms over the sphere vanishes.
        assert!((v - 0.7).abs() < 1e-12);
    }

    #[test]
    fn poisson_extension_matches_exact_profile() {
        // Quadrature route vs the exact hypergeometric profile.
        let data = BoundaryData::new(0.2, vec![1.0, -0.5, 0.25]).unwrap();
        let grid = SphereGrid::product_gauss(48, 96);
        for p in [[0.3, -0.2, 0.4], [0.1, 0.0, 0.0], [-0.5, 0.4, 0.3]] {
            let q = poisson_extend(&data, &ball(&p), &grid);
            let e = harmonic_extension(3, &data, &p);
            assert!((q - e).abs() < 1e-9, "{p:?}: quad {q} vs exact {e}");
        }
    }

    #[test]
    fn radial_profile_reference_values() {
        // ψ₂ ≡ 1; ψ₄(t) = (3-t)/2 normalized... the raw 2F1 is (1 - t/3),
        // and ψ₄ = (1-t/3)/(2/3) = (3-t)/2.
        assert_eq!(radial_profile(2, 0.37), 1.0);
        assert!((radial_profile(4, 0.37) - (3.0 - 0.37) / 2.0).abs() < 1e-12);
        // Frozen mpmath values for n = 3 and n = 5.
        let cases = [
            (3, 0.1, 1.306_272_405_598_049_3),
            (3, 0.5, 1.188_387_379_929_884_7),
            (3, 0.9, 1.044_906_606_269_922_5),
            (5, 0.1, 1.532_197_567_995_925_4),
            (5, 0.5, 1.277_177_366_263_146_6),
            (5, 0.9, 1.051_201_778_029_430_9),
        ];
        for (n, t, expect) in cases {
            let v = radial_profile(n, t);
            assert!(
                (v - expect).abs() < 1e-11,
                "psi_{n}({t}) = {v}, expect {expect}"
            );
        }
        for n in [2usize, 3, 4, 5] {
            assert!((radial_profile(n, 1.0) - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn exp_harmonic_field_is_harmonic_under_fd() {
        // Δ_h of the log of an ExpHarmonic field vanishes.
        for n in [2usize, 3, 4] {
            let mut linear = vec![0.25, -0.4, 0.1, 0.05];
            linear.truncate(n);
            let data = BoundaryData::new(0.3, linear).unwrap();
            let field = TestField::new(n, FieldNode::ExpHarmonic(data)).unwrap();
            let log_f = |x: &[f64]| field.log_eval(x);
            for point in [[0.2, 0.1, -0.3, 0.0], [0.0, 0.5, 0.2, 0.1]] {
                let x = &point[..n];
                let h = default_fd_step(x);
                let v = fd_hyperbolic_laplacian(&log_f, n, x, h).unwrap();
                assert!(v.abs() < 1e-6, "n={n} x={x:?}: {v}");
            }
        }
    }

    #[test]
    fn fd_laplacian_anchors() {
        // Constants annihilate.
        let f = |_: &[f64]| 1.0;
        let v = fd_hyperbolic_laplacian(&f, 3, &[0.2, 0.1, 0.4], 1e-4).unwrap();
        assert_eq!(v, 0.0);
        // log Φₙ solves Δ_h u = -4(n-1)².
        for n in [2usize, 3, 4] {
            let u = |x: &[f64]| {
                let r: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                weightfn::log_phi_cached(n, r)
            };
            for point in [[0.3, 0.2, -0.1, 0.0], [0.6, -0.4, 0.1, 0.2]] {
                let x = &point[..n];
                let h = default_fd_step(x);
                let v = fd_hyperbolic_laplacian(&u, n, x, h).unwrap();
                let expect = -4.0 * ((n - 1) as f64).powi(2);
                assert!(
                    ((v - expect) / expect).abs() < 1e-4,
                    "n={n} x={x:?}: {v} vs {expect}"
                );
            }
        }
        // n=2: log|z - a| is harmonic away from a (Δ_h = (1-|x|²)²Δ).
        let u = |x: &[f64]| ((x[0] - 1.5) * (x[0] - 1.5) + (x[1] - 0.2) * (x[1] - 0.2)).ln() / 2.0;
        let v = fd_hyperbolic_laplacian(&u, 2, &[0.4, -0.3], 1e-5).unwrap();
        assert!(v.abs() < 1e-6, "log-modulus FD {v}");
        // Step validation near the boundary.
        assert!(fd_hyperbolic_laplacian(&f, 2, &[0.999, 0.0], 1e-2).is_err());
    }

    #[test]
    fn field_validation_rules() {
        assert!(TestField::new(3, FieldNode::Constant(0.0)).is_err());
        assert!(TestField::new(3, FieldNode::Constant(-1.0)).is_err());
        let unit = FieldNode::Constant(1.0);
        assert!(TestField::new(
            3,
            FieldNode::Power {
                base: Box::new(unit.clone()),
                exponent: -0.5
            }
        )
        .is_err());
        assert!(TestField::new(3, FieldNode::Product(vec![])).is_err());
        assert!(
            TestField::new(3, FieldNode::PositiveCombination(vec![(0.0, unit.clone())])).is_err()
        );
        assert!(TestField::new(
            3,
            FieldNode::MobiusPullback {
                inner: Box::new(unit.clone()),
                center: vec![1.2, 0.0, 0.0],
                weight_exponent: 1.0
            }
        )
        .is_err());
        // Planar nodes only in n = 2, and b₀ must vanish.
        assert!(TestField::new(
            3,
            FieldNode::PlanarModulus {
                a: vec![Complex64::new(1.0, 0.0)],
                b: vec![]
            }
        )
        .is_err());
        assert!(TestField::new(
            2,
            FieldNode::PlanarModulus {
                a: vec![Complex64::new(1.0, 0.0)],
                b: vec![Complex64::new(0.5, 0.0)]
            }
        )
        .is_err());
    }

    #[test]
    fn power_of_constant_evaluates_exactly() {
        let f = TestField::new(
            2,
            FieldNode::Power {
                base: Box::new(FieldNode::Constant(3.0)),
                exponent: 2.5,
            },
        )
        .unwrap();
        let v = f.eval(&[0.1, 0.2]);
        assert!((v - 3.0f64.powf(2.5)).abs() < 1e-12);
        // Zero exponent is the constant 1 even on -∞ logs.
        let z = TestField::new(
            2,
            FieldNode::Power {
                base: Box::new(FieldNode::PlanarModulus {
                    a: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                    b: vec![],
                }),
                exponent: 0.0,
            },
        )
        .unwrap();
        assert_eq!(z.eval(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn planar_modulus_values() {
        // |z| and |1+z|.
        let abs_z = TestField::new(
            2,
            FieldNode::PlanarModulus {
                a: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                b: vec![],
            },
        )
        .unwrap();
        assert!((abs_z.eval(&[0.3, 0.4]) - 0.5).abs() < 1e-15);
        assert_eq!(abs_z.log_eval(&[0.0, 0.0]), f64::NEG_INFINITY);
        assert!(abs_z.is_radial());
        let one_plus_z = TestField::new(
            2,
            FieldNode::PlanarModulus {
                a: vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
                b: vec![],
            },
        )
        .unwrap();
        let v = one_plus_z.eval(&[0.3, 0.4]);
        assert!((v - ((1.3f64 * 1.3 + 0.16).sqrt())).abs() < 1e-12);
        assert!(!one_plus_z.is_radial());
        // sup |1+z| = 2 on the closed disk.
        assert!((one_plus_z.log_sup_bound() - 2f64.ln()).abs() < 1e-4);
    }

    #[test]
    fn sup_bounds_dominate_samples() {
        let field = preset("poscomb", 3).unwrap();
        let bound = field.log_sup_bound();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let mut x: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.7..0.7)).collect();
            let norm: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm >= 0.999 {
                x.iter_mut().for_each(|c| *c *= 0.9 / norm);
            }
            assert!(field.log_eval(&x) <= bound + 1e-12);
        }
    }

    #[test]
    fn pullback_defining_identity() {
        // g(x) = f(m(x))·Φ^{e}(|m(x)|)/Φ^{e}(|x|) checked against direct
        // evaluation through log Φ at interior points.
        let inner = preset("expharm", 3).unwrap();
        let g = mobius_pullback(&inner, vec![0.3, -0.1, 0.2], 2.0, 1.5).unwrap();
        let e = 2.0 / 1.5;
        let map = MobiusMap::new(ball(&[0.3, -0.1, 0.2]));
        for p in [[0.2, 0.4, -0.1], [0.0, 0.0, 0.0], [-0.6, 0.1, 0.3]] {
            let img = map.apply(&ball(&p));
            let direct = inner.log_eval(img.coords())
                + e * (weightfn::log_phi_cached(3, img.norm())
                    - weightfn::log_phi_cached(3, p.iter().map(|c| c * c).sum::<f64>().sqrt()));
            let got = g.log_eval(&p);
            assert!((got - direct).abs() < 1e-11, "{p:?}: {got} vs {direct}");
        }
        // f ≡ 1 pullback at the center: Φ^{-e}(|a|).
        let unit = preset("unit", 3).unwrap();
        let gu = mobius_pullback(&unit, vec![0.3, -0.1, 0.2], 2.0, 1.5).unwrap();
        let at_center = gu.log_eval(&[0.3, -0.1, 0.2]);
        let expect = -e * weightfn::log_phi_cached(3, (0.14f64).sqrt());
        assert!((at_center - expect).abs() < 1e-12);
        // Identity pullback leaves the field unchanged.
        let id = mobius_pullback(&inner, vec![0.0, 0.0, 0.0], 2.0, 1.5).unwrap();
        for p in [[0.2, 0.4, -0.1], [0.5, 0.0, 0.3]] {
            assert!((id.log_eval(&p) - inner.log_eval(&p)).abs() < 1e-13);
        }
    }

    #[test]
    fn pullback_distributes_over_products() {
        let a = preset("expharm", 2).unwrap();
        let b = preset("expharm2", 2).unwrap();
        let prod = TestField::new(
            2,
            FieldNode::Product(vec![a.node().clone(), b.node().clone()]),
        )
        .unwrap();
        let center = vec![0.25, -0.4];
        // Pullback of the product with exponent e, vs product of
        // pullbacks with exponents e1 + e2 = e.
        let lhs = mobius_pullback(&prod, center.clone(), 3.0, 2.0).unwrap();
        let ga = mobius_pullback(&a, center.clone(), 1.0, 2.0).unwrap();
        let gb = mobius_pullback(&b, center.clone(), 2.0, 2.0).unwrap();
        let rhs = TestField::new(
            2,
            FieldNode::Product(vec![ga.node().clone(), gb.node().clone()]),
        )
        .unwrap();
        for p in [[0.1, 0.3], [0.7, -0.2], [0.0, 0.0]] {
            let l = lhs.log_eval(&p);
            let r = rhs.log_eval(&p);
            assert!((l - r).abs() < 1e-10, "{p:?}: {l} vs {r}");
        }
    }

    #[test]
    fn pullback_boundary_values_stay_finite() {
        let unit = preset("unit", 3).unwrap();
        let g = mobius_pullback(&unit, vec![0.5, 0.0, 0.0], 2.0, 2.0).unwrap();
        // On the boundary sphere the Φ-ratio reduces to the bracket form.
        let zeta = [0.6, 0.8, 0.0];
        let v = g.log_eval(&zeta);
        assert!(v.is_finite());
        let map = MobiusMap::new(ball(&[0.5, 0.0, 0.0]));
        let expect = (3.0 - 1.0) * ((1.0 - 0.25) / map.bracket_sq(&zeta)).ln();
        assert!((v - expect).abs() < 1e-10, "{v} vs {expect}");
    }

    #[test]
    fn certificates_pass_for_monoid_fields() {
        for name in ["unit", "expharm", "poscomb", "product", "power"] {
            for n in [2usize, 3] {
                let field = preset(name, n).unwrap();
                let rep = certify_log_subharmonic(&field, 200, 42);
                assert!(rep.passed, "{name} n={n}: min {}", rep.min_value);
                assert_eq!(rep.samples, 200);
            }
        }
        // Constants sit exactly at zero.
        let c = preset("unit", 2).unwrap();
        let rep = certify_log_subharmonic(&c, 50, 7);
        assert!(rep.min_value.abs() < 1e-9);
        // Planar moduli of analytic polynomials (n = 2).
        let f = preset("planar-one-plus-z", 2).unwrap();
        let rep = certify_log_subharmonic(&f, 200, 3);
        assert!(rep.passed, "planar: {}", rep.min_value);
        // Pullbacks stay in the monoid.
        let g = mobius_pullback(&preset("expharm", 2).unwrap(), vec![0.3, 0.2], 2.0, 1.0).unwrap();
        let rep = certify_log_subharmonic(&g, 200, 5);
        assert!(rep.passed, "pullback: {}", rep.min_value);
    }

    #[test]
    fn positive_combination_certificate() {
        // Positive combinations of exponentials of harmonics: the FD
        // values must be ≥ -ε but genuinely positive somewhere.
        let field = preset("poscomb", 2).unwrap();
        let rep = certify_log_subharmonic(&field, 300, 19);
        assert!(rep.passed);
        assert!(rep.min_value > -1e-7);
    }
}
