//! The radial weight family
//!
//! ```text
//! u_b(r) = exp{ b(2-n) r² / ((n-1)n) · F[1,1,2-n/2; 2,1+n/2; r²] } (1-r²)^{b/(n-1)}
//! ```
//!
//! solving Δ_h log u_b = -4b, with Φₙ = u_{(n-1)²}, the boundary constant
//! Eₙ = lim_{r→1} Φₙ(r)/(1-r²)^{n-1}, and the Bergman normalization c(α).
//!
//! All arithmetic near r = 1 happens on logarithms; the smooth series
//! part and the (1-r²) power are kept separate so that ratios of weights
//! (Möbius pullbacks) stay finite at the boundary.

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::Real;
use crate::specfun::{gauss_2f1, HypergeometricSpec};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Radial weight specification: dimension, exponent `b` of Δ_h log u = -4b,
/// and the series tolerance.
#[derive(Debug, Clone)]
pub struct WeightSpec<R> {
    n: usize,
    b: R,
    tol: R,
}

impl<R: Real> WeightSpec<R> {
    pub fn new(n: usize, b: R, tol: R) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension {n} < 2")));
        }
        if b < R::zero() {
            return Err(Error::Domain(format!("exponent b = {b} < 0")));
        }
        if !(tol > R::zero()) {
            return Err(Error::Domain("series tolerance must be positive".into()));
        }
        Ok(WeightSpec { n, b, tol })
    }

    /// The weight Φₙ: b = (n-1)².
    pub fn phi(n: usize) -> Result<Self> {
        let b = R::of((n - 1) * (n - 1));
        Self::new(n, b, R::cst(1e-13))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> R {
        self.b
    }

    /// log u_b(r) for r ∈ [0, 1).
    pub fn log_u_b(&self, r: R) -> Result<R> {
        let t = check_radius(r)?;
        let smooth = self.log_u_b_smooth(t)?;
        let n = R::of(self.n);
        Ok(smooth + self.b / (n - R::one()) * (R::one() - t).ln())
    }

    pub fn u_b(&self, r: R) -> Result<R> {
        Ok(self.log_u_b(r)?.exp())
    }

    /// The series part `b(2-n) t F(t) / ((n-1)n)` of log u_b, finite on
    /// [0, 1].
    pub fn log_u_b_smooth(&self, t: R) -> Result<R> {
        let n = R::of(self.n);
        let f = weight_series(self.n, t, self.tol)?;
        Ok(self.b * (R::two() - n) / ((n - R::one()) * n) * t * f)
    }
}

fn check_radius<R: Real>(r: R) -> Result<R> {
    if !(r >= R::zero() && r < R::one()) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
    }
    Ok(r * r)
}

/// `F[1,1,2-n/2; 2,1+n/2; t]` for t ∈ [0, 1].
fn weight_series<R: Real>(n: usize, t: R, tol: R) -> Result<R> {
    let nf = R::of(n);
    let spec = HypergeometricSpec::new(
        vec![R::one(), R::one(), R::two() - nf * R::half()],
        vec![R::two(), R::one() + nf * R::half()],
        tol,
        1_000_000,
    )?;
    Ok(spec.evaluate(t)?.value)
}

/// log Φₙ(r) = φ̃(r²) + (n-1) ln(1-r²) for r ∈ [0, 1).
pub fn log_phi<R: Real>(n: usize, r: R) -> Result<R> {
    let t = check_radius(r)?;
    let nf = R::of(n);
    Ok(log_phi_smooth(n, t)? + (nf - R::one()) * (R::one() - t).ln())
}

/// Φₙ(r); evaluated through the logarithm to avoid underflow near r = 1.
pub fn phi<R: Real>(n: usize, r: R) -> Result<R> {
    Ok(log_phi(n, r)?.exp())
}

/// Smooth part φ̃(t) = (n-1)(2-n) t F(t)/n of log Φₙ, finite on [0, 1];
/// φ̃(1) = ln Eₙ.
pub fn log_phi_smooth<R: Real>(n: usize, t: R) -> Result<R> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension {n} < 2")));
    }
    if t < R::zero() || t > R::one() {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    if n == 2 {
        return Ok(R::zero());
    }
    let nf = R::of(n);
    let f = weight_series(n, t, R::cst(1e-13))?;
    Ok((nf - R::one()) * (R::two() - nf) / nf * t * f)
}

// Cached data for the f64 hot path (field evaluation hits log Φ per
// sample point): series coefficients of F[1,1,2-n/2;2,1+n/2;·] plus two
// anchor values bridging the last sliver before t = 1, where the n = 3
// series decays only like k^{-3}.
struct PhiSeriesTable {
    coeffs: Vec<f64>,
    smooth_at_cut: f64,
    smooth_at_one: f64,
}

const PHI_TABLE_CUT: f64 = 1.0 - 1e-7;

// Read-mostly single-initialization tables: lock-free OnceLock slots for
// the dimensions the suites actually run, a mutexed map beyond that.
const DIRECT_TABLE_DIMS: usize = 16;

fn phi_series_table(n: usize) -> Arc<PhiSeriesTable> {
    static SLOTS: [OnceLock<Arc<PhiSeriesTable>>; DIRECT_TABLE_DIMS] =
        [const { OnceLock::new() }; DIRECT_TABLE_DIMS];
    static OVERFLOW: OnceLock<Mutex<HashMap<usize, Arc<PhiSeriesTable>>>> = OnceLock::new();
    if n < DIRECT_TABLE_DIMS {
        return SLOTS[n]
            .get_or_init(|| Arc::new(build_phi_table(n)))
            .clone();
    }
    let cache = OVERFLOW.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(build_phi_table(n)))
        .clone()
}

fn build_phi_table(n: usize) -> PhiSeriesTable {
    let cap = if n == 3 { 400_000 } else { 20_000 };
    let c_param = 2.0 - n as f64 / 2.0;
    let v_param = 1.0 + n as f64 / 2.0;
    let mut coeffs = Vec::with_capacity(1024);
    let mut c = 1.0f64;
    for k in 0..cap {
        coeffs.push(c);
        let kf = k as f64;
        c *= (kf + 1.0) * (c_param + kf) / ((kf + 2.0) * (v_param + kf));
        if c == 0.0 || c.abs() < 1e-18 {
            break;
        }
    }
    let smooth_at_cut = sum_table(n, &coeffs, PHI_TABLE_CUT);
    let smooth_at_one =
        log_phi_smooth::<f64>(n, 1.0).expect("series at t = 1 converges for n >= 2");
    PhiSeriesTable {
        coeffs,
        smooth_at_cut,
        smooth_at_one,
    }
}

fn sum_table(n: usize, coeffs: &[f64], t: f64) -> f64 {
    let mut sum = 0.0;
    let mut tk = 1.0;
    for &c in coeffs {
        let term = c * tk;
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            break;
        }
        tk *= t;
    }
    let nf = n as f64;
    (nf - 1.0) * (2.0 - nf) / nf * t * sum
}

/// f64 fast path for [`log_phi_smooth`] backed by the coefficient cache;
/// agreement with the generic route is pinned by tests.
pub fn log_phi_smooth_cached(n: usize, t: f64) -> f64 {
    debug_assert!(n >= 2 && (0.0..=1.0).contains(&t));
    if n == 2 {
        return 0.0;
    }
    let table = phi_series_table(n);
    if t > PHI_TABLE_CUT {
        // Linear bridge across the last 1e-7; the curvature of the smooth
        // part is at worst logarithmic there, so the interpolation error
        // is far below the series tolerance.
        let w = (t - PHI_TABLE_CUT) / (1.0 - PHI_TABLE_CUT);
        return table.smooth_at_cut + w * (table.smooth_at_one - table.smooth_at_cut);
    }
    sum_table(n, &table.coeffs, t)
}

/// f64 fast path for log Φₙ.
pub fn log_phi_cached(n: usize, r: f64) -> f64 {
    let t = r * r;
    log_phi_smooth_cached(n, t) + (n as f64 - 1.0) * (1.0 - t).ln()
}

/// Boundary constant Eₙ = exp{(n-1)(2-n)/n · F[...; 1]} ∈ (0, 1], E₂ = 1.
pub fn e_constant<R: Real>(n: usize) -> Result<R> {
    Ok(log_phi_smooth(n, R::one())?.exp())
}

/// Bergman normalization c(α): 1/c(α) = n ∫₀¹ r^{n-1} Φₙ^α(r) (1-r²)^{-n} dr.
///
/// Substituting u = r² gives `(n/2)∫₀¹ u^{n/2-1} e^{αφ̃(u)} (1-u)^{β-1} du`
/// with β = (α-1)(n-1); divergent for α ≤ 1 (equivalently α(n-1) - n ≤ -1).
pub fn c_alpha(n: usize, alpha: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension {n} < 2")));
    }
    let beta = (alpha - 1.0) * (n as f64 - 1.0);
    if beta <= 0.0 {
        return Err(Error::Divergent(format!(
            "c(alpha) diverges: alpha(n-1) - n = {} <= -1",
            alpha * (n as f64 - 1.0) - n as f64
        )));
    }
    let half_n = n as f64 / 2.0;
    let g =
        move |u: f64| half_n * u.powf(half_n - 1.0) * (alpha * log_phi_smooth_cached(n, u)).exp();
    let integral = quad::weighted_unit_integral(&g, beta, 1e-11, 4000)?;
    Ok(1.0 / integral.value)
}

/// Row of the ODE-oracle comparison table.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct OdeOracleRow {
    pub r: f64,
    /// ∫₀^r h(t) dt with h from the first-order radial ODE.
    pub reconstructed: f64,
    /// log u_b(r) by the closed form.
    pub closed_form: f64,
}

/// Independent correctness oracle for the closed form of u_b: integrates
///
/// ```text
/// h(r) = -4 b r F₀[1, 1-n/2; 1+n/2; r²] / (n (1-r²))
/// ```
///
/// cumulatively over the grid and reports the worst deviation from
/// log u_b.
pub fn radial_ode_oracle(spec: &WeightSpec<f64>, r_grid: &[f64]) -> Result<OdeOracleTable> {
    let n = spec.dim();
    let b = spec.exponent();
    let h = move |r: f64| -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let f0 = gauss_2f1(1.0, 1.0 - n as f64 / 2.0, 1.0 + n as f64 / 2.0, r * r)
            .expect("2F1 arguments in range");
        -4.0 * b * r * f0 / (n as f64 * (1.0 - r * r))
    };
    let mut rows = Vec::with_capacity(r_grid.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut max_deviation = 0.0f64;
    for &r in r_grid {
        if !(0.0..1.0).contains(&r) || r < prev {
            return Err(Error::Domain(
                "ODE oracle grid must be nondecreasing inside [0, 1)".into(),
            ));
        }
        acc += quad::adaptive(&h, prev, r, 1e-12, 1e-15, 4000)?.value;
        prev = r;
        let closed = spec.log_u_b(r)?;
        max_deviation = max_deviation.max((acc - closed).abs());
        rows.push(OdeOracleRow {
            r,
            reconstructed: acc,
            closed_form: closed,
        });
    }
    Ok(OdeOracleTable {
        n,
        b,
        max_deviation,
        rows,
    })
}

/// Result of [`radial_ode_oracle`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct OdeOracleTable {
    pub n: usize,
    pub b: f64,
    pub max_deviation: f64,
    pub rows: Vec<OdeOracleRow>,
}
