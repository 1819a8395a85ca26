//! Hyperbolic geometry of the unit ball.
//!
//! Volumes and perimeters are taken against the hyperbolic measure
//! `|E|_h = ∫_E (2/(1-|x|²))ⁿ dx` and its boundary analogue; the ball of
//! hyperbolic radius `s` is the Euclidean ball of radius `tanh(s/2)`,
//! with
//!
//! ```text
//! V_s = n ωₙ ∫_0^s sinh^{n-1} t dt,     P_s = n ωₙ sinh^{n-1} s .
//! ```
//!
//! The isoperimetric profile is Υ(v) = v / P²_{S(v)} where `S` inverts
//! `s ↦ V_s`; for n = 2 it collapses to Υ(v) = 1/(4π + v). The Möbius
//! map here is the standard involution exchanging 0 and a chosen center,
//! normalized by the bracket `[x,a]² = 1 + |x|²|a|² - 2⟨x,a⟩`.

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::Real;
use crate::specfun::lgamma;

/// Point of the open unit ball with cached squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint<R> {
    coords: Vec<R>,
    norm_sq: R,
}

impl<R: Real> BallPoint<R> {
    pub fn new(coords: Vec<R>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Domain("ball points need dimension >= 2".into()));
        }
        let norm_sq = coords.iter().map(|&c| c * c).sum();
        if !(norm_sq < R::one()) {
            return Err(Error::Domain(format!(
                "point with |x|^2 = {norm_sq} is not inside the unit ball"
            )));
        }
        Ok(BallPoint { coords, norm_sq })
    }

    pub fn origin(dim: usize) -> Self {
        BallPoint {
            coords: vec![R::zero(); dim],
            norm_sq: R::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[R] {
        &self.coords
    }

    pub fn norm_sq(&self) -> R {
        self.norm_sq
    }

    pub fn norm(&self) -> R {
        self.norm_sq.sqrt()
    }
}

/// Point of the unit sphere (normalized on construction).
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint<R> {
    coords: Vec<R>,
}

impl<R: Real> SpherePoint<R> {
    pub fn new(coords: Vec<R>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Domain("sphere points need dimension >= 2".into()));
        }
        let norm_sq: R = coords.iter().map(|&c| c * c).sum();
        if norm_sq <= R::cst(1e-300) {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        let inv = norm_sq.sqrt().recip();
        Ok(SpherePoint {
            coords: coords.into_iter().map(|c| c * inv).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[R] {
        &self.coords
    }
}

/// Involutive Möbius automorphism of the ball exchanging 0 and `center`.
///
/// For center a ≠ 0 the map is
///
/// ```text
/// φ_a(x) = [ (1-|a|²)(a - x) + |x-a|² a ] / [x,a]²
/// ```
///
/// which satisfies φ_a ∘ φ_a = id, `|φ_a(x)| = |x-a|/[x,a]`, and
/// `1 - |φ_a(x)|² = (1-|a|²)(1-|x|²)/[x,a]²`. A zero center yields the
/// identity map.
#[derive(Debug, Clone)]
pub struct MobiusMap<R> {
    center: BallPoint<R>,
}

impl<R: Real> MobiusMap<R> {
    pub fn new(center: BallPoint<R>) -> Self {
        MobiusMap { center }
    }

    pub fn identity(dim: usize) -> Self {
        MobiusMap {
            center: BallPoint::origin(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn center(&self) -> &BallPoint<R> {
        &self.center
    }

    pub fn is_identity(&self) -> bool {
        self.center.norm_sq == R::zero()
    }

    /// `[x,a]² = 1 + |x|²|a|² - 2⟨x,a⟩`, evaluated for any x.
    pub fn bracket_sq(&self, x: &[R]) -> R {
        let a = &self.center.coords;
        let mut dot = R::zero();
        let mut xsq = R::zero();
        for (xi, ai) in x.iter().zip(a) {
            dot += *xi * *ai;
            xsq += *xi * *xi;
        }
        R::one() + xsq * self.center.norm_sq - R::two() * dot
    }

    /// Image coordinates; valid on the closed ball (boundary maps to
    /// boundary).
    pub fn apply_coords(&self, x: &[R]) -> Vec<R> {
        if self.is_identity() {
            return x.to_vec();
        }
        let a = &self.center.coords;
        let one_minus_a = R::one() - self.center.norm_sq;
        let mut diff_sq = R::zero();
        for (xi, ai) in x.iter().zip(a) {
            let d = *xi - *ai;
            diff_sq += d * d;
        }
        let denom = self.bracket_sq(x);
        x.iter()
            .zip(a)
            .map(|(xi, ai)| (one_minus_a * (*ai - *xi) + diff_sq * *ai) / denom)
            .collect()
    }

    pub fn apply(&self, x: &BallPoint<R>) -> BallPoint<R> {
        let coords = self.apply_coords(&x.coords);
        let norm_sq = coords.iter().map(|&c| c * c).sum();
        BallPoint { coords, norm_sq }
    }

    /// `1 - |φ_a(x)|²`, computed through the bracket identity; stable up
    /// to the boundary where it vanishes linearly with `1 - |x|²`.
    pub fn image_norm_sq_complement(&self, x: &[R]) -> R {
        if self.is_identity() {
            let xsq: R = x.iter().map(|&c| c * c).sum();
            return R::one() - xsq;
        }
        let xsq: R = x.iter().map(|&c| c * c).sum();
        (R::one() - self.center.norm_sq) * (R::one() - xsq) / self.bracket_sq(x)
    }

    /// Jacobian `J(x) = ((1-|φ(x)|²)/(1-|x|²))ⁿ = ((1-|a|²)/[x,a]²)ⁿ`.
    pub fn jacobian(&self, x: &BallPoint<R>) -> R {
        let n = self.dim() as i32;
        if self.is_identity() {
            return R::one();
        }
        ((R::one() - self.center.norm_sq) / self.bracket_sq(&x.coords)).powi(n)
    }
}

/// Euclidean volume ωₙ of the unit ball, π^{n/2}/Γ(n/2+1).
pub fn unit_ball_volume<R: Real>(n: usize) -> R {
    let half_n = R::of(n) * R::half();
    (half_n * R::pi().ln() - lgamma(half_n + R::one())).exp()
}

/// Surface measure n·ωₙ of the unit sphere 𝕊^{n-1}.
pub fn sphere_surface<R: Real>(n: usize) -> R {
    R::of(n) * unit_ball_volume::<R>(n)
}

/// Euclidean radius tanh(s/2) of the hyperbolic ball of radius s.
pub fn euclidean_radius<R: Real>(s: R) -> R {
    (s * R::half()).tanh()
}

/// Hyperbolic radius 2·atanh(ρ) of the Euclidean ball of radius ρ < 1.
pub fn hyperbolic_radius<R: Real>(rho: R) -> Result<R> {
    if !(rho >= R::zero() && rho < R::one()) {
        return Err(Error::Domain(format!(
            "euclidean radius {rho} outside [0, 1)"
        )));
    }
    Ok(R::two() * rho.atanh())
}

/// `∫_0^s sinh^{n-1} t dt` by adaptive quadrature.
pub fn sinh_power_integral<R: Real>(n: usize, s: R, rel_tol: R) -> Result<R> {
    if s == R::zero() {
        return Ok(R::zero());
    }
    let p = (n - 1) as i32;
    let f = move |t: R| t.sinh().powi(p);
    Ok(quad::adaptive(&f, R::zero(), s, rel_tol, R::zero(), 4000)?.value)
}

const VOLUME_REL_TOL: f64 = 1e-11;

/// Hyperbolic volume `V_s = n ωₙ ∫_0^s sinh^{n-1} t dt` of the ball of
/// hyperbolic radius s.
pub fn hyperbolic_ball_volume<R: Real>(n: usize, s: R) -> Result<R> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension {n} < 2")));
    }
    if s < R::zero() {
        return Err(Error::Domain(format!("radius {s} < 0")));
    }
    // Tolerance floor keeps the quadrature attainable at f32.
    let tol = R::cst(VOLUME_REL_TOL).max(R::epsilon() * R::cst(50.0));
    Ok(sphere_surface::<R>(n) * sinh_power_integral(n, s, tol)?)
}

/// Hyperbolic perimeter `P_s = n ωₙ sinh^{n-1} s` (closed form).
pub fn hyperbolic_ball_perimeter<R: Real>(n: usize, s: R) -> Result<R> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension {n} < 2")));
    }
    if s < R::zero() {
        return Err(Error::Domain(format!("radius {s} < 0")));
    }
    Ok(sphere_surface::<R>(n) * s.sinh().powi(n as i32 - 1))
}

/// Hyperbolic volume of the Euclidean ball of radius ρ < 1.
pub fn ball_volume_at_euclidean_radius<R: Real>(n: usize, rho: R) -> Result<R> {
    hyperbolic_ball_volume(n, hyperbolic_radius(rho)?)
}

/// Inverse `S(v)` of the strictly increasing volume map `s ↦ V_s`:
/// bracketed bisection, then secant polish.
pub fn inverse_volume<R: Real>(n: usize, v: R) -> Result<R> {
    if v < R::zero() {
        return Err(Error::Domain(format!("volume {v} < 0")));
    }
    if v == R::zero() {
        return Ok(R::zero());
    }
    let vol = |s: R| hyperbolic_ball_volume(n, s);
    let mut hi = R::one();
    while vol(hi)? < v {
        hi *= R::two();
        if hi > R::cst(1e4) {
            return Err(Error::Domain(format!("volume {v} out of reachable range")));
        }
    }
    let mut lo = R::zero();
    let mut f_lo = -v;
    for _ in 0..60 {
        let mid = (lo + hi) * R::half();
        let f_mid = vol(mid)? - v;
        if f_mid == R::zero() {
            return Ok(mid);
        }
        if (f_mid > R::zero()) == (f_lo > R::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= R::cst(1e-14) * hi.max(R::one()) {
            break;
        }
    }
    // Secant refinement inside the final bracket.
    let mut s0 = lo;
    let mut s1 = hi;
    let mut f0 = vol(s0)? - v;
    let mut f1 = vol(s1)? - v;
    for _ in 0..8 {
        if f1 == f0 {
            break;
        }
        let s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        if !(s2 >= lo && s2 <= hi) {
            break;
        }
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = vol(s1)? - v;
        if f1.abs() <= R::cst(1e-14) * v.max(R::one()) {
            break;
        }
    }
    Ok(s1)
}

/// Isoperimetric profile Υ(v) = v / P²_{S(v)}; for n = 2 this equals
/// 1/(4π + v).
pub fn upsilon<R: Real>(n: usize, v: R) -> Result<R> {
    if v <= R::zero() {
        // Continuous limit v → 0⁺ is 1/(n² ωₙ^{2/n} ... ) only for n = 2;
        // callers use strictly positive volumes, 0 is rejected.
        return Err(Error::Domain(format!("upsilon requires v > 0, got {v}")));
    }
    let s = inverse_volume(n, v)?;
    let p = hyperbolic_ball_perimeter(n, s)?;
    Ok(v / (p * p))
}

/// `Λ(u) = ∫_0^u γ Υ(x) dx`, evaluated through the substitution
/// `x = V(s)`:
///
/// ```text
/// Λ(u) = γ ∫_0^{S(u)} V(s)/P(s) ds ,
/// ```
///
/// whose integrand is smooth and bounded (→ s/n at 0, → 1/(n-1) at ∞),
/// so a single adaptive pass reaches quadrature accuracy without any
/// profile tabulation.
pub fn upsilon_integral(n: usize, gamma: f64, u: f64) -> Result<f64> {
    if u < 0.0 {
        return Err(Error::Domain(format!("upper volume {u} < 0")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let s_max = inverse_volume(n, u)?;
    let surface = sphere_surface::<f64>(n);
    let f = move |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let v = surface * sinh_power_integral(n, s, 1e-12).unwrap_or(f64::NAN);
        let p = surface * s.sinh().powi(n as i32 - 1);
        v / p
    };
    let q = quad::adaptive(&f, 0.0, s_max, 1e-11, 1e-300, 4000)?;
    Ok(gamma * q.value)
}

/// Inverse Θ = Λ⁻¹ of [`upsilon_integral`] in the volume argument.
pub fn upsilon_integral_inverse(n: usize, gamma: f64, lam: f64) -> Result<f64> {
    if lam < 0.0 {
        return Err(Error::Domain(format!("lambda {lam} < 0")));
    }
    if lam == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while upsilon_integral(n, gamma, hi)? < lam {
        hi *= 4.0;
        if hi > 1e30 {
            return Err(Error::Domain(format!("lambda {lam} unreachable")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if upsilon_integral(n, gamma, mid)? < lam {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cached monotone table `s ↦ (V_s, P_s)` with inverse interpolation,
/// for tabulation and repeated Υ lookups.
#[derive(Debug, Clone)]
pub struct IsoperimetricProfile {
    dim: usize,
    s: Vec<f64>,
    ln_v: Vec<f64>,
    p: Vec<f64>,
}

impl IsoperimetricProfile {
    /// Build a table covering volumes up to `v_max` with `points`
    /// log-spaced rows.
    pub fn new(n: usize, v_max: f64, points: usize) -> Result<Self> {
        if points < 8 {
            return Err(Error::Domain("profile needs at least 8 points".into()));
        }
        if !(v_max > 0.0) {
            return Err(Error::Domain(format!(
                "v_max must be positive, got {v_max}"
            )));
        }
        let s_max = inverse_volume(n, v_max)?;
        let s_min = (s_max * 1e-6).min(1e-3);
        let ratio = (s_max / s_min).powf(1.0 / (points - 1) as f64);
        let mut s = Vec::with_capacity(points);
        let mut ln_v = Vec::with_capacity(points);
        let mut p = Vec::with_capacity(points);
        let mut si = s_min;
        for _ in 0..points {
            let v = hyperbolic_ball_volume(n, si)?;
            s.push(si);
            ln_v.push(v.ln());
            p.push(hyperbolic_ball_perimeter(n, si)?);
            si *= ratio;
        }
        for w in ln_v.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain(
                    "volume table is not strictly increasing".into(),
                ));
            }
        }
        for w in p.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain(
                    "perimeter table is not strictly increasing".into(),
                ));
            }
        }
        Ok(IsoperimetricProfile { dim: n, s, ln_v, p })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn v_max(&self) -> f64 {
        self.ln_v.last().unwrap().exp()
    }

    /// Interpolated radius S(v); errors outside the covered range.
    pub fn radius_at(&self, v: f64) -> Result<f64> {
        let lv = v.ln();
        if !(v > 0.0) || lv < self.ln_v[0] || lv > *self.ln_v.last().unwrap() {
            return Err(Error::Domain(format!(
                "volume {v} outside the tabulated range ({:.3e}, {:.3e})",
                self.ln_v[0].exp(),
                self.v_max()
            )));
        }
        let i = match self.ln_v.binary_search_by(|x| x.partial_cmp(&lv).unwrap()) {
            Ok(i) => return Ok(self.s[i]),
            Err(i) => i.clamp(1, self.ln_v.len() - 1),
        };
        let w = (lv - self.ln_v[i - 1]) / (self.ln_v[i] - self.ln_v[i - 1]);
        Ok(self.s[i - 1] + w * (self.s[i] - self.s[i - 1]))
    }

    /// Interpolated Υ(v) = v/P²(S(v)).
    pub fn upsilon_at(&self, v: f64) -> Result<f64> {
        let s = self.radius_at(v)?;
        let p = hyperbolic_ball_perimeter(self.dim, s)?;
        Ok(v / (p * p))
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.s
            .iter()
            .zip(&self.ln_v)
            .zip(&self.p)
            .map(|((s, lv), p)| (*s, lv.exp(), *p))
    }
}

/// Margins of the two ball isoperimetric inequalities at `B_s`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IsoperimetricReport {
    pub n: usize,
    pub s: f64,
    pub volume: f64,
    pub perimeter: f64,
    /// P² - V/Υ(V); zero for balls up to round-off.
    pub equality_margin: f64,
    /// Scale of the equality margin (P²) for relative comparison.
    pub equality_scale: f64,
    /// Pⁿ - nⁿ ωₙ V^{n-1} - (n-1)ⁿ Vⁿ; nonnegative, zero only at n = 2.
    pub power_margin: f64,
    pub power_scale: f64,
}

/// Evaluate both isoperimetric inequalities at the ball of hyperbolic
/// radius `s` and report margins.
pub fn isoperimetric_check(n: usize, s: f64) -> Result<IsoperimetricReport> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {s}")));
    }
    let v = hyperbolic_ball_volume(n, s)?;
    let p = hyperbolic_ball_perimeter(n, s)?;
    let ups = upsilon(n, v)?;
    let equality_margin = p * p - v / ups;
    let omega = unit_ball_volume::<f64>(n);
    let power_margin = p.powi(n as i32)
        - (n as f64).powi(n as i32) * omega * v.powi(n as i32 - 1)
        - ((n - 1) as f64).powi(n as i32) * v.powi(n as i32);
    Ok(IsoperimetricReport {
        n,
        s,
        volume: v,
        perimeter: p,
        equality_margin,
        equality_scale: p * p,
        power_margin,
        power_scale: p.powi(n as i32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Closed-form oracle for ∫_0^s sinh^m t dt by the exact reduction
    // m∫sinh^m = sinh^{m-1} cosh - (m-1)∫sinh^{m-2}; independent of the
    // quadrature route.
    fn sinh_integral_exact(m: i32, s: f64) -> f64 {
        match m {
            0 => s,
            1 => s.cosh() - 1.0,
            _ => {
                (s.sinh().powi(m - 1) * s.cosh() - (m as f64 - 1.0) * sinh_integral_exact(m - 2, s))
                    / m as f64
            }
        }
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume::<f64>(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume::<f64>(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume::<f64>(4) - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn hyperbolic_volume_closed_forms() {
        // n=2: 2π(cosh s - 1); frozen: V(2,1) = 3.4122762652849023.
        let v21 = hyperbolic_ball_volume(2, 1.0).unwrap();
        assert!((v21 - 2.0 * PI * (1f64.cosh() - 1.0)).abs() < 1e-10);
        assert!((v21 - 3.412_276_265_284_902_3).abs() < 1e-10);
        // n=3: π(sinh 2s - 2s); frozen V(3,1) = 5.110932705708289.
        let v31 = hyperbolic_ball_volume(3, 1.0).unwrap();
        assert!((v31 - PI * (2f64.sinh() - 2.0)).abs() < 1e-10);
        assert!((v31 - 5.110_932_705_708_289).abs() < 1e-10);
        // Generic n against the reduction oracle.
        for n in 2..=6 {
            for s in [0.3, 1.0, 2.5] {
                let v = hyperbolic_ball_volume(n, s).unwrap();
                let oracle = sphere_surface::<f64>(n) * sinh_integral_exact(n as i32 - 1, s);
                assert!(
                    (v - oracle).abs() <= 1e-10 * oracle.max(1.0),
                    "n={n} s={s}: {v} vs {oracle}"
                );
            }
        }
        assert_eq!(hyperbolic_ball_volume(5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn perimeter_closed_forms() {
        let p21 = hyperbolic_ball_perimeter(2, 1.0).unwrap();
        assert!((p21 - 2.0 * PI * 1f64.sinh()).abs() < 1e-12);
        assert!((p21 - 7.384_006_872_882_645).abs() < 1e-12);
        let p31 = hyperbolic_ball_perimeter(3, 1.0).unwrap();
        assert!((p31 - 4.0 * PI * 1f64.sinh().powi(2)).abs() < 1e-12);
        assert!((p31 - 17.355_387_381_771_437).abs() < 1e-11);
        assert_eq!(hyperbolic_ball_perimeter(4, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_volume_round_trips() {
        assert_eq!(inverse_volume(3, 0.0).unwrap(), 0.0);
        for n in 2..=4 {
            let v1: f64 = hyperbolic_ball_volume(n, 1.0).unwrap();
            let s = inverse_volume(n, v1).unwrap();
            assert!((s - 1.0).abs() < 1e-10, "n={n}: S(V_1) = {s}");
        }
        // n=2, v = 2π(cosh 2 - 1) → s = 2.
        let v = 2.0 * PI * (2f64.cosh() - 1.0);
        assert!((inverse_volume(2, v).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn upsilon_n2_closed_form() {
        // Υ₂(v) = 1/(4π+v); at v = 4π the value is 1/(8π).
        let u = upsilon(2, 4.0 * PI).unwrap();
        assert!((u - 1.0 / (8.0 * PI)).abs() < 1e-10);
        assert!((u - 0.039_788_735_772_973_834).abs() < 1e-10);
        for v in [1e-3, 0.1, 10.0, 1e3] {
            let u = upsilon(2, v).unwrap();
            assert!(
                (u * (4.0 * PI + v) - 1.0).abs() < 1e-8,
                "v={v}: product {}",
                u * (4.0 * PI + v)
            );
        }
        assert!(upsilon(2, 0.0).is_err());
    }

    #[test]
    fn upsilon_n3_value() {
        // v = π(sinh 2 - 2), s = 1: Υ = v/(4π sinh²1)²; frozen 0.016968034523724507.
        let v = PI * (2f64.sinh() - 2.0);
        let u = upsilon(3, v).unwrap();
        assert!((u - 0.016_968_034_523_724_507).abs() < 1e-10, "got {u}");
    }

    #[test]
    fn upsilon_integral_n2_closed_form() {
        // Λ(u) = γ ln(1 + u/4π) for n = 2.
        for &(gamma, u) in &[(1.0, 0.5), (3.0, 7.3), (2.0, 150.0)] {
            let lam = upsilon_integral(2, gamma, u).unwrap();
            let exact = gamma * (1.0 + u / (4.0 * PI)).ln();
            assert!(
                (lam - exact).abs() < 1e-9 * exact.max(1.0),
                "{lam} vs {exact}"
            );
            let back = upsilon_integral_inverse(2, gamma, lam).unwrap();
            assert!((back - u).abs() < 1e-8 * u.max(1.0), "theta {back} vs {u}");
        }
        assert_eq!(upsilon_integral(3, 2.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn mobius_defining_properties() {
        let a = BallPoint::new(vec![0.3, -0.2, 0.4]).unwrap();
        let m = MobiusMap::new(a.clone());
        let img = m.apply(&BallPoint::<f64>::origin(3));
        for (u, v) in img.coords().iter().zip(a.coords()) {
            assert!((u - v).abs() < 1e-15);
        }
        let zero = m.apply(&a);
        assert!(zero.norm() < 1e-14_f64);
        // [0, a] = 1
        assert!((m.bracket_sq(&[0.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mobius_involution_and_modulus_identity() {
        let a = BallPoint::new(vec![0.5, 0.1]).unwrap();
        let m = MobiusMap::new(a.clone());
        for p in [[0.2, -0.7], [0.0, 0.9], [-0.4, 0.35]] {
            let x = BallPoint::new(p.to_vec()).unwrap();
            let y = m.apply(&x);
            // |φ(x)| = |x-a|/[x,a]
            let diff: f64 = p
                .iter()
                .zip(a.coords())
                .map(|(xi, ai)| (xi - ai) * (xi - ai))
                .sum();
            assert!((y.norm() - (diff / m.bracket_sq(&p)).sqrt()).abs() < 1e-12);
            // 1-|φ(x)|² via the bracket identity.
            assert!((m.image_norm_sq_complement(&p) - (1.0 - y.norm_sq())).abs() < 1e-12);
            // Involution.
            let back = m.apply(&y);
            for (u, v) in back.coords().iter().zip(&p) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mobius_identity_map() {
        let m = MobiusMap::<f64>::identity(3);
        let x = BallPoint::new(vec![0.1, 0.2, -0.3]).unwrap();
        assert_eq!(m.apply(&x).coords(), x.coords());
        assert_eq!(m.jacobian(&x), 1.0);
    }

    #[test]
    fn mobius_jacobian_formula() {
        let a = BallPoint::new(vec![0.4, 0.0, 0.1]).unwrap();
        let m = MobiusMap::new(a.clone());
        // At the origin: J = (1-|a|²)ⁿ / [0,a]^{2n} = (1-|a|²)ⁿ.
        let j0: f64 = m.jacobian(&BallPoint::origin(3));
        assert!((j0 - (1.0 - a.norm_sq()).powi(3)).abs() < 1e-14);
        // Against the defining ratio at a generic point.
        let x = BallPoint::new(vec![-0.2, 0.5, 0.3]).unwrap();
        let y = m.apply(&x);
        let ratio = ((1.0 - y.norm_sq()) / (1.0 - x.norm_sq())).powi(3);
        assert!((m.jacobian(&x) - ratio).abs() < 1e-12);
    }

    #[test]
    fn mobius_jacobian_matches_finite_difference_determinant() {
        let a = BallPoint::new(vec![0.3, -0.25]).unwrap();
        let m = MobiusMap::new(a);
        let x = [0.2, 0.4];
        let h = 1e-6;
        let mut jac = [[0.0f64; 2]; 2];
        for j in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fp = m.apply_coords(&xp);
            let fm = m.apply_coords(&xm);
            for i in 0..2 {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let det = (jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]).abs();
        let formula = m.jacobian(&BallPoint::new(x.to_vec()).unwrap());
        assert!(
            (det - formula).abs() < 1e-7 * formula,
            "fd det {det} vs formula {formula}"
        );
    }

    #[test]
    fn isoperimetric_margins() {
        // n=2 equality of both inequalities on balls.
        for s in [0.5, 1.0, 2.0] {
            let r = isoperimetric_check(2, s).unwrap();
            assert!(r.equality_margin.abs() <= 1e-8 * r.equality_scale);
            assert!(r.power_margin.abs() <= 1e-8 * r.power_scale);
        }
        // n=3, s=1: frozen margin 1205.2726770261180 of the power form.
        let r = isoperimetric_check(3, 1.0).unwrap();
        assert!(r.power_margin > 0.0);
        assert!((r.power_margin - 1_205.272_677_026_118).abs() < 1e-5);
        assert!(r.equality_margin.abs() <= 1e-8 * r.equality_scale);
        assert!(isoperimetric_check(3, 0.0).is_err());
    }

    #[test]
    fn profile_table_interpolates_upsilon() {
        let prof = IsoperimetricProfile::new(3, 1e4, 2048).unwrap();
        for v in [0.01, 1.0, 55.0, 9000.0] {
            let exact = upsilon(3, v).unwrap();
            let interp = prof.upsilon_at(v).unwrap();
            assert!(
                ((interp - exact) / exact).abs() < 1e-4,
                "v={v}: {interp} vs {exact}"
            );
        }
        assert!(prof.upsilon_at(1e9).is_err());
    }

    #[test]
    fn ball_point_validation() {
        assert!(BallPoint::new(vec![0.8, 0.7]).is_err());
        assert!(BallPoint::new(vec![1.0, 0.0]).is_err());
        assert!(BallPoint::new(vec![0.9]).is_err());
        let p = BallPoint::new(vec![0.6, 0.0, 0.0]).unwrap();
        assert_eq!(p.norm_sq(), 0.36);
    }
}
