//! One-dimensional adaptive quadrature and sphere integration grids.
//!
//! The 1D engine is a 15-point Gauss–Kronrod rule with global-error
//! adaptive bisection. Sphere integration uses the trapezoid rule on the
//! circle (spectrally accurate), a Gauss–Legendre × trapezoid product
//! grid on 𝕊², and seeded Monte Carlo for n ≥ 4; all grids integrate
//! against the normalized surface measure σ.

use crate::error::{Error, Result};
use crate::scalar::Real;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// 15-point Gauss-Kronrod abscissae/weights (positive half, QUADPACK).
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WG15: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Value with an attached absolute-error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadValue<R> {
    pub value: R,
    pub error: R,
}

fn rescale_error<R: Real>(err: R, res_abs: R, res_asc: R) -> R {
    let mut scaled = err.abs();
    if res_asc != R::zero() && scaled != R::zero() {
        let scale = (R::cst(200.0) * scaled / res_asc).powf(R::cst(1.5));
        scaled = if scale < R::one() {
            res_asc * scale
        } else {
            res_asc
        };
    }
    let tiny = R::min_positive_value() / (R::cst(50.0) * R::epsilon());
    if res_abs > tiny {
        let min_err = R::cst(50.0) * R::epsilon() * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// Single 15-point Gauss-Kronrod panel on `[a, b]`.
pub fn gauss_kronrod_15<R: Real, F: Fn(R) -> R>(f: &F, a: R, b: R) -> QuadValue<R> {
    let center = (a + b) * R::half();
    let half = (b - a) * R::half();
    let fc = f(center);

    let mut f_minus = [R::zero(); 8];
    let mut f_plus = [R::zero(); 8];
    f_minus[7] = fc;
    f_plus[7] = fc;
    for j in 0..7 {
        let dx = half * R::cst(XGK15[j]);
        f_minus[j] = f(center - dx);
        f_plus[j] = f(center + dx);
    }

    let mut res_gauss = R::zero();
    for (j, wg) in WG15.iter().enumerate() {
        let jtw = 2 * j + 1;
        let pair = if jtw == 7 {
            fc
        } else {
            f_minus[jtw] + f_plus[jtw]
        };
        res_gauss += R::cst(*wg) * pair;
    }

    let mut res_kronrod = fc * R::cst(WGK15[7]);
    let mut res_abs = res_kronrod.abs();
    for j in 0..7 {
        res_kronrod += R::cst(WGK15[j]) * (f_minus[j] + f_plus[j]);
        res_abs += R::cst(WGK15[j]) * (f_minus[j].abs() + f_plus[j].abs());
    }

    let mean = res_kronrod * R::half();
    let mut res_asc = R::cst(WGK15[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc += R::cst(WGK15[j]) * ((f_minus[j] - mean).abs() + (f_plus[j] - mean).abs());
    }

    let err = ((res_kronrod - res_gauss) * half).abs();
    QuadValue {
        value: res_kronrod * half,
        error: rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<R> {
    a: R,
    b: R,
    value: R,
    error: R,
}

/// Globally adaptive Gauss-Kronrod integration on `[a, b]`.
///
/// Splits the worst panel until the summed error estimate meets
/// `max(abs_tol, rel_tol * |integral|)` or `max_panels` is reached.
pub fn adaptive<R: Real, F: Fn(R) -> R>(
    f: &F,
    a: R,
    b: R,
    rel_tol: R,
    abs_tol: R,
    max_panels: usize,
) -> Result<QuadValue<R>> {
    if a == b {
        return Ok(QuadValue {
            value: R::zero(),
            error: R::zero(),
        });
    }
    let mut panels: Vec<Panel<R>> = Vec::with_capacity(64);
    let first = gauss_kronrod_15(f, a, b);
    panels.push(Panel {
        a,
        b,
        value: first.value,
        error: first.error,
    });

    loop {
        let mut total = R::zero();
        let mut err = R::zero();
        let mut worst = 0usize;
        let mut worst_err = R::neg_infinity();
        for (i, p) in panels.iter().enumerate() {
            total += p.value;
            err += p.error;
            if p.error > worst_err {
                worst_err = p.error;
                worst = i;
            }
        }
        let target = abs_tol.max(rel_tol * total.abs());
        if err <= target {
            return Ok(QuadValue {
                value: total,
                error: err,
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::Quadrature(format!(
                "adaptive integration stalled: {} panels, error {err} > target {target}",
                panels.len()
            )));
        }
        let p = panels[worst];
        let mid = (p.a + p.b) * R::half();
        if mid <= p.a || mid >= p.b {
            // Panel is at floating-point resolution; accept what we have.
            return Ok(QuadValue {
                value: total,
                error: err,
            });
        }
        let left = gauss_kronrod_15(f, p.a, mid);
        let right = gauss_kronrod_15(f, mid, p.b);
        panels[worst] = Panel {
            a: p.a,
            b: mid,
            value: left.value,
            error: left.error,
        };
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: right.value,
            error: right.error,
        });
    }
}

/// `∫_0^1 g(u) (1-u)^{beta-1} du` for `beta > 0`.
///
/// For `beta < 1` the endpoint is algebraically singular; the
/// substitution `w = (1-u)^beta` removes it exactly, so the rule stays
/// accurate even for the near-divergent exponents that show up as the
/// Bergman parameter α approaches 1.
pub fn weighted_unit_integral<F: Fn(f64) -> f64>(
    g: &F,
    beta: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadValue<f64>> {
    if beta <= 0.0 {
        return Err(Error::Divergent(format!(
            "endpoint exponent beta = {beta} <= 0: integral diverges"
        )));
    }
    if beta >= 1.0 {
        let f = |u: f64| g(u) * (1.0 - u).powf(beta - 1.0);
        adaptive(&f, 0.0, 1.0, rel_tol, 0.0, max_panels)
    } else {
        let inv_beta = 1.0 / beta;
        let f = |w: f64| {
            let u = if w <= 0.0 {
                1.0
            } else {
                1.0 - w.powf(inv_beta)
            };
            g(u.clamp(0.0, 1.0)) * inv_beta
        };
        adaptive(&f, 0.0, 1.0, rel_tol, 0.0, max_panels)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on Pₘ).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Mean of `f` over the unit circle by the `m`-point trapezoid rule.
pub fn circle_mean<F: Fn(f64) -> f64>(f: &F, m: usize) -> f64 {
    let mut acc = 0.0;
    for j in 0..m {
        acc += f(2.0 * std::f64::consts::PI * j as f64 / m as f64);
    }
    acc / m as f64
}

/// Quadrature grid on the unit sphere 𝕊^{n-1}, normalized to total mass 1.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// True when the grid is Monte Carlo and means carry statistical error.
    pub stochastic: bool,
}

impl SphereGrid {
    /// Uniform circle grid for n = 2 (trapezoid rule).
    pub fn circle(m: usize) -> Self {
        let mut points = Vec::with_capacity(m);
        for j in 0..m {
            let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            points.push(vec![th.cos(), th.sin()]);
        }
        SphereGrid {
            dim: 2,
            points,
            weights: vec![1.0 / m as f64; m],
            stochastic: false,
        }
    }

    /// Gauss-Legendre (polar) × trapezoid (azimuth) product grid on 𝕊².
    pub fn product_gauss(n_polar: usize, n_azimuth: usize) -> Self {
        let (mu, w) = gauss_legendre(n_polar);
        let mut points = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        for (c, wp) in mu.iter().zip(&w) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for j in 0..n_azimuth {
                let th = 2.0 * std::f64::consts::PI * j as f64 / n_azimuth as f64;
                points.push(vec![s * th.cos(), s * th.sin(), *c]);
                // GL weights sum to 2 = full mu-range; divide by 2 for sigma.
                weights.push(wp / (2.0 * n_azimuth as f64));
            }
        }
        SphereGrid {
            dim: 3,
            points,
            weights,
            stochastic: false,
        }
    }

    /// Seeded quasi-uniform Monte Carlo grid for n ≥ 4.
    pub fn monte_carlo(dim: usize, samples: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(samples);
        while points.len() < samples {
            let mut v = vec![0.0; dim];
            let mut norm_sq = 0.0;
            for x in v.iter_mut() {
                // Box-Muller pairs drawn one at a time.
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen::<f64>();
                *x = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                norm_sq += *x * *x;
            }
            if norm_sq > 1e-12 {
                let norm = norm_sq.sqrt();
                v.iter_mut().for_each(|x| *x /= norm);
                points.push(v);
            }
        }
        SphereGrid {
            dim,
            points,
            weights: vec![1.0 / samples as f64; samples],
            stochastic: true,
        }
    }

    /// Default grid for dimension `n`, scaled by `level` (1 = default;
    /// 2 doubles the resolution, used for error estimation by comparison).
    pub fn standard(n: usize, level: usize) -> Self {
        let l = level.max(1);
        match n {
            2 => SphereGrid::circle(256 * l),
            3 => SphereGrid::product_gauss(24 * l, 48 * l),
            _ => SphereGrid::monte_carlo(n, 4096 * l * l, 0x5EED ^ (n as u64)),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Mean of `f` against the normalized surface measure.
    pub fn mean<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }

    /// Mean together with a standard-error estimate (zero for
    /// deterministic grids; sample standard error for Monte Carlo).
    pub fn mean_with_err<F: Fn(&[f64]) -> f64>(&self, f: F) -> QuadValue<f64> {
        if !self.stochastic {
            return QuadValue {
                value: self.mean(f),
                error: 0.0,
            };
        }
        let vals: Vec<f64> = self.points.iter().map(|p| f(p)).collect();
        let m = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / m;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
        QuadValue {
            value: mean,
            error: (var / m).sqrt(),
        }
    }
}
