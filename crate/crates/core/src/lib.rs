//! Hyperbolic-harmonic function spaces on the unit ball of ℝⁿ.
//!
//! This crate computes, at desk scale, the machinery of log-subharmonic
//! function theory for the hyperbolic Laplacian
//!
//! ```text
//! Δ_h u = (1-|x|²)² Δu + 2(n-2)(1-|x|²) Σ xᵢ ∂ᵢu
//! ```
//!
//! and verifies the inequality chain it supports:
//!
//! * [`specfun`] — hypergeometric series `F`, the Gauss function ₂F₁,
//!   gamma/beta/Pochhammer support with controlled truncation error.
//! * [`ballgeo`] — hyperbolic volumes and perimeters, the isoperimetric
//!   profile Υ(v) = v/P²(S(v)), Möbius maps of the ball and their Jacobian.
//! * [`weightfn`] — the radial weight Φₙ solving Δ_h log Φₙ = -4(n-1)²,
//!   its family u_b, the boundary constant Eₙ, the Bergman normalization
//!   c(α), and an independent ODE oracle for the closed forms.
//! * [`fieldlab`] — test fields built from the admissible monoid
//!   (exponentials of hyperbolic-harmonic functions, products, powers,
//!   positive combinations, Möbius pullbacks), the Poisson kernel and
//!   extension, and a finite-difference log-subharmonicity certificate.
//! * [`normlab`] — Hardy and weighted Bergman norms, superlevel-set
//!   measures μ(t), and the monotone quantity g(t) = t·exp ∫₀^{μ(t)} γΥ.
//! * [`planar2d`] — the n = 2 corollaries for harmonic mappings a + b̄:
//!   coefficient inequalities, the sharp constant C_p, and the
//!   isoperimetric-type inequality on the disk.
//! * [`verify`] — theorem-level suites producing structured verdicts:
//!   embedding contraction, level-set monotonicity, the weak-type bound,
//!   the rearrangement lemma oracle, and the α → 1⁺ limit checks.
//!
//! Scalar-generic numerics (series, quadrature, closed-form geometry) are
//! parameterized over [`scalar::Real`]; the sampling and reporting layers
//! are `f64`. Concrete aliases for the generic types live at the crate
//! root.

// NaN-rejecting guards are written as negated comparisons on purpose;
// rule tables carry their published full-precision digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod ballgeo;
pub mod error;
pub mod fieldlab;
pub mod normlab;
pub mod planar2d;
pub mod quad;
pub mod report;
pub mod scalar;
pub mod specfun;
pub mod verify;
pub mod weightfn;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` hypergeometric parameter block.
pub type HypergeometricSpec = specfun::HypergeometricSpec<f64>;
/// `f64` point of the open unit ball.
pub type BallPoint = ballgeo::BallPoint<f64>;
/// `f64` point of the unit sphere.
pub type SpherePoint = ballgeo::SpherePoint<f64>;
/// `f64` Möbius involution of the ball.
pub type MobiusMap = ballgeo::MobiusMap<f64>;
/// `f64` radial weight specification.
pub type WeightSpec = weightfn::WeightSpec<f64>;
