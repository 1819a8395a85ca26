//! Named test-field presets used by the verification suites and the CLI.
//!
//! The shipped families: constants, exponentials of Poisson extensions
//! of low-degree boundary data, positive combinations and products of
//! those, a fractional power, planar moduli for n = 2, and Möbius
//! pullbacks (built with the suite's α/p via [`pullback_unit`] or
//! [`super::mobius_pullback`]).

use super::{BoundaryData, FieldNode, TestField};
use crate::error::{Error, Result};
use num_complex::Complex64;

const NAMES: &[&str] = &[
    "unit",
    "const:2",
    "expharm",
    "expharm2",
    "poscomb",
    "product",
    "power",
    "planar-abs-z",
    "planar-one-plus-z",
    "planar-mixed",
];

/// All fixed preset names (`const:<v>` and `pullback:<r>` accept other
/// parameter values too).
pub fn preset_names() -> &'static [&'static str] {
    NAMES
}

fn data_a(n: usize) -> BoundaryData {
    let mut linear = vec![0.25, 0.0, 0.0, 0.0, 0.0];
    linear.truncate(n);
    BoundaryData::new(0.5, linear).expect("valid preset data")
}

fn data_b(n: usize) -> BoundaryData {
    let mut linear = vec![0.3, -0.2, 0.1, 0.05, -0.1];
    linear.truncate(n);
    BoundaryData::new(-0.2, linear).expect("valid preset data")
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Build a preset field by name for dimension `n`.
pub fn preset(name: &str, n: usize) -> Result<TestField> {
    if let Some(v) = name.strip_prefix("const:") {
        let c: f64 = v
            .parse()
            .map_err(|_| Error::Parse(format!("invalid constant preset '{name}'")))?;
        return TestField::new(n, FieldNode::Constant(c));
    }
    if let Some(r) = name.strip_prefix("pullback:") {
        let radius: f64 = r
            .parse()
            .map_err(|_| Error::Parse(format!("invalid pullback preset '{name}'")))?;
        return pullback_unit(n, radius, 1.0, 1.0);
    }
    let node = match name {
        "unit" => FieldNode::Constant(1.0),
        "expharm" => FieldNode::ExpHarmonic(data_a(n)),
        "expharm2" => FieldNode::ExpHarmonic(data_b(n)),
        "poscomb" => FieldNode::PositiveCombination(vec![
            (0.6, FieldNode::ExpHarmonic(data_a(n))),
            (0.4, FieldNode::ExpHarmonic(data_b(n))),
        ]),
        "product" => FieldNode::Product(vec![
            FieldNode::ExpHarmonic(data_a(n)),
            FieldNode::ExpHarmonic(data_b(n)),
        ]),
        "power" => FieldNode::Power {
            base: Box::new(FieldNode::ExpHarmonic(data_a(n))),
            exponent: 1.5,
        },
        "planar-abs-z" => FieldNode::PlanarModulus {
            a: vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            b: vec![],
        },
        "planar-one-plus-z" => FieldNode::PlanarModulus {
            a: vec![c64(1.0, 0.0), c64(1.0, 0.0)],
            b: vec![],
        },
        "planar-mixed" => FieldNode::PlanarModulus {
            a: vec![c64(1.0, 0.0), c64(0.5, 0.2), c64(0.0, 0.25)],
            b: vec![c64(0.0, 0.0), c64(0.3, -0.1)],
        },
        other => {
            return Err(Error::Parse(format!(
                "unknown preset '{other}' (known: {})",
                NAMES.join(", ")
            )))
        }
    };
    TestField::new(n, node)
}

/// The extremal family: Möbius pullback of the unit field at center
/// `radius·e₁` with weight exponent α/p.
pub fn pullback_unit(n: usize, radius: f64, alpha: f64, p: f64) -> Result<TestField> {
    if !(0.0..1.0).contains(&radius) {
        return Err(Error::Field(format!(
            "pullback radius {radius} outside [0, 1)"
        )));
    }
    let mut center = vec![0.0; n];
    center[0] = radius;
    let unit = TestField::new(n, FieldNode::Constant(1.0))?;
    super::mobius_pullback(&unit, center, alpha, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build_and_evaluate() {
        for name in preset_names() {
            for n in [2usize, 3, 4] {
                let result = preset(name, n);
                if name.starts_with("planar") && n != 2 {
                    assert!(result.is_err(), "{name} should require n = 2");
                    continue;
                }
                let field = result.unwrap_or_else(|e| panic!("{name} n={n}: {e}"));
                let x = vec![0.1; n];
                assert!(field.eval(&x).is_finite(), "{name} n={n}");
                assert!(field.is_bounded());
            }
        }
    }

    #[test]
    fn parameterized_presets() {
        let c = preset("const:2", 3).unwrap();
        assert!((c.eval(&[0.0, 0.0, 0.0]) - 2.0).abs() < 1e-15);
        let p = preset("pullback:0.4", 2).unwrap();
        assert!(p.eval(&[0.1, 0.1]).is_finite());
        assert!(preset("pullback:1.5", 2).is_err());
        assert!(preset("nope", 2).is_err());
    }

    #[test]
    fn unit_is_radial_expharm_is_not() {
        assert!(preset("unit", 3).unwrap().is_radial());
        assert!(!preset("expharm", 3).unwrap().is_radial());
        assert!(preset("planar-abs-z", 2).unwrap().is_radial());
        assert!(!preset("planar-mixed", 2).unwrap().is_radial());
    }
}
