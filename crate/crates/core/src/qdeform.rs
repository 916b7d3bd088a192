//! q-deformed hyperbolic functions, the q-deformed Pöschl-Teller well and the
//! position-dependent mass that accompanies it.
//!
//! The deformed functions reduce to the ordinary hyperbolic ones at `q = 1`:
//!
//! ```text
//! sinh_q(z) = (e^z - q e^-z) / 2        cosh_q(z) = (e^z + q e^-z) / 2
//! tanh_q(z) = sinh_q / cosh_q           sech_q(z) = 2 / (e^z + q e^-z)
//! ```
//!
//! Physical quantities are evaluated through the rational form in
//! `s = exp(-2 alpha x)`, which never overflows on the half-line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deformation `q`, inverse range `alpha` and depth `v0` of the well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformedParams {
    pub q: f64,
    pub alpha: f64,
    pub v0: f64,
}

impl DeformedParams {
    pub fn new(q: f64, alpha: f64, v0: f64) -> Result<Self> {
        let p = DeformedParams { q, alpha, v0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        validate_q(self.q)?;
        validate_alpha(self.alpha)?;
        if !self.v0.is_finite() {
            return Err(Error::invalid("v0", format!("must be finite, got {}", self.v0)));
        }
        Ok(())
    }
}

/// Rest mass together with the well that shifts it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassParams {
    pub m0: f64,
    pub deformed: DeformedParams,
}

impl MassParams {
    pub fn new(m0: f64, deformed: DeformedParams) -> Result<Self> {
        if !(m0.is_finite() && m0 > 0.0) {
            return Err(Error::invalid("m0", format!("rest mass must be positive, got {m0}")));
        }
        deformed.validate()?;
        Ok(MassParams { m0, deformed })
    }
}

pub(crate) fn validate_q(q: f64) -> Result<()> {
    if !q.is_finite() {
        return Err(Error::invalid("q", format!("must be finite, got {q}")));
    }
    if q == 0.0 {
        return Err(Error::invalid(
            "q",
            "q = 0 is not allowed: the quantization condition divides by q (term 2 V0 (E - m0) / (q alpha^2))",
        ));
    }
    if !(q > -1.0 && q <= 1.0) {
        return Err(Error::invalid(
            "q",
            format!("physical solutions require -1 < q <= 1, got {q}"),
        ));
    }
    Ok(())
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(
            "alpha",
            format!("range parameter must be positive, got {alpha}"),
        ));
    }
    Ok(())
}

pub fn sinh_q(z: f64, q: f64) -> f64 {
    0.5 * (z.exp() - q * (-z).exp())
}

pub fn cosh_q(z: f64, q: f64) -> f64 {
    0.5 * (z.exp() + q * (-z).exp())
}

pub fn tanh_q(z: f64, q: f64) -> Result<f64> {
    let c = cosh_q(z, q);
    if c == 0.0 {
        return Err(Error::Singular { z, q });
    }
    Ok(sinh_q(z, q) / c)
}

pub fn sech_q(z: f64, q: f64) -> Result<f64> {
    let d = z.exp() + q * (-z).exp();
    if d == 0.0 {
        return Err(Error::Singular { z, q });
    }
    Ok(2.0 / d)
}

/// `sech_q^2(alpha x) = 4 e^{-2 alpha x} / (1 + q e^{-2 alpha x})^2`, valid on the
/// whole real line. For `x < 0` the equivalent form `4 t / (t + q)^2` with
/// `t = e^{2 alpha x}` is used so that nothing overflows.
pub fn well_shape(x: f64, alpha: f64, q: f64) -> Result<f64> {
    let (num, den) = if x >= 0.0 {
        let s = (-2.0 * alpha * x).exp();
        (s, 1.0 + q * s)
    } else {
        let t = (2.0 * alpha * x).exp();
        (t, t + q)
    };
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Singular { z: alpha * x, q });
    }
    Ok(4.0 * num / (den * den))
}

/// The rational profile `s / (1 + q s)^2` in the compact coordinate.
pub fn shape_in_s(s: f64, q: f64) -> f64 {
    let d = 1.0 + q * s;
    s / (d * d)
}

fn require_half_line(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::Coordinate {
            value: x,
            domain: "[0, inf)",
        });
    }
    Ok(())
}

/// `V(x) = -V0 / cosh_q^2(alpha x)` on `x >= 0`.
pub fn potential(x: f64, p: &DeformedParams) -> Result<f64> {
    require_half_line(x)?;
    Ok(-p.v0 * well_shape(x, p.alpha, p.q)?)
}

/// Same potential evaluated literally through `sech_q`. Overflows for large
/// `alpha x`; kept for identity checks.
pub fn potential_sech_form(x: f64, p: &DeformedParams) -> Result<f64> {
    require_half_line(x)?;
    let h = sech_q(p.alpha * x, p.q)?;
    Ok(-p.v0 * h * h)
}

/// `m(x) = m0 + 4 V0 e^{-2 alpha x} / (1 + q e^{-2 alpha x})^2` on `x >= 0`.
pub fn mass(x: f64, mp: &MassParams) -> Result<f64> {
    require_half_line(x)?;
    let d = &mp.deformed;
    Ok(mp.m0 + d.v0 * well_shape(x, d.alpha, d.q)?)
}

/// Fails if `1 + q e^{-2 alpha x}` vanishes (or nearly so) at any grid node.
pub fn check_grid_nonsingular(p: &DeformedParams, xs: &[f64]) -> Result<()> {
    for &x in xs {
        let s = (-2.0 * p.alpha * x).exp();
        let den = 1.0 + p.q * s;
        if den.abs() < 1e-12 {
            return Err(Error::Singular { z: p.alpha * x, q: p.q });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn sinh_cosh_values() {
        assert_eq!(sinh_q(0.0, 1.0), 0.0);
        assert_relative_eq!(sinh_q(1.0, 1.0), 1.0_f64.sinh(), max_relative = 1e-15);
        let direct = (0.5_f64.exp() - 0.5 * (-0.5_f64).exp()) / 2.0;
        assert_relative_eq!(sinh_q(0.5, 0.5), direct, max_relative = 1e-15);
        assert!((sinh_q(0.5, 0.5) - 0.6727).abs() < 1e-4);
        assert_eq!(cosh_q(0.0, 1.0), 1.0);
        for q in [-0.9, -0.2, 0.3, 1.0] {
            assert_relative_eq!(cosh_q(0.0, q), (1.0 + q) / 2.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn tanh_sech_values() {
        assert_eq!(tanh_q(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(sech_q(0.0, 1.0).unwrap(), 1.0);
        let expect = 2.0 / (1.0_f64.exp() + 0.5 / 1.0_f64.exp());
        assert_relative_eq!(sech_q(1.0, 0.5).unwrap(), expect, max_relative = 1e-15);
        assert!((sech_q(1.0, 0.5).unwrap() - 0.6891).abs() < 1e-4);
        for z in [-3.0, 0.1, 2.5] {
            let prod = sech_q(z, 0.7).unwrap() * cosh_q(z, 0.7);
            assert_relative_eq!(prod, 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn singular_where_cosh_q_vanishes() {
        // e^{2z} = -q holds exactly at z = 0, q = -1
        assert!(matches!(sech_q(0.0, -1.0), Err(Error::Singular { .. })));
        assert!(matches!(tanh_q(0.0, -1.0), Err(Error::Singular { .. })));
        assert!(matches!(well_shape(0.0, 1.0, -1.0), Err(Error::Singular { .. })));
    }

    #[test]
    fn potential_examples() {
        let p = DeformedParams::new(1.0, 1.0, 5.0).unwrap();
        assert_relative_eq!(potential(0.0, &p).unwrap(), -5.0, max_relative = 1e-15);
        assert!(potential(200.0, &p).unwrap().abs() < 1e-150);

        let p = DeformedParams::new(0.5, 1.0, 1.0).unwrap();
        let rational = potential(0.0, &p).unwrap();
        let sech = potential_sech_form(0.0, &p).unwrap();
        assert_relative_eq!(rational, -4.0 / 2.25, max_relative = 1e-15);
        assert_relative_eq!(rational, sech, max_relative = 1e-15);
        assert!((rational + 1.7778).abs() < 1e-4);
    }

    #[test]
    fn mass_examples() {
        let d = DeformedParams::new(1.0, 1.0, 2.0).unwrap();
        let mp = MassParams::new(1.0, d).unwrap();
        // literal evaluation: m0 + 4 V0 / (1 + q)^2 = 1 + 8/4
        assert_relative_eq!(mass(0.0, &mp).unwrap(), 3.0, max_relative = 1e-15);
        assert_relative_eq!(mass(40.0, &mp).unwrap(), 1.0, max_relative = 1e-15);

        let flat = MassParams::new(1.3, DeformedParams::new(0.4, 2.0, 0.0).unwrap()).unwrap();
        for x in [0.0, 0.1, 1.0, 10.0] {
            assert_eq!(mass(x, &flat).unwrap(), 1.3);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let err = DeformedParams::new(0.0, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("divides by q"));
        assert!(DeformedParams::new(1.0, 0.0, 1.0).is_err());
        assert!(DeformedParams::new(1.0, -2.0, 1.0).is_err());
        assert!(DeformedParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(DeformedParams::new(1.5, 1.0, 1.0).is_err());
        // negative depth is a legal evaluation
        assert!(DeformedParams::new(0.5, 1.0, -3.0).is_ok());
        assert!(MassParams::new(0.0, DeformedParams::new(1.0, 1.0, 1.0).unwrap()).is_err());
        assert!(potential(-1.0, &DeformedParams::new(1.0, 1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn negative_q_is_regular_on_half_line() {
        let p = DeformedParams::new(-0.95, 0.7, 1.0).unwrap();
        let xs: Vec<f64> = (0..2000).map(|i| i as f64 * 0.01).collect();
        check_grid_nonsingular(&p, &xs).unwrap();
        for &x in &xs {
            assert!(potential(x, &p).unwrap().is_finite());
        }
    }

    proptest! {
        #[test]
        fn pythagorean_identity(z in -10.0..10.0_f64, q in -0.999..1.0_f64) {
            prop_assume!(q.abs() > 1e-6);
            let c = cosh_q(z, q);
            let s = sinh_q(z, q);
            let scale = (c * c).abs().max(1.0);
            prop_assert!(((c * c - s * s) - q).abs() <= 1e-12 * scale);
        }

        #[test]
        fn q_one_is_standard(z in -10.0..10.0_f64) {
            prop_assert!((sinh_q(z, 1.0) - z.sinh()).abs() <= 1e-14 * z.sinh().abs().max(1.0));
            prop_assert!((cosh_q(z, 1.0) - z.cosh()).abs() <= 1e-14 * z.cosh());
            prop_assert!((tanh_q(z, 1.0).unwrap() - z.tanh()).abs() <= 1e-14);
            prop_assert!((sech_q(z, 1.0).unwrap() - 1.0 / z.cosh()).abs() <= 1e-14);
        }

        #[test]
        fn rational_and_sech_forms_agree(x in 0.0..15.0_f64, q in -0.99..1.0_f64, alpha in 0.1..2.0_f64) {
            prop_assume!(q.abs() > 1e-6);
            let p = DeformedParams::new(q, alpha, 1.7).unwrap();
            let a = potential(x, &p).unwrap();
            let b = potential_sech_form(x, &p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }

        #[test]
        fn mass_bounded_and_decreasing(x in 0.0..20.0_f64, dx in 1e-3..1.0_f64, q in 0.01..1.0_f64, v0 in 0.0..10.0_f64) {
            let mp = MassParams::new(1.0, DeformedParams::new(q, 1.0, v0).unwrap()).unwrap();
            let m = mass(x, &mp).unwrap();
            let upper = 1.0 + 4.0 * v0 / ((1.0 + q) * (1.0 + q));
            prop_assert!(m >= 1.0 && m <= upper * (1.0 + 1e-15));
            prop_assert!(mass(x + dx, &mp).unwrap() <= m);
        }
    }
}
