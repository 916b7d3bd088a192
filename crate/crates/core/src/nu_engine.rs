//! Parametric Nikiforov-Uvarov machinery.
//!
//! A second-order equation of hypergeometric type
//!
//! ```text
//! psi'' + (a1 - a2 s) / (s (1 - a3 s)) psi'
//!       + (-xi1 s^2 + xi2 s - xi3) / (s (1 - a3 s))^2 psi = 0
//! ```
//!
//! is encoded by six template coefficients. Everything else (the derived
//! constants `a4..a13`, the polynomials `pi` and `tau`, the constants `k`,
//! `lambda`, `lambda_n`, the quantization condition and the exponents of the
//! wavefunction factors) follows in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radicands in `[-RADICAND_CLAMP, 0)` are treated as zero.
pub const RADICAND_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardForm {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
}

impl StandardForm {
    /// Coefficient of `psi'` at `s`.
    pub fn first_order_coefficient(&self, s: f64) -> f64 {
        (self.a1 - self.a2 * s) / (s * (1.0 - self.a3 * s))
    }

    /// Coefficient of `psi` at `s`.
    pub fn zeroth_order_coefficient(&self, s: f64) -> f64 {
        let sigma = s * (1.0 - self.a3 * s);
        (-self.xi1 * s * s + self.xi2 * s - self.xi3) / (sigma * sigma)
    }
}

/// The derived constants `a4..a13`, with the two square roots they depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub a7: f64,
    pub a8: f64,
    pub a9: f64,
    pub a10: f64,
    pub a11: f64,
    pub a12: f64,
    pub a13: f64,
    /// `sqrt(a8)` after clamping.
    pub root8: f64,
    /// `sqrt(a9)` after clamping.
    pub root9: f64,
}

impl DerivedParams {
    /// `sqrt(a9) + a3 sqrt(a8)`, the slope of the bracket in `pi(s)`.
    fn bracket_slope(&self, sf: &StandardForm) -> f64 {
        self.root9 + sf.a3 * self.root8
    }
}

fn clamped_sqrt(value: f64, which: &'static str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value.sqrt())
    } else if value >= -RADICAND_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::Domain { which, value })
    }
}

pub fn derive_params(sf: &StandardForm) -> Result<DerivedParams> {
    let a4 = 0.5 * (1.0 - sf.a1);
    let a5 = 0.5 * (sf.a2 - 2.0 * sf.a3);
    let a6 = a5 * a5 + sf.xi1;
    let a7 = 2.0 * a4 * a5 - sf.xi2;
    let a8 = a4 * a4 + sf.xi3;
    let a9 = sf.a3 * a7 + sf.a3 * sf.a3 * a8 + a6;
    let root8 = clamped_sqrt(a8, "a8 = a4^2 + xi3")?;
    let root9 = clamped_sqrt(a9, "a9 = a3 a7 + a3^2 a8 + a6")?;
    Ok(DerivedParams {
        a4,
        a5,
        a6,
        a7,
        a8,
        a9,
        a10: sf.a1 + 2.0 * a4 + 2.0 * root8,
        a11: sf.a2 - 2.0 * a5 + 2.0 * (root9 + sf.a3 * root8),
        a12: a4 + root8,
        a13: a5 - (root9 + sf.a3 * root8),
        root8,
        root9,
    })
}

/// `k = -(a7 + 2 a3 a8) - 2 sqrt(a8 a9)`; the root that makes `pi(s)` linear
/// and `tau(s)` decreasing.
pub fn k_value(sf: &StandardForm, dp: &DerivedParams) -> f64 {
    -(dp.a7 + 2.0 * sf.a3 * dp.a8) - 2.0 * dp.root8 * dp.root9
}

/// Sign choice in `pi(s) = a4 + a5 s -/+ [(sqrt(a9) + a3 sqrt(a8)) s - sqrt(a8)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PiBranch {
    /// Minus sign: the branch used for bound states.
    Bound,
    /// Plus sign.
    Conjugate,
}

impl PiBranch {
    fn sign(self) -> f64 {
        match self {
            PiBranch::Bound => -1.0,
            PiBranch::Conjugate => 1.0,
        }
    }
}

pub fn pi_polynomial(s: f64, sf: &StandardForm, dp: &DerivedParams, branch: PiBranch) -> f64 {
    dp.a4 + dp.a5 * s + branch.sign() * (dp.bracket_slope(sf) * s - dp.root8)
}

pub fn pi_slope(sf: &StandardForm, dp: &DerivedParams, branch: PiBranch) -> f64 {
    dp.a5 + branch.sign() * dp.bracket_slope(sf)
}

/// The quadratic under the square root of `pi(s)` for a given `k`:
/// `(a6 - k a3) s^2 + (a7 + k) s + a8`.
pub fn pi_radicand(s: f64, sf: &StandardForm, dp: &DerivedParams, k: f64) -> f64 {
    (dp.a6 - k * sf.a3) * s * s + (dp.a7 + k) * s + dp.a8
}

/// Discriminant of [`pi_radicand`]; vanishes exactly when the radicand is a
/// perfect square.
pub fn pi_discriminant(sf: &StandardForm, dp: &DerivedParams, k: f64) -> f64 {
    let b = dp.a7 + k;
    b * b - 4.0 * (dp.a6 - k * sf.a3) * dp.a8
}

/// `tau(s) = (a1 - a2 s) + 2 pi(s)` on the bound branch.
pub fn tau_polynomial(s: f64, sf: &StandardForm, dp: &DerivedParams) -> f64 {
    sf.a1 - sf.a2 * s + 2.0 * pi_polynomial(s, sf, dp, PiBranch::Bound)
}

pub fn tau_slope(sf: &StandardForm, dp: &DerivedParams) -> f64 {
    -sf.a2 + 2.0 * pi_slope(sf, dp, PiBranch::Bound)
}

/// `lambda = k + pi'`.
pub fn lambda(sf: &StandardForm, dp: &DerivedParams) -> f64 {
    k_value(sf, dp) + pi_slope(sf, dp, PiBranch::Bound)
}

/// `lambda_n = -n tau' - n (n - 1) sigma'' / 2` with `sigma = s (1 - a3 s)`.
pub fn lambda_n(n: u32, sf: &StandardForm, dp: &DerivedParams) -> f64 {
    let n = f64::from(n);
    -n * tau_slope(sf, dp) + n * (n - 1.0) * sf.a3
}

/// Left side of the quantization condition
///
/// ```text
/// a2 n - (2n+1) a5 + (2n+1)(sqrt(a9) + a3 sqrt(a8)) + n(n-1) a3
///      + a7 + 2 a3 a8 + 2 sqrt(a8 a9) = 0
/// ```
///
/// which equals `lambda_n - lambda`.
pub fn quantization_residual(n: u32, sf: &StandardForm, dp: &DerivedParams) -> f64 {
    let nf = f64::from(n);
    let odd = 2.0 * nf + 1.0;
    sf.a2 * nf - odd * dp.a5
        + odd * dp.bracket_slope(sf)
        + nf * (nf - 1.0) * sf.a3
        + dp.a7
        + 2.0 * sf.a3 * dp.a8
        + 2.0 * dp.root8 * dp.root9
}

/// Exponents of the weight `rho(s) = s^rho_s (1 - a3 s)^rho_u`, the factor
/// `phi(s) = s^phi_s (1 - a3 s)^phi_u`, and the Jacobi superscripts of
/// `y_n = P_n^{(jacobi_a, jacobi_b)}(1 - 2 a3 s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorExponents {
    pub rho_s: f64,
    pub rho_u: f64,
    pub phi_s: f64,
    pub phi_u: f64,
    pub jacobi_a: f64,
    pub jacobi_b: f64,
}

pub fn factor_exponents(sf: &StandardForm, dp: &DerivedParams) -> Result<FactorExponents> {
    if sf.a3 == 0.0 {
        return Err(Error::DegenerateFactor);
    }
    let jacobi_a = dp.a10 - 1.0;
    let jacobi_b = dp.a11 / sf.a3 - dp.a10 - 1.0;
    Ok(FactorExponents {
        rho_s: jacobi_a,
        rho_u: jacobi_b,
        phi_s: dp.a12,
        phi_u: -dp.a12 - dp.a13 / sf.a3,
        jacobi_a,
        jacobi_b,
    })
}

/// Power of `s` governing `phi(s) y_n(s)` as `s -> infinity`:
/// `phi_s + phi_u + n = n - a13 / a3`. Negative means the eigenfunction also
/// decays beyond the far singular point (the full-line bound-state branch).
pub fn far_field_exponent(n: u32, sf: &StandardForm, dp: &DerivedParams) -> Result<f64> {
    if sf.a3 == 0.0 {
        return Err(Error::DegenerateFactor);
    }
    Ok(f64::from(n) - dp.a13 / sf.a3)
}
