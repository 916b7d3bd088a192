//! Closed-form eigenfunctions in the compact coordinate `s = exp(-2 alpha x)`:
//!
//! ```text
//! psi_n(s) = a_n s^phi_s (1 + q s)^phi_u P_n^{(jacobi_a, jacobi_b)}(1 + 2 q s)
//! ```
//!
//! with every exponent taken from [`crate::nu_engine::factor_exponents`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::jacobi_eval;
use crate::nu_engine::{self, FactorExponents};
use crate::spectrum::{standard_form, BoundState, ProblemParams};

pub fn to_s(x: f64, alpha: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Coordinate {
            value: x,
            domain: "x in [0, inf)",
        });
    }
    Ok((-2.0 * alpha * x).exp())
}

pub fn to_x(s: f64, alpha: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Coordinate {
            value: s,
            domain: "s in (0, 1]",
        });
    }
    Ok(-s.ln() / (2.0 * alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Unnormalized,
    #[default]
    L2,
}

impl FromStr for Convention {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "l2" => Ok(Convention::L2),
            "unnormalized" => Ok(Convention::Unnormalized),
            other => Err(format!("unknown convention `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    X,
    S,
}

impl FromStr for Variable {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "x" => Ok(Variable::X),
            "s" => Ok(Variable::S),
            other => Err(format!("unknown variable `{other}` (expected x or s)")),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::X => "x",
            Variable::S => "s",
        })
    }
}

fn exponents(state: &BoundState, p: &ProblemParams) -> Result<FactorExponents> {
    let sf = standard_form(p, state.energy);
    let dp = nu_engine::derive_params(&sf)?;
    nu_engine::factor_exponents(&sf, &dp)
}

fn require_open_unit(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Coordinate {
            value: s,
            domain: "s in (0, 1)",
        });
    }
    Ok(())
}

/// `s^phi_s (1 + q s)^phi_u`.
pub fn phi_factor(s: f64, state: &BoundState, p: &ProblemParams) -> Result<f64> {
    require_open_unit(s)?;
    let fe = exponents(state, p)?;
    Ok(s.powf(fe.phi_s) * (1.0 + p.q * s).powf(fe.phi_u))
}

/// `s^rho_s (1 + q s)^rho_u`.
pub fn weight_rho(s: f64, state: &BoundState, p: &ProblemParams) -> Result<f64> {
    require_open_unit(s)?;
    let fe = exponents(state, p)?;
    Ok(s.powf(fe.rho_s) * (1.0 + p.q * s).powf(fe.rho_u))
}

/// A bound state with its normalization constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub state: BoundState,
    pub params: ProblemParams,
    pub norm_constant: f64,
    pub convention: Convention,
    pub exponents: FactorExponents,
}

impl Eigenfunction {
    pub fn new(state: BoundState, p: &ProblemParams, convention: Convention) -> Result<Self> {
        let mut ef = Eigenfunction {
            state,
            params: *p,
            norm_constant: 1.0,
            convention: Convention::Unnormalized,
            exponents: exponents(&state, p)?,
        };
        if convention == Convention::L2 {
            ef.norm_constant = normalize(&state, p, DEFAULT_GRID)?;
            ef.convention = Convention::L2;
        }
        Ok(ef)
    }

    /// Same function with the energy (and hence every exponent) replaced.
    pub fn with_energy(&self, energy: f64) -> Result<Self> {
        let state = BoundState::at(self.state.n, energy, &self.params)?;
        Ok(Eigenfunction {
            state,
            exponents: exponents(&state, &self.params)?,
            ..*self
        })
    }

    /// `psi` at any `s > 0` where `1 + q s > 0`, including `s > 1` (`x < 0`).
    pub fn eval_s(&self, s: f64) -> Result<f64> {
        let q = self.params.q;
        let fe = &self.exponents;
        let u = 1.0 + q * s;
        let poly = jacobi_eval(self.state.n, fe.jacobi_a, fe.jacobi_b, 1.0 + 2.0 * q * s)?;
        Ok(self.norm_constant * s.powf(fe.phi_s) * u.powf(fe.phi_u) * poly)
    }

    /// `psi` at `x`, on the whole line wherever `1 + q s` stays positive.
    pub fn eval_x(&self, x: f64) -> Result<f64> {
        self.eval_s((-2.0 * self.params.alpha * x).exp())
    }

    /// `a_n phi(1) P_n(1 + 2q)`, the finite value at the origin `x = 0`.
    pub fn origin_value(&self) -> Result<f64> {
        let q = self.params.q;
        let fe = &self.exponents;
        let poly = jacobi_eval(self.state.n, fe.jacobi_a, fe.jacobi_b, 1.0 + 2.0 * q)?;
        Ok(self.norm_constant * (1.0 + q).powf(fe.phi_u) * poly)
    }
}

/// `psi(s)` on the open interval `(0, 1)`.
pub fn psi(s: f64, ef: &Eigenfunction) -> Result<f64> {
    require_open_unit(s)?;
    ef.eval_s(s)
}

pub const DEFAULT_GRID: usize = 512;
const MAX_DOUBLINGS: u32 = 6;
const NORM_CHANGE_LIMIT: f64 = 1e-6;
const NORM_CHANGE_TARGET: f64 = 1e-12;

/// `a_n = [int_0^inf |psi|^2 dx]^{-1/2}` for the unnormalized eigenfunction,
/// computed as `int_0^1 |psi(s)|^2 / (2 alpha s) ds` on a tanh-sinh grid whose
/// nodes cluster at both ends of `(0, 1)`. The grid is doubled until the
/// constant settles.
pub fn normalize(state: &BoundState, p: &ProblemParams, grid_size: usize) -> Result<f64> {
    if grid_size < 256 {
        return Err(Error::invalid("grid_size", format!("need at least 256 nodes, got {grid_size}")));
    }
    let ef = Eigenfunction {
        state: *state,
        params: *p,
        norm_constant: 1.0,
        convention: Convention::Unnormalized,
        exponents: exponents(state, p)?,
    };
    if !(ef.exponents.phi_s > 0.0) {
        return Err(Error::invalid(
            "state",
            "decay exponent must be positive for a normalizable state",
        ));
    }
    let mut nodes = grid_size;
    let mut prev = norm_integral(&ef, nodes)?;
    let mut change = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        nodes = 2 * nodes - 1;
        let next = norm_integral(&ef, nodes)?;
        change = ((next - prev) / next).abs();
        prev = next;
        if change < NORM_CHANGE_TARGET {
            break;
        }
    }
    // the constant scales as integral^{-1/2}
    if 0.5 * change > NORM_CHANGE_LIMIT {
        return Err(Error::NonConvergence {
            change: 0.5 * change,
            doublings: MAX_DOUBLINGS,
        });
    }
    if !(prev > 0.0 && prev.is_finite()) {
        return Err(Error::ZeroFunction);
    }
    Ok(prev.powf(-0.5))
}

/// Largest |t| of the tanh-sinh rule; the outermost node sits near 1e-304.
fn tanh_sinh_half_width() -> f64 {
    (700.0 / std::f64::consts::PI).asinh()
}

fn norm_integral(ef: &Eigenfunction, nodes: usize) -> Result<f64> {
    let alpha = ef.params.alpha;
    let t_max = tanh_sinh_half_width();
    let h = 2.0 * t_max / (nodes - 1) as f64;
    let mut sum = 0.0;
    for i in 0..nodes {
        let t = -t_max + h * i as f64;
        let u = std::f64::consts::PI * t.sinh();
        // s = 1/(1 + e^-u), ds/dt = s (1 - s) pi cosh t
        let s = 1.0 / (1.0 + (-u).exp());
        let one_minus = 1.0 / (1.0 + u.exp());
        if s <= 0.0 || one_minus <= 0.0 {
            continue;
        }
        let jac = s * one_minus * std::f64::consts::PI * t.cosh();
        let v = ef.eval_s(s)?;
        sum += v * v / (2.0 * alpha * s) * jac;
    }
    let mut total = sum * h;
    // int_0^{s0} c s^{2 eps - 1} ds for the part below the first node
    let t0 = -t_max;
    let s0 = 1.0 / (1.0 + (-std::f64::consts::PI * t0.sinh()).exp());
    if s0 > 0.0 {
        let v0 = ef.eval_s(s0)?;
        total += v0 * v0 / (2.0 * alpha) / (2.0 * ef.exponents.phi_s);
    }
    if !total.is_finite() {
        return Err(Error::NonFinite("normalization integral".into()));
    }
    Ok(total)
}

/// How the nodes of a [`SampledFunction`] were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub uniform_in: Variable,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub variable: Variable,
    pub grid: Grid,
    /// Natural units, hbar = c = 1.
    pub units: String,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(variable: Variable, nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::invalid("nodes", "need matching nodes and values, at least two"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("nodes", "must be strictly increasing"));
        }
        if values.iter().chain(&nodes).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sampled function".into()));
        }
        if variable == Variable::S && !(nodes[0] > 0.0 && nodes[nodes.len() - 1] < 1.0) {
            return Err(Error::Coordinate {
                value: if nodes[0] > 0.0 { nodes[nodes.len() - 1] } else { nodes[0] },
                domain: "s in (0, 1)",
            });
        }
        let step = (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64;
        Ok(SampledFunction {
            variable,
            grid: Grid {
                uniform_in: variable,
                step,
            },
            units: "natural (hbar = c = 1)".into(),
            nodes,
            values,
        })
    }

    /// Number of strict sign changes between consecutive samples.
    pub fn sign_changes(&self) -> usize {
        let mut count = 0;
        let mut last = 0.0_f64;
        for &v in &self.values {
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v < 0.0) != (last < 0.0) {
                count += 1;
            }
            last = v;
        }
        count
    }
}

/// Samples `psi` uniformly in the chosen variable over `range` (inclusive).
pub fn sample(
    ef: &Eigenfunction,
    variable: Variable,
    n_points: usize,
    range: (f64, f64),
) -> Result<SampledFunction> {
    if n_points < 2 {
        return Err(Error::invalid("points", "need at least two sample points"));
    }
    let (lo, hi) = range;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("range", format!("need lo < hi, got ({lo}, {hi})")));
    }
    match variable {
        Variable::X if lo < 0.0 => {
            return Err(Error::Coordinate {
                value: lo,
                domain: "x in [0, inf)",
            })
        }
        Variable::S if !(lo > 0.0 && hi < 1.0) => {
            return Err(Error::Coordinate {
                value: if lo > 0.0 { hi } else { lo },
                domain: "s in (0, 1)",
            })
        }
        _ => {}
    }
    let step = (hi - lo) / (n_points - 1) as f64;
    let nodes: Vec<f64> = (0..n_points)
        .map(|i| if i == n_points - 1 { hi } else { lo + step * i as f64 })
        .collect();
    let values = nodes
        .iter()
        .map(|&c| match variable {
            Variable::X => ef.eval_x(c),
            Variable::S => ef.eval_s(c),
        })
        .collect::<Result<Vec<f64>>>()?;
    SampledFunction::new(variable, nodes, values)
}

/// Behaviour of `psi` at the two ends of `s in (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBehavior {
    /// `|psi|` decreases along `s = 10^-3 .. 10^-8`.
    pub decays_monotonically: bool,
    /// `d ln|psi| / d ln s` at `s = 1e-8`.
    pub log_slope: f64,
    pub phi_s: f64,
    /// `psi(1 - 1e-12)`.
    pub near_origin: f64,
    /// `a_n phi(1) P_n(1 + 2q)`.
    pub origin_value: f64,
    /// `max |psi|` on a uniform grid in `s`.
    pub peak: f64,
}

impl BoundaryBehavior {
    pub fn log_slope_error(&self) -> f64 {
        (self.log_slope - self.phi_s).abs()
    }

    /// Relative to the closed-form value, or to the peak when the origin is a
    /// node of the eigenfunction.
    pub fn origin_relative_error(&self) -> f64 {
        let scale = if self.origin_value.abs() > 1e-8 * self.peak {
            self.origin_value.abs()
        } else {
            self.peak
        };
        (self.near_origin - self.origin_value).abs() / scale.max(f64::MIN_POSITIVE)
    }
}

pub fn boundary_behavior(ef: &Eigenfunction) -> Result<BoundaryBehavior> {
    let mut decays = true;
    let mut prev = f64::INFINITY;
    for k in 3..=8 {
        let v = ef.eval_s(10f64.powi(-k))?.abs();
        if !(v < prev) {
            decays = false;
        }
        prev = v;
    }
    let s = 1e-8;
    let r = 1.0 + 1e-4;
    let up = ef.eval_s(s * r)?.abs().ln();
    let down = ef.eval_s(s / r)?.abs().ln();
    Ok(BoundaryBehavior {
        decays_monotonically: decays,
        log_slope: (up - down) / (2.0 * r.ln()),
        phi_s: ef.exponents.phi_s,
        near_origin: ef.eval_s(1.0 - 1e-12)?,
        origin_value: ef.origin_value()?,
        peak: sample(ef, Variable::S, 2001, (1e-9, 1.0 - 1e-9))?
            .values
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs())),
    })
}
