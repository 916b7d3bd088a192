//! Energy quantization for the q-deformed Pöschl-Teller well with
//! position-dependent mass.
//!
//! With `s = exp(-2 alpha x)` and `eta^2 = 1/(4 alpha^2)` the Klein-Gordon
//! equation takes the hypergeometric template of [`crate::nu_engine`] with
//! `a1 = 1, a2 = a3 = -q` and
//!
//! ```text
//! xi1 = -eta^2 q^2 (E^2 - m0^2)
//! xi2 = 2 eta^2 q (E^2 - m0^2) + 8 eta^2 V0 (E - m0)
//! xi3 = -eta^2 (E^2 - m0^2)
//! ```
//!
//! Two quantization rules are available. [`QuantizationRule::ClosedForm`] is
//! the compact relation
//! `(1/alpha) sqrt(m0^2 - E^2) + sqrt(1/4 + 2 V0 (E - m0)/(q alpha^2)) = n + 1/2`;
//! [`QuantizationRule::Parametric`] is the generic engine condition restricted
//! to the branch whose eigenfunction decays on both sides of the well. Every
//! root is cross-checked against the differential equation by
//! [`crate::verify::ode_residual`] before it enters a [`SpectrumReport`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nu_engine::{self, StandardForm};
use crate::qdeform::{validate_alpha, validate_q, DeformedParams, MassParams};
use crate::verify;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SCAN_POINTS: usize = 10_000;
/// Binding bound on the scaled ODE residual of an accepted state.
pub const RESIDUAL_ACCEPT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ProblemParams {
    pub m0: f64,
    pub v0: f64,
    pub alpha: f64,
    pub q: f64,
    eta2: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    m0: f64,
    v0: f64,
    alpha: f64,
    q: f64,
}

impl TryFrom<RawParams> for ProblemParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        ProblemParams::new(r.m0, r.v0, r.alpha, r.q)
    }
}

impl From<ProblemParams> for RawParams {
    fn from(p: ProblemParams) -> Self {
        RawParams {
            m0: p.m0,
            v0: p.v0,
            alpha: p.alpha,
            q: p.q,
        }
    }
}

impl ProblemParams {
    pub fn new(m0: f64, v0: f64, alpha: f64, q: f64) -> Result<Self> {
        if !(m0.is_finite() && m0 > 0.0) {
            return Err(Error::invalid("m0", format!("rest mass must be positive, got {m0}")));
        }
        if !v0.is_finite() {
            return Err(Error::invalid("v0", format!("must be finite, got {v0}")));
        }
        validate_alpha(alpha)?;
        validate_q(q)?;
        Ok(ProblemParams {
            m0,
            v0,
            alpha,
            q,
            eta2: 1.0 / (4.0 * alpha * alpha),
        })
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    pub fn with_v0(&self, v0: f64) -> Result<Self> {
        ProblemParams::new(self.m0, v0, self.alpha, self.q)
    }

    pub fn deformed(&self) -> DeformedParams {
        DeformedParams {
            q: self.q,
            alpha: self.alpha,
            v0: self.v0,
        }
    }

    pub fn mass_params(&self) -> MassParams {
        MassParams {
            m0: self.m0,
            deformed: self.deformed(),
        }
    }

    /// Non-fatal remarks about the parameter set.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.v0 < 0.0 {
            out.push(format!(
                "v0 = {} is negative: the vector potential is a barrier rather than a well",
                self.v0
            ));
        }
        out
    }

    /// `2 V0 / (q alpha^2)`, the slope of the second radicand in `E`.
    fn radicand_slope(&self) -> f64 {
        2.0 * self.v0 / (self.q * self.alpha * self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Particle,
    Antiparticle,
}

impl Branch {
    pub fn of(energy: f64) -> Branch {
        if energy >= 0.0 {
            Branch::Particle
        } else {
            Branch::Antiparticle
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Particle => "particle",
            Branch::Antiparticle => "antiparticle",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "particle" => Ok(Branch::Particle),
            "antiparticle" => Ok(Branch::Antiparticle),
            other => Err(format!("unknown branch `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantizationRule {
    #[default]
    ClosedForm,
    Parametric,
}

impl QuantizationRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            QuantizationRule::ClosedForm => "closed-form",
            QuantizationRule::Parametric => "parametric",
        }
    }
}

impl FromStr for QuantizationRule {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "closed-form" => Ok(QuantizationRule::ClosedForm),
            "parametric" => Ok(QuantizationRule::Parametric),
            other => Err(format!("unknown quantization rule `{other}`")),
        }
    }
}

/// One solved level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub n: u32,
    pub energy: f64,
    pub branch: Branch,
    /// `sqrt(eta^2 (m0^2 - E^2))`, the power of `s` at the origin of `s`.
    pub eps: f64,
    pub jacobi_a: f64,
    pub jacobi_b: f64,
}

impl BoundState {
    /// Builds the state for a given energy, taking the Jacobi superscripts from
    /// the engine's factor exponents.
    pub fn at(n: u32, energy: f64, p: &ProblemParams) -> Result<Self> {
        let sf = standard_form(p, energy);
        let dp = nu_engine::derive_params(&sf)?;
        let fe = nu_engine::factor_exponents(&sf, &dp)?;
        Ok(BoundState {
            n,
            energy,
            branch: Branch::of(energy),
            eps: fe.phi_s,
            jacobi_a: fe.jacobi_a,
            jacobi_b: fe.jacobi_b,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn contains(&self, e: f64) -> bool {
        e >= self.lo && e <= self.hi
    }
}

pub fn standard_form(p: &ProblemParams, e: f64) -> StandardForm {
    let de = e * e - p.m0 * p.m0;
    StandardForm {
        a1: 1.0,
        a2: -p.q,
        a3: -p.q,
        xi1: -p.eta2 * p.q * p.q * de,
        xi2: 2.0 * p.eta2 * p.q * de + 8.0 * p.eta2 * p.v0 * (e - p.m0),
        xi3: -p.eta2 * de,
    }
}

/// `(1/alpha) sqrt(m0^2 - E^2) + sqrt(1/4 + 2 V0 (E - m0)/(q alpha^2)) - (n + 1/2)`.
pub fn quantization_lhs(e: f64, n: u32, p: &ProblemParams) -> Result<f64> {
    let r1 = p.m0 * p.m0 - e * e;
    if r1 < 0.0 {
        return Err(Error::Domain {
            which: "m0^2 - E^2",
            value: r1,
        });
    }
    let r2 = 0.25 + p.radicand_slope() * (e - p.m0);
    if r2 < 0.0 {
        return Err(Error::Domain {
            which: "1/4 + 2 V0 (E - m0) / (q alpha^2)",
            value: r2,
        });
    }
    Ok(r1.sqrt() / p.alpha + r2.sqrt() - (f64::from(n) + 0.5))
}

/// Generic engine residual evaluated on [`standard_form`].
pub fn parametric_lhs(e: f64, n: u32, p: &ProblemParams) -> Result<f64> {
    let sf = standard_form(p, e);
    let dp = nu_engine::derive_params(&sf)?;
    Ok(nu_engine::quantization_residual(n, &sf, &dp))
}

pub fn rule_lhs(rule: QuantizationRule, e: f64, n: u32, p: &ProblemParams) -> Result<f64> {
    match rule {
        QuantizationRule::ClosedForm => quantization_lhs(e, n, p),
        QuantizationRule::Parametric => parametric_lhs(e, n, p),
    }
}

/// Energies in `[-m0, m0]` where both radicands are non-negative.
pub fn admissible_windows(p: &ProblemParams) -> Vec<Window> {
    let c = p.radicand_slope();
    // 1/4 + c (E - m0) >= 0 is linear in E
    let (mut lo, mut hi) = (-p.m0, p.m0);
    if c > 0.0 {
        lo = lo.max(p.m0 - 0.25 / c);
    } else if c < 0.0 {
        hi = hi.min(p.m0 - 0.25 / c);
    }
    if lo <= hi {
        vec![Window { lo, hi }]
    } else {
        Vec::new()
    }
}

/// Roots of one level, before the differential-equation check.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LevelRoots {
    pub states: Vec<BoundState>,
    /// Roots within `10 tol m0` of `+-m0`.
    pub thresholds: Vec<f64>,
    /// Parametric roots on the branch that grows beyond the far singularity.
    pub growing: Vec<f64>,
}

/// All closed-form roots of level `n` (see [`solve_level_with`]).
pub fn solve_level(n: u32, p: &ProblemParams, tol: f64, scan_points: usize) -> Vec<BoundState> {
    solve_level_with(QuantizationRule::ClosedForm, n, p, tol, scan_points).states
}

/// Uniform sign-change scan of the admissible window followed by bisection.
/// Threshold roots `|E| -> m0` are set aside because their eigenfunctions do
/// not vanish at `s -> 0`.
pub fn solve_level_with(
    rule: QuantizationRule,
    n: u32,
    p: &ProblemParams,
    tol: f64,
    scan_points: usize,
) -> LevelRoots {
    let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };
    let scan_points = scan_points.max(100);
    let f = |e: f64| rule_lhs(rule, e, n, p).ok();

    let mut roots = Vec::new();
    for w in admissible_windows(p) {
        roots.extend(scan_roots(&f, w, scan_points));
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol * p.m0);

    let mut out = LevelRoots::default();
    for mut e in roots {
        // a root at E = 0 comes back as a few ulps of either sign
        if e.abs() <= 16.0 * f64::EPSILON * p.m0 {
            e = 0.0;
        }
        if (p.m0 - e.abs()) <= 10.0 * tol * p.m0 {
            out.thresholds.push(e);
            continue;
        }
        let state = match BoundState::at(n, e, p) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if rule == QuantizationRule::Parametric {
            let sf = standard_form(p, e);
            let decays = nu_engine::derive_params(&sf)
                .and_then(|dp| nu_engine::far_field_exponent(n, &sf, &dp))
                .map(|x| x < 0.0)
                .unwrap_or(false);
            if !decays {
                out.growing.push(e);
                continue;
            }
        }
        out.states.push(state);
    }
    out
}

fn scan_roots(f: &impl Fn(f64) -> Option<f64>, w: Window, points: usize) -> Vec<f64> {
    let step = (w.hi - w.lo) / (points - 1) as f64;
    let grid: Vec<(f64, Option<f64>)> = (0..points)
        .map(|i| {
            let e = if i == points - 1 { w.hi } else { w.lo + step * i as f64 };
            (e, f(e))
        })
        .collect();

    let mut roots = Vec::new();
    for (i, &(e, v)) in grid.iter().enumerate() {
        if v == Some(0.0) {
            roots.push(e);
            continue;
        }
        if let Some(&(e1, Some(v1))) = grid.get(i + 1) {
            if let Some(v0) = v {
                if v1 != 0.0 && (v0 < 0.0) != (v1 < 0.0) {
                    if let Some(r) = bisect(f, e, v0, e1) {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots
}

/// Bisection to full double precision on a bracketing interval.
fn bisect(f: &impl Fn(f64) -> Option<f64>, mut lo: f64, mut flo: f64, mut hi: f64) -> Option<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub rule: QuantizationRule,
    pub tol: f64,
    pub scan_points: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rule: QuantizationRule::ClosedForm,
            tol: DEFAULT_TOL,
            scan_points: DEFAULT_SCAN_POINTS,
        }
    }
}

/// A state that passed the differential-equation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptedState {
    #[serde(flatten)]
    pub state: BoundState,
    /// Scaled max-norm ODE residual of the assembled eigenfunction.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedRoot {
    pub state: BoundState,
    pub residual: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRoot {
    pub n: u32,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub scan_points: usize,
    pub excluded_thresholds: Vec<ThresholdRoot>,
    /// Parametric roots whose eigenfunction grows beyond the far singularity.
    pub growing_branch: Vec<ThresholdRoot>,
    /// Roots whose assembled eigenfunction failed the ODE residual check.
    pub rejected: Vec<RejectedRoot>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: ProblemParams,
    pub rule: QuantizationRule,
    pub tol: f64,
    pub n_max: u32,
    pub states: Vec<AcceptedState>,
    pub windows: Vec<Window>,
    pub diagnostics: Diagnostics,
}

impl SpectrumReport {
    /// Accepted states and rejected roots together, in report order.
    pub fn candidates(&self) -> Vec<BoundState> {
        let mut all: Vec<BoundState> = self.states.iter().map(|a| a.state).collect();
        all.extend(self.diagnostics.rejected.iter().map(|r| r.state));
        all.sort_by(state_order);
        all
    }
}

pub fn state_order(a: &BoundState, b: &BoundState) -> Ordering {
    a.branch
        .cmp(&b.branch)
        .then(a.n.cmp(&b.n))
        .then(a.energy.total_cmp(&b.energy))
}

pub fn solve_spectrum(p: &ProblemParams, n_max: u32, tol: f64) -> SpectrumReport {
    solve_spectrum_with(
        p,
        n_max,
        &SolveOptions {
            tol,
            ..SolveOptions::default()
        },
    )
}

enum Outcome {
    Accepted(AcceptedState),
    Rejected(RejectedRoot),
}

pub fn solve_spectrum_with(p: &ProblemParams, n_max: u32, opts: &SolveOptions) -> SpectrumReport {
    let levels: Vec<(u32, LevelRoots)> = (0..=n_max)
        .into_par_iter()
        .map(|n| (n, solve_level_with(opts.rule, n, p, opts.tol, opts.scan_points)))
        .collect();

    let mut diagnostics = Diagnostics {
        scan_points: opts.scan_points.max(100),
        warnings: p.warnings(),
        ..Diagnostics::default()
    };
    let mut candidates = Vec::new();
    for (n, roots) in levels {
        diagnostics
            .excluded_thresholds
            .extend(roots.thresholds.iter().map(|&energy| ThresholdRoot { n, energy }));
        diagnostics
            .growing_branch
            .extend(roots.growing.iter().map(|&energy| ThresholdRoot { n, energy }));
        candidates.extend(roots.states);
    }

    let outcomes: Vec<Outcome> = candidates
        .into_par_iter()
        .map(|state| cross_validate(state, p))
        .collect();

    let mut states = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Accepted(a) => states.push(a),
            Outcome::Rejected(r) => diagnostics.rejected.push(r),
        }
    }
    states.sort_by(|a, b| state_order(&a.state, &b.state));
    diagnostics.rejected.sort_by(|a, b| state_order(&a.state, &b.state));

    SpectrumReport {
        params: *p,
        rule: opts.rule,
        tol: opts.tol,
        n_max,
        states,
        windows: admissible_windows(p),
        diagnostics,
    }
}

fn cross_validate(state: BoundState, p: &ProblemParams) -> Outcome {
    match verify::ode_residual(&state, p, verify::default_step(p)) {
        Ok(check) if check.residual_max < RESIDUAL_ACCEPT => Outcome::Accepted(AcceptedState {
            state,
            residual: check.residual_max,
        }),
        Ok(check) => Outcome::Rejected(RejectedRoot {
            state,
            residual: Some(check.residual_max),
            reason: format!(
                "ODE residual {:.3e} exceeds {:.0e}",
                check.residual_max, RESIDUAL_ACCEPT
            ),
        }),
        Err(e) => Outcome::Rejected(RejectedRoot {
            state,
            residual: None,
            reason: e.to_string(),
        }),
    }
}
