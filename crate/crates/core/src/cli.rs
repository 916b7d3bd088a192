//! The `kgpt` command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 no such
//! state, 5 a binding verification check failed. Data goes to stdout (or
//! `--out`), diagnostics to stderr. All quantities are in natural units,
//! `hbar = c = 1`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::spectrum::{
    self, Branch, BoundState, ProblemParams, QuantizationRule, SolveOptions, SpectrumReport,
};
use crate::verify::{self, Check, VerificationReport, VerifyOptions};
use crate::wavefunction::{self, Convention, Eigenfunction, SampledFunction, Variable};

pub const SPECTRUM_HEADER: [&str; 7] = ["n", "branch", "E", "eps", "jacobi_a", "jacobi_b", "residual"];
pub const WAVEFUNCTION_HEADER: [&str; 3] = ["coordinate", "psi", "abs_psi2"];
pub const SCAN_HEADER: [&str; 5] = ["v0", "q", "count", "min_e", "max_e"];
pub const VERIFY_HEADER: [&str; 8] = ["n", "branch", "E", "check", "passed", "binding", "value", "detail"];

const DEFAULT_N_MAX: u32 = 3;
const DEFAULT_POINTS: usize = 201;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    NoSuchState(String),
    #[error("{0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::NoSuchState(_) => 4,
            CliError::VerificationFailed(_) => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::Coordinate { .. } => CliError::Validation(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "kgpt", version, about = "Klein-Gordon bound states in a q-deformed Pöschl-Teller well (natural units, hbar = c = 1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the quantization condition level by level.
    Spectrum(SpectrumArgs),
    /// Sample one eigenfunction.
    Wavefunction(WavefunctionArgs),
    /// Run the numerical oracles on every candidate state.
    Verify(VerifyArgs),
    /// Count states over a (V0, q) grid.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// closed-form or parametric.
    #[arg(long)]
    pub rule: Option<QuantizationRule>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with the same keys as the flags (snake_case); flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also list roots that failed the ODE residual check.
    #[arg(long)]
    pub include_rejected: bool,
}

#[derive(Debug, Clone, Args)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub n: Option<u32>,
    /// particle or antiparticle; defaults to the first state of the level.
    #[arg(long)]
    pub branch: Option<Branch>,
    /// x or s.
    #[arg(long)]
    pub variable: Option<Variable>,
    #[arg(long)]
    pub points: Option<usize>,
    /// LO,HI in the chosen variable.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub range: Option<(f64, f64)>,
    /// l2 or unnormalized.
    #[arg(long)]
    pub convention: Option<Convention>,
    /// Allow a root that failed the ODE residual check.
    #[arg(long)]
    pub include_rejected: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Skip the finite-difference eigenvalue oracle.
    #[arg(long)]
    pub no_fd: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub v0_range: Option<(f64, f64)>,
    #[arg(long)]
    pub v0_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub q_range: Option<(f64, f64)>,
    #[arg(long)]
    pub q_steps: Option<usize>,
}

pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI, got `{s}`"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad number `{t}`: {e}"))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(format!("range ends must be finite, got `{s}`"));
    }
    Ok((lo, hi))
}

/// Contents of a `--config` file. Every key is optional and mirrors a flag.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m0: Option<f64>,
    pub v0: Option<f64>,
    pub alpha: Option<f64>,
    pub q: Option<f64>,
    pub n_max: Option<u32>,
    pub tol: Option<f64>,
    pub rule: Option<QuantizationRule>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub n: Option<u32>,
    pub branch: Option<Branch>,
    pub variable: Option<Variable>,
    pub points: Option<usize>,
    pub range: Option<(f64, f64)>,
    pub convention: Option<Convention>,
    pub include_rejected: Option<bool>,
    pub no_fd: Option<bool>,
    pub v0_range: Option<(f64, f64)>,
    pub v0_steps: Option<usize>,
    pub q_range: Option<(f64, f64)>,
    pub q_steps: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flags and config file merged, flags first.
struct Resolved {
    common: CommonArgs,
    file: RunConfig,
}

impl Resolved {
    fn new(common: &CommonArgs) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Ok(Resolved {
            common: common.clone(),
            file,
        })
    }

    fn required(&self, name: &str, flag: Option<f64>, file: Option<f64>) -> Result<f64, CliError> {
        flag.or(file)
            .ok_or_else(|| CliError::Validation(format!("missing --{name} (flag or config key)")))
    }

    fn params(&self) -> Result<ProblemParams, CliError> {
        let c = &self.common;
        let f = &self.file;
        Ok(ProblemParams::new(
            self.required("m0", c.m0, f.m0)?,
            self.required("v0", c.v0, f.v0)?,
            self.required("alpha", c.alpha, f.alpha)?,
            self.required("q", c.q, f.q)?,
        )?)
    }

    fn n_max(&self) -> u32 {
        self.common.n_max.or(self.file.n_max).unwrap_or(DEFAULT_N_MAX)
    }

    fn solve_options(&self) -> Result<SolveOptions, CliError> {
        let tol = self.common.tol.or(self.file.tol).unwrap_or(spectrum::DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1e-2) {
            return Err(CliError::Validation(format!("--tol must lie in (0, 1e-2), got {tol}")));
        }
        Ok(SolveOptions {
            rule: self.common.rule.or(self.file.rule).unwrap_or_default(),
            tol,
            ..SolveOptions::default()
        })
    }

    fn format(&self) -> Format {
        self.common.format.or(self.file.format).unwrap_or_default()
    }

    fn out(&self) -> Option<PathBuf> {
        self.common.out.clone().or_else(|| self.file.out.clone())
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Wavefunction(a) => cmd_wavefunction(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Scan(a) => cmd_scan(a),
    }
}

fn warn(msg: &str) {
    let _ = writeln!(std::io::stderr(), "warning: {msg}");
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Numerical(format!("cannot write to stdout: {e}"))),
    }
}

/// Pretty JSON that is known to parse back into an equal value; NaN and
/// infinities fail that check.
pub fn to_json<T: Serialize + DeserializeOwned + PartialEq>(value: &T) -> Result<String, CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))?;
    match serde_json::from_str::<T>(&text) {
        Ok(back) if back == *value => Ok(text + "\n"),
        _ => Err(CliError::Numerical(
            "output contains non-finite values or does not round-trip".into(),
        )),
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> Result<String, CliError> {
    if !x.is_finite() {
        return Err(CliError::Numerical(format!("non-finite value {x} in output")));
    }
    Ok(ryu::Buffer::new().format_finite(x).to_owned())
}

fn fmt_opt(x: Option<f64>) -> Result<String, CliError> {
    x.map(fmt_f64).transpose().map(Option::unwrap_or_default)
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Numerical(format!("CSV encoding failed: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Numerical(format!("CSV encoding failed: {e}")))
}

fn report_diagnostics(report: &SpectrumReport) {
    for w in &report.diagnostics.warnings {
        warn(w);
    }
    for t in &report.diagnostics.excluded_thresholds {
        warn(&format!("level {}: threshold root E = {} excluded", t.n, t.energy));
    }
    for r in &report.diagnostics.rejected {
        warn(&format!(
            "level {}: root E = {} rejected ({})",
            r.state.n, r.state.energy, r.reason
        ));
    }
}

fn state_row(s: &BoundState, residual: Option<f64>) -> Result<Vec<String>, CliError> {
    Ok(vec![
        s.n.to_string(),
        s.branch.to_string(),
        fmt_f64(s.energy)?,
        fmt_f64(s.eps)?,
        fmt_f64(s.jacobi_a)?,
        fmt_f64(s.jacobi_b)?,
        fmt_opt(residual)?,
    ])
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let cfg = Resolved::new(&args.common)?;
    let p = cfg.params()?;
    let opts = cfg.solve_options()?;
    let include_rejected = args.include_rejected || cfg.file.include_rejected.unwrap_or(false);
    let report = spectrum::solve_spectrum_with(&p, cfg.n_max(), &opts);
    report_diagnostics(&report);

    let bytes = match cfg.format() {
        Format::Json => to_json(&report)?.into_bytes(),
        Format::Csv => {
            let mut rows: Vec<(BoundState, Option<f64>)> =
                report.states.iter().map(|a| (a.state, Some(a.residual))).collect();
            if include_rejected {
                rows.extend(report.diagnostics.rejected.iter().map(|r| (r.state, r.residual)));
                rows.sort_by(|a, b| spectrum::state_order(&a.0, &b.0));
            }
            let rows = rows
                .iter()
                .map(|(s, r)| state_row(s, *r))
                .collect::<Result<Vec<_>, _>>()?;
            csv_bytes(&SPECTRUM_HEADER, rows)?
        }
    };
    emit(cfg.out().as_deref(), &bytes)
}

/// Wavefunction output in JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionOutput {
    pub params: ProblemParams,
    pub state: BoundState,
    /// Whether the state passed the ODE residual check.
    pub accepted: bool,
    pub residual: Option<f64>,
    pub convention: Convention,
    pub norm_constant: f64,
    pub sample: SampledFunction,
}

fn default_range(variable: Variable, state: &BoundState, p: &ProblemParams) -> (f64, f64) {
    match variable {
        // far enough for |psi| to fall by about 1e-4 from its tail prefactor
        Variable::X => (0.0, (1e4f64).ln() / (2.0 * p.alpha * state.eps) + 2.0 / p.alpha),
        Variable::S => (1e-6, 1.0 - 1e-6),
    }
}

pub fn cmd_wavefunction(args: &WavefunctionArgs) -> Result<(), CliError> {
    let cfg = Resolved::new(&args.common)?;
    let f = &cfg.file;
    let p = cfg.params()?;
    let n = args
        .n
        .or(f.n)
        .ok_or_else(|| CliError::Validation("missing --n".into()))?;
    let branch = args.branch.or(f.branch);
    let variable = args.variable.or(f.variable).unwrap_or(Variable::X);
    let points = args.points.or(f.points).unwrap_or(DEFAULT_POINTS);
    let convention = args.convention.or(f.convention).unwrap_or_default();
    let include_rejected = args.include_rejected || f.include_rejected.unwrap_or(false);
    let opts = cfg.solve_options()?;

    let report = spectrum::solve_spectrum_with(&p, n, &opts);
    report_diagnostics(&report);
    let matches = |s: &BoundState| s.n == n && branch.is_none_or(|b| s.branch == b);
    let chosen = report
        .states
        .iter()
        .find(|a| matches(&a.state))
        .map(|a| (a.state, Some(a.residual), true))
        .or_else(|| {
            include_rejected
                .then(|| report.diagnostics.rejected.iter().find(|r| matches(&r.state)))
                .flatten()
                .map(|r| (r.state, r.residual, false))
        });
    let Some((state, residual, accepted)) = chosen else {
        let label = branch.map(|b| format!(" ({b})")).unwrap_or_default();
        return Err(CliError::NoSuchState(format!("no state with n = {n}{label}")));
    };
    if !accepted {
        warn(&format!("sampling rejected root E = {}", state.energy));
    }

    let range = args
        .range
        .or(f.range)
        .unwrap_or_else(|| default_range(variable, &state, &p));
    let ef = Eigenfunction::new(state, &p, convention)?;
    let sample = wavefunction::sample(&ef, variable, points, range)?;

    let bytes = match cfg.format() {
        Format::Json => to_json(&WavefunctionOutput {
            params: p,
            state,
            accepted,
            residual,
            convention,
            norm_constant: ef.norm_constant,
            sample,
        })?
        .into_bytes(),
        Format::Csv => {
            let rows = sample
                .nodes
                .iter()
                .zip(&sample.values)
                .map(|(c, v)| Ok(vec![fmt_f64(*c)?, fmt_f64(*v)?, fmt_f64(v * v)?]))
                .collect::<Result<Vec<_>, CliError>>()?;
            csv_bytes(&WAVEFUNCTION_HEADER, rows)?
        }
    };
    emit(cfg.out().as_deref(), &bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub params: ProblemParams,
    pub rule: QuantizationRule,
    pub passed: bool,
    pub limit_checks: Vec<Check>,
    pub reports: Vec<VerificationReport>,
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let cfg = Resolved::new(&args.common)?;
    let p = cfg.params()?;
    let opts = cfg.solve_options()?;
    let report = spectrum::solve_spectrum_with(&p, cfg.n_max(), &opts);
    report_diagnostics(&report);

    let mut vopts = VerifyOptions::for_params(&p);
    if args.no_fd || cfg.file.no_fd.unwrap_or(false) {
        vopts.fd.clear();
    }
    let reports: Vec<VerificationReport> = report
        .candidates()
        .par_iter()
        .map(|s| verify::verify_state(s, &p, &vopts))
        .collect();
    let limit_checks = verify::limit_checks(&p);
    let passed = limit_checks.iter().all(|c| c.passed || !c.binding)
        && reports.iter().all(VerificationReport::binding_passed);
    let out = VerifyOutput {
        params: p,
        rule: opts.rule,
        passed,
        limit_checks,
        reports,
    };

    let bytes = match cfg.format() {
        Format::Json => to_json(&out)?.into_bytes(),
        Format::Csv => {
            let mut rows = Vec::new();
            for c in &out.limit_checks {
                rows.push(check_row(None, c)?);
            }
            for r in &out.reports {
                for c in &r.flags {
                    rows.push(check_row(Some(&r.state), c)?);
                }
            }
            csv_bytes(&VERIFY_HEADER, rows)?
        }
    };
    emit(cfg.out().as_deref(), &bytes)?;

    if passed {
        Ok(())
    } else {
        let failed: Vec<String> = out
            .limit_checks
            .iter()
            .filter(|c| c.binding && !c.passed)
            .map(|c| c.name.clone())
            .chain(out.reports.iter().flat_map(|r| {
                r.flags
                    .iter()
                    .filter(|c| c.binding && !c.passed)
                    .map(move |c| format!("{} (n = {}, E = {})", c.name, r.state.n, r.state.energy))
            }))
            .collect();
        Err(CliError::VerificationFailed(format!(
            "binding checks failed: {}",
            failed.join(", ")
        )))
    }
}

fn check_row(state: Option<&BoundState>, c: &Check) -> Result<Vec<String>, CliError> {
    Ok(vec![
        state.map(|s| s.n.to_string()).unwrap_or_default(),
        state.map(|s| s.branch.to_string()).unwrap_or_default(),
        state.map(|s| fmt_f64(s.energy)).transpose()?.unwrap_or_default(),
        c.name.clone(),
        c.passed.to_string(),
        c.binding.to_string(),
        fmt_opt(c.value)?,
        c.detail.clone(),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub v0: f64,
    pub q: f64,
    pub count: usize,
    pub min_e: Option<f64>,
    pub max_e: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    pub m0: f64,
    pub alpha: f64,
    pub n_max: u32,
    pub rule: QuantizationRule,
    pub rows: Vec<ScanRow>,
}

fn grid(name: &str, range: (f64, f64), steps: usize) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::Validation(format!("--{name}-steps must be at least 1")));
    }
    if range.1 < range.0 {
        return Err(CliError::Validation(format!("--{name}-range must have LO <= HI")));
    }
    if steps == 1 {
        return Ok(vec![range.0]);
    }
    let step = (range.1 - range.0) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i == steps - 1 { range.1 } else { range.0 + step * i as f64 })
        .collect())
}

pub fn cmd_scan(args: &ScanArgs) -> Result<(), CliError> {
    let cfg = Resolved::new(&args.common)?;
    let f = &cfg.file;
    let c = &cfg.common;
    let m0 = cfg.required("m0", c.m0, f.m0)?;
    let alpha = cfg.required("alpha", c.alpha, f.alpha)?;
    let single = |flag: Option<f64>, file: Option<f64>| flag.or(file).map(|v| (v, v));
    let v0_range = args
        .v0_range
        .or(f.v0_range)
        .or_else(|| single(c.v0, f.v0))
        .ok_or_else(|| CliError::Validation("missing --v0-range".into()))?;
    let q_range = args
        .q_range
        .or(f.q_range)
        .or_else(|| single(c.q, f.q))
        .ok_or_else(|| CliError::Validation("missing --q-range".into()))?;
    let v0s = grid("v0", v0_range, args.v0_steps.or(f.v0_steps).unwrap_or(1))?;
    let qs = grid("q", q_range, args.q_steps.or(f.q_steps).unwrap_or(1))?;
    let opts = cfg.solve_options()?;
    let n_max = cfg.n_max();

    let points: Vec<ProblemParams> = v0s
        .iter()
        .flat_map(|&v0| qs.iter().map(move |&q| (v0, q)))
        .map(|(v0, q)| ProblemParams::new(m0, v0, alpha, q))
        .collect::<Result<_, _>>()?;
    let rows: Vec<ScanRow> = points
        .par_iter()
        .map(|p| {
            let report = spectrum::solve_spectrum_with(p, n_max, &opts);
            let energies: Vec<f64> = report.states.iter().map(|a| a.state.energy).collect();
            ScanRow {
                v0: p.v0,
                q: p.q,
                count: energies.len(),
                min_e: energies.iter().copied().reduce(f64::min),
                max_e: energies.iter().copied().reduce(f64::max),
            }
        })
        .collect();

    let out = ScanOutput {
        m0,
        alpha,
        n_max,
        rule: opts.rule,
        rows,
    };
    let bytes = match cfg.format() {
        Format::Json => to_json(&out)?.into_bytes(),
        Format::Csv => {
            let rows = out
                .rows
                .iter()
                .map(|r| {
                    Ok(vec![
                        fmt_f64(r.v0)?,
                        fmt_f64(r.q)?,
                        r.count.to_string(),
                        fmt_opt(r.min_e)?,
                        fmt_opt(r.max_e)?,
                    ])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            csv_bytes(&SCAN_HEADER, rows)?
        }
    };
    emit(cfg.out().as_deref(), &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-1,2.5").unwrap(), (-1.0, 2.5));
        assert_eq!(parse_range(" 0 , 1e-3").unwrap(), (0.0, 1e-3));
        assert!(parse_range("1").is_err());
        assert!(parse_range("a,1").is_err());
        assert!(parse_range("0,inf").is_err());
    }

    #[test]
    fn float_text_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 0.9958747449280587] {
            assert_eq!(fmt_f64(x).unwrap().parse::<f64>().unwrap(), x);
        }
        assert!(fmt_f64(f64::NAN).is_err());
    }

    #[test]
    fn json_rejects_non_finite() {
        let row = ScanRow {
            v0: f64::NAN,
            q: 1.0,
            count: 0,
            min_e: None,
            max_e: None,
        };
        assert!(matches!(to_json(&row), Err(CliError::Numerical(_))));
    }

    #[test]
    fn grids() {
        assert_eq!(grid("v0", (0.0, 1.0), 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(grid("v0", (2.0, 2.0), 1).unwrap(), vec![2.0]);
        assert!(grid("q", (1.0, 0.0), 2).is_err());
        assert!(grid("q", (0.0, 1.0), 0).is_err());
    }

    #[test]
    fn config_keys_are_checked() {
        let cfg: RunConfig = serde_json::from_str(r#"{"m0": 1, "range": [0, 2]}"#).unwrap();
        assert_eq!(cfg.range, Some((0.0, 2.0)));
        assert!(serde_json::from_str::<RunConfig>(r#"{"mass": 1}"#).is_err());
    }
}
