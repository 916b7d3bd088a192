use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("q-deformed cosh vanishes at z = {z} for q = {q}")]
    Singular { z: f64, q: f64 },

    #[error("negative radicand `{which}` = {value:e}")]
    Domain { which: &'static str, value: f64 },

    #[error("Jacobi recurrence overflow: n = {n}, a = {a}, b = {b}, x = {x}")]
    JacobiOverflow { n: u32, a: f64, b: f64, x: f64 },

    #[error("factor exponents are undefined for a3 = 0 (the (1 - a3 s) factor degenerates to an exponential)")]
    DegenerateFactor,

    #[error("coordinate {value} outside {domain}")]
    Coordinate { value: f64, domain: &'static str },

    #[error("quadrature did not converge: last relative change {change:e} after {doublings} doublings")]
    NonConvergence { change: f64, doublings: u32 },

    #[error("grid too coarse: {points} points cover the support, need at least {required}")]
    GridTooCoarse { points: usize, required: usize },

    #[error("wavefunction vanishes identically on the grid")]
    ZeroFunction,

    #[error("convergence fit is degenerate: {0}")]
    FitDegenerate(String),

    #[error("quadratic eigenproblem linearization failed: {0}")]
    Linearization(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
