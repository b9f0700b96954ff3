use thiserror::Error;

/// Which end of a range a rejected value fell off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeEnd {
    Below,
    Above,
}

impl std::fmt::Display for RangeEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RangeEnd::Below => write!(f, "below"),
            RangeEnd::Above => write!(f, "above"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi} have the same sign")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{context}: no convergence after {iterations} iterations (last iterate {last:?}, residual {residual:e})")]
    Convergence { context: String, iterations: usize, last: Vec<f64>, residual: f64 },

    #[error("quadrature on [{a}, {b}] did not converge (depth cap {depth} reached)")]
    Quadrature { a: f64, b: f64, depth: usize },

    #[error("value {value} is {end} the table range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64, end: RangeEnd },

    #[error("no coexistence at T = {t} (critical temperature {t_c})")]
    NoCoexistence { t: f64, t_c: f64 },

    #[error("T = {t} lies outside the traced coexistence range [{t_min}, {t_max}]")]
    Extrapolation { t: f64, t_min: f64, t_max: f64 },

    #[error("Q is not invertible at sigma0 = {sigma0} (invertibility threshold sigma* = {sigma_star}); choose sigma0 above the threshold or select a branch explicitly")]
    NonInvertible { sigma0: f64, sigma_star: f64 },

    #[error("Q = {q} has {} preimages: {branches:?}", branches.len())]
    Multivalued { q: f64, branches: Vec<f64> },

    #[error("G(T, v) = 0 has no root at v = {v}")]
    OutOfBranch { v: f64 },

    #[error("point {point:?} coincides with a source")]
    Singularity { point: [f64; 3] },

    #[error("harmonic solver did not converge in {iterations} iterations (last residual {:e})", residuals.last().copied().unwrap_or(f64::NAN))]
    Solver { iterations: usize, residuals: Vec<f64> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code: 2 for input/domain problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Bracket { .. }
            | Error::Convergence { .. }
            | Error::Quadrature { .. }
            | Error::Solver { .. }
            | Error::OutOfBranch { .. } => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
