use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the mathematical or physical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested LP3 moment does not exist (`n * beta >= 1`).
    #[error("moment of order {order} diverges for beta = {beta}")]
    Divergent { order: u32, beta: f64 },

    /// The three-moment system has no LP3 solution.
    #[error("no LP3 solution: {0}")]
    NoSolution(String),

    /// The density is unbounded at the queried point.
    #[error("density is singular at y = {0}")]
    Singular(f64),

    /// An iterative scheme stopped before meeting its tolerance.
    #[error("{what} did not converge (estimate {estimate:e}, error {error:e})")]
    NoConvergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    /// A bracketing search could not establish a valid bracket.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// Not enough samples for the requested statistic.
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// A goodness-of-fit statistic hit F(x) in {0, 1}.
    #[error("cdf reached the boundary value {value} at x = {x}")]
    Boundary { x: f64, value: f64 },

    /// Chi-squared binning left fewer than five expected counts per bin.
    #[error("expected count per bin {expected} is below 5")]
    Binning { expected: f64 },

    /// Invalid simulation or sweep configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Requested combination is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
