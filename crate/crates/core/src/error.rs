use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle too large: {0}")]
    OracleTooLarge(String),

    #[error("infinite height is not supported by {0}")]
    InfiniteHeight(&'static str),

    #[error("singular Kasteleyn matrix (pivot {pivot:e} at column {column})")]
    SingularMatrix { pivot: f64, column: usize },

    #[error("logarithm argument {value:e} is not positive at slice pair ({i}, {j})")]
    NonPositiveLogArgument { i: usize, j: usize, value: f64 },

    #[error("series did not converge after {terms} terms (partial sum {partial_sum:e})")]
    SeriesNotConverged { terms: u64, partial_sum: f64 },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    QuadratureNotConverged { achieved: f64, requested: f64 },

    #[error("ill-conditioned fit basis (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("finite-difference noise {noise:e} exceeds tolerance {limit:e}; use smaller fd_steps")]
    DerivativeNoise { noise: f64, limit: f64 },

    #[error("not enough usable points: {got} (need {need})")]
    TooFewPoints { got: usize, need: usize },
}
