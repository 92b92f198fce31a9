use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Moment `index` of the filter is zero when it must not be, or nonzero
    /// when it must vanish.
    #[error(
        "moment condition violated at i={index}: expected {}, got {value:e}",
        if *.expected_zero { "zero" } else { "nonzero" }
    )]
    MomentConditionViolated {
        index: usize,
        expected_zero: bool,
        value: f64,
    },

    #[error("circulant embedding is not nonnegative definite (min eigenvalue {min:e}, max {max:e})")]
    EmbeddingNotPsd { min: f64, max: f64 },

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("Hurst range [{lo}, {hi}] is not inside (0.01, 0.99)")]
    RangeTooWide { lo: f64, hi: f64 },

    #[error("path has {n} steps, filter needs at least {required}")]
    PathTooShort { n: usize, required: usize },

    #[error("need at least 2 increments, got {0}")]
    TooFewIncrements(usize),

    #[error("window at t*={t_star} has only {pairs} increment pairs (need {min})")]
    WindowTooSmall { t_star: f64, pairs: usize, min: usize },

    #[error("argument {0} outside the open interval (-1, 1)")]
    DomainError(f64),

    #[error("no closed form for filter {0}")]
    UnsupportedFilter(String),

    #[error("correlation denominator vanishes for filter {0}")]
    DegenerateDenominator(String),

    #[error("link function is not strictly increasing near H={0}")]
    NotMonotone(f64),

    #[error("no variance table available for filter {0}")]
    NoVarianceTable(String),

    #[error("quadratic variation is not positive")]
    NonPositiveVariation,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
