use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length {len} is not divisible by 2^{levels}")]
    NonDyadic { len: usize, levels: usize },
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("size guard exceeded: {0}")]
    TooLarge(String),
    #[error("solver diverged at iteration {iter} (non-finite objective); try a smaller step size")]
    Divergence { iter: usize },
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
    #[error("malformed image: {0}")]
    Format(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}
