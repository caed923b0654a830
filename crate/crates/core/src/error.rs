use thiserror::Error;

/// Errors raised by the transform, solver and resampling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {value} out of range [{min}, {max}] for {what}")]
    Range {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },
    #[error("shape mismatch in {what}: expected {expected}, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{0}")]
    Domain(&'static str),
    #[error("Toeplitz system is singular at order {order}")]
    Singular { order: usize },
    #[error("Gohberg-Semencul plan is invalid: leading entry x0 vanishes")]
    InvalidPlan,
    #[error("least-squares system is rank deficient")]
    RankDeficient,
    #[error("overlapping shell values disagree by {0:e}")]
    OverlapMismatch(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Shape {
            what,
            expected,
            got,
        })
    }
}
