use thiserror::Error;

/// Errors raised by input validation and by procedures called outside their domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: at least one value is required")]
    Empty,
    #[error("value at index {index} is NaN")]
    NaN { index: usize },
    #[error("value at index {index} is out of range: {value}")]
    OutOfRange { index: usize, value: f64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

/// A uniform draw used by the randomized procedures must lie in (0, 1].
pub(crate) fn check_unit_open_closed(u: f64, what: &str) -> Result<()> {
    if u > 0.0 && u <= 1.0 {
        Ok(())
    } else {
        domain(format!("{what} must lie in (0, 1], got {u}"))
    }
}

pub(crate) fn check_unit_closed(u: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        domain(format!("{what} must lie in [0, 1], got {u}"))
    }
}
