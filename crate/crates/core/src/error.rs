use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An index array, pointer array or value violates a format invariant.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: inner dimensions {left} and {right} differ")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dense oracle would need {cells} cells (cap is {cap})")]
    OracleTooLarge { cells: u128, cap: usize },

    #[error("flop count overflows a 64-bit counter")]
    FlopOverflow,

    /// Symbolic and numeric phases disagree. Never expected on valid inputs.
    #[error("internal consistency fault: {0}")]
    InternalFault(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
