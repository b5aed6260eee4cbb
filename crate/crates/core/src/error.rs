use thiserror::Error;

use crate::reconstruct::CurlResidualReport;

/// Errors produced anywhere in the terrain pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed file: {0}")]
    MalformedFile(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("void data (nodata cell) at row {row}, col {col}")]
    VoidData { row: usize, col: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("model error: {0}")]
    Model(String),

    #[error(
        "gradient field is not integrable: max |residual| {}, {} violating cells",
        .0.max_abs_residual,
        .0.violation_count
    )]
    Integrability(CurlResidualReport),

    #[error("generation failed: all {attempts} attempts ended in contradiction")]
    GenerationFailed { attempts: u32 },

    #[error("logic error: {0}")]
    Logic(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
