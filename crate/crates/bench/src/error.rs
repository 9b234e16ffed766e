use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid run: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Core(#[from] mas_core::Error),
    #[error("lambda pair ({lambda_a}, {lambda_s}) does not sum to 1")]
    LambdaPair { lambda_a: f64, lambda_s: f64 },
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected columns: {0}")]
    Schema(String),
    #[error("line {line}: cannot parse `{value}` in column `{column}`")]
    Value {
        line: u64,
        column: String,
        value: String,
    },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}
