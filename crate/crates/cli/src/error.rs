use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Core(#[from] conerefine::error::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })
}

pub(crate) fn write_file(path: &str, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_string(), source })
}
