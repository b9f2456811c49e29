use pgc_core::GeometryError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad spec file or config.
    #[error("{0}")]
    Spec(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Geometry(GeometryError::Invalid(_)) => 2,
            CliError::Geometry(e) if e.is_inadmissible() => 1,
            CliError::Geometry(_) | CliError::Io(_) => 3,
        }
    }
}
