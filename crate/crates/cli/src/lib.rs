//! Command-line front end for `radon_svm`: dataset I/O, report rendering and
//! SVG figures.

pub mod app;
pub mod dataset;
pub mod plot;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("plotting is 2-D only (data has dimension {0})")]
    PlotDimension(usize),
    #[error(transparent)]
    Domain(#[from] radon_svm::Error),
}

impl CliError {
    /// 1 for errors about the data or the mathematics, 2 for errors in how
    /// the program was invoked or in the input format.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) | CliError::PlotDimension(_) => 1,
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
