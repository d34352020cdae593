use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid configuration: {0}")]
    Rejected(#[source] haswme_core::Error),

    #[error("numerical failure: {0}")]
    Numerical(#[source] haswme_core::Error),

    #[error("{failed} of {total} convergence rows failed")]
    RowsFailed { failed: usize, total: usize },

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Rejected(_) => 2,
            CliError::Numerical(_) | CliError::RowsFailed { .. } | CliError::Io { .. } => 1,
        }
    }
}

impl From<haswme_core::Error> for CliError {
    fn from(e: haswme_core::Error) -> Self {
        use haswme_core::Error as E;
        match e {
            E::EigenNoConvergence { .. }
            | E::NonFiniteMatrix { .. }
            | E::SolverBreakdown { .. }
            | E::ZeroReferenceNorm(_) => CliError::Numerical(e),
            _ => CliError::Rejected(e),
        }
    }
}
