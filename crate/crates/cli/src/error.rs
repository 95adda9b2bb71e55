use thiserror::Error;

/// Failure modes of a run, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Schema or value violation in the configuration (exit 1).
    #[error("config error: {0}")]
    Config(String),

    /// A solver failed to converge at a grid point (exit 2).
    #[error("non-convergence at {point}: {source}")]
    NonConvergence { point: String, source: owisac_core::Error },

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    /// Any other library failure (exit 3).
    #[error("{context}: {source}")]
    Core {
        context: String,
        source: owisac_core::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::NonConvergence { .. } => 2,
            CliError::Io { .. } | CliError::Core { .. } => 3,
        }
    }

    /// Classifies a library error raised while evaluating `point`.
    pub fn at(point: impl Into<String>, e: owisac_core::Error) -> Self {
        let point = point.into();
        match e {
            owisac_core::Error::NonConvergence(_) => CliError::NonConvergence { point, source: e },
            owisac_core::Error::Domain(_)
            | owisac_core::Error::Parse(_)
            | owisac_core::Error::Alias { .. }
            | owisac_core::Error::Window { .. }
            | owisac_core::Error::InfeasibleConstraint { .. } => CliError::Config(format!("{point}: {e}")),
            owisac_core::Error::Invariant(_) => CliError::Core {
                context: point,
                source: e,
            },
        }
    }
}
