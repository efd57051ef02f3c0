use std::path::PathBuf;

use thiserror::Error;

/// Everything that can stop a command, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed spec `{token}`: {reason}")]
    Spec { token: String, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] urnfield_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("no convergence after {iterations} sweeps (last update {final_update:e}); field written anyway")]
    NotConverged { iterations: usize, final_update: f64 },
    #[error("{count} of {total} trajectories hit the step budget {max_steps}; output written anyway")]
    Truncated { count: usize, total: usize, max_steps: u64 },
}

impl CliError {
    /// 3 for non-convergence and truncation, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::NotConverged { .. } | Self::Truncated { .. } => 3,
            Self::Core(urnfield_core::Error::Truncated { .. }) => 3,
            _ => 2,
        }
    }
}
