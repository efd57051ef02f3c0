use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two objects that must share a shape (support bound, grid size) do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Input(String),
    /// A caller-supplied function broke its stated contract (e.g. monotonicity).
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("{count} of {total} trajectories reached max_steps = {max_steps} before the stopping threshold")]
    Truncated {
        count: usize,
        total: usize,
        max_steps: u64,
    },
}
