use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed group: {0}")]
    Group(String),

    #[error("gauge overflow: element not reached within radius cap {cap}")]
    GaugeOverflow { cap: u32 },

    #[error("memory budget of {budget} elements exceeded")]
    MemoryBudget { budget: usize },

    #[error("support budget of {budget} terms exceeded")]
    SupportBudget { budget: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("action is not isometric: {0}")]
    NonIsometric(String),

    #[error("elements belong to different contexts")]
    MixedContext,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no geometric decay observed after {terms} Neumann terms (last term norm {last_norm:e})")]
    NoDecay { terms: usize, last_norm: f64 },

    #[error("tolerance not met: {0}")]
    Tolerance(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
