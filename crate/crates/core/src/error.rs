use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty instance")]
    EmptyInstance,

    #[error("value {index} does not fit in {bits} bits")]
    ValueOutOfRange { index: usize, bits: u32 },

    #[error("instance too large for exhaustive search (n = {n}, limit {limit})")]
    InstanceTooLarge { n: usize, limit: usize },

    #[error("index {k} out of range 1..={max}")]
    IndexOutOfRange { k: usize, max: usize },

    #[error("branch tree too large: n = {n} exceeds the enumeration cap {cap}")]
    BranchTreeTooLarge { n: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("n = {n} exceeds double range for the rate equation; use log-domain mode")]
    FloatRange { n: usize },

    #[error("n = {n} exceeds the field memory cap {cap}")]
    FieldTooLarge { n: usize, cap: usize },

    #[error("memory budget of {budget_bytes} bytes exceeded; largest feasible n is {largest_feasible}")]
    MemoryBudget {
        budget_bytes: usize,
        largest_feasible: u64,
    },

    #[error("argument {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("precision of {bits} bits is too low for ln n = {ln_n}")]
    Precision { bits: usize, ln_n: f64 },

    #[error("rank-deficient design matrix (condition number {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
