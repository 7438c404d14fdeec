use thiserror::Error;

/// Errors produced by the consistency engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("menu {menu_id}: wages must be strictly increasing in tasks")]
    NonMonotoneFrontier { menu_id: String },

    #[error("menu {menu_id}: duplicate grid point {value}")]
    DuplicateTasks { menu_id: String, value: i64 },

    #[error("{0} is not a grid point")]
    OffGrid(String),

    #[error("{0} is outside the budget domain")]
    OutOfRange(f64),

    #[error("budget {menu_id} needs at least two grid points")]
    DegenerateBudget { menu_id: String },

    #[error("graph contains a negative cycle through {cycle:?}")]
    NegativeCycle { cycle: Vec<usize> },

    #[error("menu {menu_id} has a negative frontier value; efficiency scaling needs money >= 0")]
    NegativeFrontier { menu_id: String },

    #[error("no data: {0}")]
    EmptyData(&'static str),

    #[error("empty sample")]
    EmptySample,

    #[error(
        "conditional population for {theory} is empty at alpha={alpha}; raise the number of draws"
    )]
    EmptyConditional { theory: String, alpha: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("menu {menu_id}: {message}")]
    Validation { menu_id: String, message: String },

    #[error("subject {subject_id} has no choice for menu {menu_id}")]
    MissingMenu { subject_id: String, menu_id: String },

    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },

    #[error("write failed: {0}")]
    Write(String),
}

pub type Result<T> = std::result::Result<T, Error>;
