//! QUBO formulation toolkit for balanced-settlement problems on directed
//! weighted multigraphs.
//!
//! The pipeline: model a settlement instance (`model`), turn its per-node
//! constraints into quadratic penalties either with binary slack ladders
//! (`standard`) or with synthesized minimal-slack penalty polynomials
//! (`iqp`, `ms`, `iqpms`), assemble a sparse QUBO (`qubo`), then solve and
//! benchmark with exact enumeration or simulated annealing (`anneal`).
//!
//! Formulation methods, multiplier strategies and solvers are registered
//! behind name-keyed trait objects in `registry` so the CLI can select them
//! at runtime.

pub mod anneal;
pub mod iqp;
pub mod iqpms;
pub mod lp;
pub mod manifest;
pub mod model;
pub mod ms;
pub mod qubo;
pub mod rat;
pub mod registry;
pub mod standard;

pub use rat::Rat;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("instance validation failed:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error("unknown node id {0}")]
    UnknownNode(u32),
    #[error("assignment length {got}, expected {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("enumeration cap exceeded: {vars} variables > cap {cap}")]
    CapExceeded { vars: usize, cap: usize },
    #[error("infeasible generator parameters: {0}")]
    GeneratorInfeasible(String),
    #[error("generator gave up after {0} rejected placements")]
    GeneratorStuck(usize),
    #[error("slack owner ({node}, {tag}) already registered")]
    DuplicateOwner { node: u32, tag: String },
    #[error("logical map is not injective")]
    MappingCollision,
    #[error("slack label {0} is not covered by any block")]
    UnindexedSlack(usize),
    #[error("non-integer data at node {0}: the slack-ladder path needs integer weights and windows; use the iqpms method instead")]
    NonIntegerData(u32),
    #[error("gamma must be > 1 (got {0})")]
    GammaOutOfRange(String),
    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },
    #[error("constraint table too large: M = {0} (max {1})")]
    TableTooLarge(usize, usize),
    #[error("no penalty polynomial with at most {max_slacks} slack variables (last tried {last_tried}, {reason})")]
    SlackBudgetExhausted {
        max_slacks: usize,
        last_tried: usize,
        reason: String,
    },
    #[error("node {node} has {degree} incident arcs, outside the closed-form range [2,5]; pass --generic-fallback to synthesize its penalties")]
    DegreeOutOfRange { node: u32, degree: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
