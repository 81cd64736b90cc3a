use thiserror::Error;

pub type Result<T, E = BnfError> = std::result::Result<T, E>;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BnfError {
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("signature mismatch: {left} vs {right}")]
    SignatureMismatch { left: String, right: String },
    #[error("truncation: label {label} is outside the materialized universe of {bound} labels")]
    Truncation { label: u32, bound: u32 },
    #[error("label budget exhausted on tape ({i},{j}): needs label index {needed}, budget {budget}")]
    LabelBudget { i: u32, j: u32, needed: u32, budget: u32 },
    #[error("unregistered structure id {0}")]
    Unregistered(usize),
    #[error("level {level} exceeds table capacity {max}")]
    LevelCapacity { level: usize, max: usize },
    #[error("tuple length mismatch: {left} vs {right}")]
    TupleLength { left: usize, right: usize },
    #[error("element {elem} outside domain of size {size}")]
    Element { elem: u32, size: usize },
    #[error("copies = {copies} is too small for a level-{level} query in representatives mode")]
    CopiesTooSmall { copies: u32, level: usize },
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("invalid level: {0}")]
    Level(String),
    #[error("not separable at level {0}")]
    NotSeparable(usize),
    #[error("no Pi_{0} Scott sentence at this level: {1}")]
    NoScott(usize, String),
    #[error("unbound variable x{0}")]
    Unbound(u32),
    #[error("formula: {0}")]
    Formula(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("tape: {0}")]
    Tape(String),
    #[error("horizon too small: {0}")]
    Horizon(String),
    #[error("claim {claim} failed: {detail}")]
    Claim { claim: String, detail: String },
    #[error("malformed star structure: {0}")]
    MalformedStar(String),
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("guard violation: {0}")]
    Guard(String),
    #[error("route disagreement at point {point}, label {label}: {detail}")]
    RouteDisagreement { point: String, label: u32, detail: String },
    #[error("input error at {path}: {msg}")]
    Input { path: String, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for BnfError {
    fn from(e: std::io::Error) -> Self {
        BnfError::Io(e.to_string())
    }
}
