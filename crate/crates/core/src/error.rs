use std::time::Duration;

use thiserror::Error;

use crate::size::SizeTuple;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} components, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: count must be positive, found {count}")]
    NegativeCount { line: usize, count: i128 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// An item (or a pack sum, or a sweep lower bound) that does not fit the limits.
    #[error("{tuple} exceeds limits {limits} in component {component}")]
    OversizedItem { tuple: SizeTuple, limits: SizeTuple, component: usize },

    #[error("heuristic value overflows 128-bit integer arithmetic")]
    Overflow,

    #[error("instance has {items} items, exhaustive search is capped at {cap}")]
    InstanceTooLarge { items: usize, cap: usize },

    #[error("no feasible cell: {0}")]
    NoFeasibleCell(String),

    #[error("items do not match strategies (surplus: {}, deficit: {})", list(.surplus), list(.deficit))]
    Mismatch {
        /// Tuples present in the items but not required by the strategies.
        surplus: Vec<(SizeTuple, u64)>,
        /// Tuples required by the strategies but missing from the items.
        deficit: Vec<(SizeTuple, u64)>,
    },

    #[error("duplicate item id {0:?}")]
    DuplicateId(String),

    #[error("grid shape error: {0}")]
    Shape(String),

    #[error("packing exceeded time budget of {0:?}")]
    Timeout(Duration),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn list(entries: &[(SizeTuple, u64)]) -> String {
    if entries.is_empty() {
        return "none".to_string();
    }
    entries.iter().map(|(t, n)| format!("{t}x{n}")).collect::<Vec<_>>().join(" ")
}
