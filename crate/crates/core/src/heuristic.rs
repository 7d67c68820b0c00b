//! Monotone heuristics reducing a size tuple to a single integer priority key.
//!
//! Both incoming histogram bins and the remaining capacity of open packs are
//! keyed with the same heuristic. Keys are exact `u128` values; overflow is an
//! error rather than wrapping.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::size::SizeTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicKind {
    Min,
    Max,
    Sum,
    Product,
    /// Value of a single component.
    Projection(usize),
}

impl FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "min" => Self::Min,
            "max" => Self::Max,
            "sum" => Self::Sum,
            "product" => Self::Product,
            "node" => Self::Projection(0),
            "edge" => Self::Projection(1),
            other => match other.strip_prefix("projection:") {
                Some(j) => Self::Projection(
                    j.parse().map_err(|_| Error::InvalidArgument(format!("bad projection index {j:?}")))?,
                ),
                None => return Err(Error::InvalidArgument(format!("unknown heuristic {other:?}"))),
            },
        })
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Min => f.write_str("min"),
            Self::Max => f.write_str("max"),
            Self::Sum => f.write_str("sum"),
            Self::Product => f.write_str("product"),
            Self::Projection(0) => f.write_str("node"),
            Self::Projection(1) => f.write_str("edge"),
            Self::Projection(j) => write!(f, "projection:{j}"),
        }
    }
}

/// A heuristic kind together with positive integer weights, one per component.
///
/// Weighted variants apply the base function to `weights[i] * t[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeuristicSpec {
    kind: HeuristicKind,
    weights: Vec<u64>,
}

impl HeuristicSpec {
    pub fn new(kind: HeuristicKind, weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("heuristic needs at least one weight".into()));
        }
        if weights.contains(&0) {
            return Err(Error::InvalidArgument("heuristic weights must be >= 1".into()));
        }
        if let HeuristicKind::Projection(j) = kind {
            if j >= weights.len() {
                return Err(Error::InvalidArgument(format!(
                    "projection index {j} out of range for {} components",
                    weights.len()
                )));
            }
        }
        Ok(Self { kind, weights })
    }

    /// All weights equal to one.
    pub fn unweighted(kind: HeuristicKind, k: usize) -> Result<Self> {
        Self::new(kind, vec![1; k])
    }

    pub fn kind(&self) -> HeuristicKind {
        self.kind
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn evaluate(&self, t: &SizeTuple) -> Result<u128> {
        self.key(t.components())
    }

    /// Evaluates on raw components (used for pack remainders).
    pub fn key(&self, values: &[u64]) -> Result<u128> {
        if values.len() != self.weights.len() {
            return Err(Error::Dimension { expected: self.weights.len(), found: values.len() });
        }
        let mut scaled = values.iter().zip(&self.weights).map(|(&v, &w)| v as u128 * w as u128);
        Ok(match self.kind {
            HeuristicKind::Min => scaled.min().unwrap_or(0),
            HeuristicKind::Max => scaled.max().unwrap_or(0),
            HeuristicKind::Sum => scaled.try_fold(0u128, |acc, v| acc.checked_add(v)).ok_or(Error::Overflow)?,
            HeuristicKind::Product => scaled.try_fold(1u128, |acc, v| acc.checked_mul(v)).ok_or(Error::Overflow)?,
            HeuristicKind::Projection(j) => values[j] as u128 * self.weights[j] as u128,
        })
    }
}

impl fmt::Display for HeuristicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if self.weights.iter().any(|&w| w != 1) {
            let w: Vec<String> = self.weights.iter().map(u64::to_string).collect();
            write!(f, "[{}]", w.join(","))?;
        }
        Ok(())
    }
}
