//! Size tuples and capacity limits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-component size of one item, e.g. `(nodes, edges)` for a graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SizeTuple(Vec<u64>);

impl SizeTuple {
    pub fn new(components: Vec<u64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("size tuple needs at least one component".into()));
        }
        Ok(Self(components))
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0; k.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0[i]
    }

    /// True when every component is `<=` the matching capacity.
    pub fn fits_within(&self, capacity: &[u64]) -> bool {
        self.0.len() == capacity.len() && self.0.iter().zip(capacity).all(|(a, b)| a <= b)
    }

    /// First component exceeding `capacity`, if any.
    pub fn first_excess(&self, capacity: &[u64]) -> Option<usize> {
        self.0.iter().zip(capacity).position(|(a, b)| a > b)
    }
}

impl From<&[u64]> for SizeTuple {
    fn from(value: &[u64]) -> Self {
        Self(value.to_vec())
    }
}

impl<const N: usize> From<[u64; N]> for SizeTuple {
    fn from(value: [u64; N]) -> Self {
        Self(value.to_vec())
    }
}

impl fmt::Display for SizeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, values: &[u64]) -> fmt::Result {
    f.write_str("(")?;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    f.write_str(")")
}

/// Per-component pack capacity. Every component is at least 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Limits(Vec<u64>);

impl Limits {
    pub fn new(capacities: Vec<u64>) -> Result<Self> {
        if capacities.is_empty() {
            return Err(Error::InvalidArgument("limits need at least one component".into()));
        }
        if let Some(i) = capacities.iter().position(|&c| c == 0) {
            return Err(Error::InvalidArgument(format!("limit component {i} must be >= 1")));
        }
        Ok(Self(capacities))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn capacities(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0[i]
    }

    pub fn as_tuple(&self) -> SizeTuple {
        SizeTuple(self.0.clone())
    }

    /// Checks that `t` fits componentwise, reporting the first offending component.
    pub fn check_fits(&self, t: &SizeTuple) -> Result<()> {
        if t.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: t.dim() });
        }
        match t.first_excess(&self.0) {
            Some(component) => Err(Error::OversizedItem { tuple: t.clone(), limits: self.as_tuple(), component }),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<u64>> for Limits {
    type Error = Error;

    fn try_from(value: Vec<u64>) -> Result<Self> {
        Limits::new(value)
    }
}

impl From<Limits> for Vec<u64> {
    fn from(value: Limits) -> Self {
        value.0
    }
}

impl fmt::Display for Limits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// Parses `a,b,...` into non-negative integers.
pub(crate) fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidArgument(format!("expected non-negative integer, got {part:?}")))
        })
        .collect()
}

impl FromStr for Limits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Limits::new(parse_u64_list(s)?)
    }
}

impl FromStr for SizeTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SizeTuple::new(parse_u64_list(s)?)
    }
}
