//! k-dimensional size histograms: construction, CSV I/O, and dataset statistics.
//!
//! CSV layout: one header row (names are not interpreted), then one row per
//! bin with the tuple components followed by the count. Lines starting with
//! `#` are comments; blank lines are ignored; duplicate tuples are summed.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::size::SizeTuple;

/// Occurrence counts of size tuples, iterated in ascending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Histogram {
    dim: usize,
    bins: BTreeMap<SizeTuple, u64>,
}

impl Histogram {
    pub fn new(dim: usize) -> Self {
        Self { dim, bins: BTreeMap::new() }
    }

    pub fn from_items<'a, I>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a SizeTuple>,
    {
        let mut items = items.into_iter().peekable();
        let mut hist = match items.peek() {
            Some(first) => Self::new(first.dim()),
            None => return Ok(Self::default()),
        };
        for item in items {
            hist.add(item.clone(), 1)?;
        }
        Ok(hist)
    }

    /// Adds `count` occurrences of `tuple`. A zero count is a no-op.
    pub fn add(&mut self, tuple: SizeTuple, count: u64) -> Result<()> {
        if self.bins.is_empty() && self.dim == 0 {
            self.dim = tuple.dim();
        }
        if tuple.dim() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: tuple.dim() });
        }
        if count > 0 {
            let slot = self.bins.entry(tuple).or_insert(0);
            *slot = slot
                .checked_add(count)
                .ok_or_else(|| Error::InvalidArgument("histogram count overflows u64".into()))?;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Number of distinct tuples.
    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn total_items(&self) -> u64 {
        self.bins.values().sum()
    }

    pub fn count(&self, tuple: &SizeTuple) -> u64 {
        self.bins.get(tuple).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SizeTuple, u64)> + '_ {
        self.bins.iter().map(|(t, &c)| (t, c))
    }

    /// Componentwise maximum over all bins; `None` when empty.
    pub fn max_tuple(&self) -> Option<SizeTuple> {
        let mut iter = self.bins.keys();
        let first = iter.next()?.components().to_vec();
        let max = iter.fold(first, |mut acc, t| {
            for (a, &b) in acc.iter_mut().zip(t.components()) {
                *a = (*a).max(b);
            }
            acc
        });
        Some(SizeTuple::from(max.as_slice()))
    }

    /// Componentwise sum over all items, counts included.
    pub fn component_totals(&self) -> Vec<u128> {
        let mut totals = vec![0u128; self.dim];
        for (t, c) in self.iter() {
            for (acc, &v) in totals.iter_mut().zip(t.components()) {
                *acc += v as u128 * c as u128;
            }
        }
        totals
    }

    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let mut width = None;
        let mut hist = Histogram::default();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            // A lone empty field is a blank line that slipped past the reader.
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            let Some(w) = width else {
                if record.len() < 2 {
                    return Err(Error::Parse {
                        line,
                        message: "header needs at least one component column and a count column".into(),
                    });
                }
                width = Some(record.len());
                hist.dim = record.len() - 1;
                continue;
            };
            if record.len() != w {
                return Err(Error::Parse { line, message: format!("expected {w} fields, found {}", record.len()) });
            }
            let components = record
                .iter()
                .take(w - 1)
                .map(|f| {
                    f.parse::<u64>().map_err(|_| Error::Parse { line, message: format!("invalid component {f:?}") })
                })
                .collect::<Result<Vec<_>>>()?;
            let raw_count = &record[w - 1];
            let count: i128 = raw_count
                .parse()
                .map_err(|_| Error::Parse { line, message: format!("invalid count {raw_count:?}") })?;
            if count <= 0 {
                return Err(Error::NegativeCount { line, count });
            }
            let count =
                u64::try_from(count).map_err(|_| Error::Parse { line, message: format!("count {count} too large") })?;
            hist.add(SizeTuple::from(components.as_slice()), count)?;
        }
        if width.is_none() {
            return Err(Error::Parse { line: 1, message: "missing header row".into() });
        }
        Ok(hist)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse(text.as_bytes())
    }

    /// Serializes to the histogram CSV format. Two-component histograms get a
    /// `nodes,edges,count` header, others `c1,...,ck,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.dim == 2 {
            out.push_str("nodes,edges,count\n");
        } else {
            let names: Vec<String> = (1..=self.dim).map(|i| format!("c{i}")).collect();
            out.push_str(&names.join(","));
            out.push_str(",count\n");
        }
        for (t, c) in self.iter() {
            for v in t.components() {
                out.push_str(&v.to_string());
                out.push(',');
            }
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn stats<T: Scalar>(&self) -> Result<DatasetStats<T>> {
        if self.is_empty() {
            return Err(Error::EmptyInput("histogram has no bins"));
        }
        let total = self.total_items();
        let max = self.max_tuple().expect("non-empty");
        let totals = self.component_totals();
        let hundred = T::from_u64(100);

        let mut mean = Vec::with_capacity(self.dim);
        let mut efficiency = Vec::with_capacity(self.dim);
        let mut speedup = Vec::with_capacity(self.dim);
        for (i, &sum) in totals.iter().enumerate() {
            let max_i = max.get(i) as u128;
            mean.push(T::from_ratio(sum, total as u128));
            if max_i == 0 {
                // nothing to pad in this component
                efficiency.push(hundred.clone());
                speedup.push(T::one());
            } else {
                let e = T::from_ratio(sum, total as u128 * max_i) * hundred.clone();
                speedup.push(potential_speedup(&e));
                efficiency.push(e);
            }
        }
        Ok(DatasetStats {
            total_items: total,
            distinct_bins: self.num_bins(),
            max: max.components().to_vec(),
            mean,
            no_packing_efficiency: efficiency,
            potential_speedup: speedup,
        })
    }
}

/// `100 / efficiency`: the padding-free upper bound on throughput gain.
/// Zero efficiency yields zero.
pub fn potential_speedup<T: Scalar>(efficiency: &T) -> T {
    if efficiency.is_zero() {
        return T::zero();
    }
    T::from_u64(100) / efficiency.clone()
}

/// Dataset-level statistics with no packing applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats<T> {
    pub total_items: u64,
    /// Number of distinct size tuples.
    pub distinct_bins: usize,
    pub max: Vec<u64>,
    pub mean: Vec<T>,
    /// `100 * mean / max` per component.
    pub no_packing_efficiency: Vec<T>,
    /// `100 / no_packing_efficiency` per component.
    pub potential_speedup: Vec<T>,
}

impl<T> DatasetStats<T> {
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> DatasetStats<U> {
        DatasetStats {
            total_items: self.total_items,
            distinct_bins: self.distinct_bins,
            max: self.max.clone(),
            mean: self.mean.iter().map(&f).collect(),
            no_packing_efficiency: self.no_packing_efficiency.iter().map(&f).collect(),
            potential_speedup: self.potential_speedup.iter().map(&f).collect(),
        }
    }
}
