//! Maps a strategy set onto concrete item ids.
//!
//! Ids are queued per size tuple in input order. Strategies are consumed in
//! order, each expanded `count` times, and every tuple of a strategy draws
//! the next id from its queue.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::items::Item;
use crate::packer::Strategy;
use crate::size::SizeTuple;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignedPack {
    pub ids: Vec<String>,
    pub sums: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PackAssignment {
    pub packs: Vec<AssignedPack>,
}

impl PackAssignment {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("assignment serializes")
    }
}

/// Deterministic FIFO assignment.
pub fn assign(items: &[Item], strategies: &[Strategy]) -> Result<PackAssignment> {
    assign_with(items, strategies, None)
}

/// Like [`assign`], but with `seed` the per-tuple id queues are shuffled
/// first. Pack shapes are unchanged; only membership varies.
pub fn assign_with(items: &[Item], strategies: &[Strategy], seed: Option<u64>) -> Result<PackAssignment> {
    let mut seen = HashSet::with_capacity(items.len());
    for item in items {
        if !seen.insert(item.id.as_str()) {
            return Err(Error::DuplicateId(item.id.clone()));
        }
    }

    let have = Histogram::from_items(items.iter().map(|i| &i.size))?;
    let mut need = Histogram::default();
    for s in strategies {
        for t in &s.tuples {
            need.add(t.clone(), s.count)?;
        }
    }
    if have != need {
        let mut surplus = Vec::new();
        let mut deficit = Vec::new();
        let tuples: std::collections::BTreeSet<&SizeTuple> =
            have.iter().map(|(t, _)| t).chain(need.iter().map(|(t, _)| t)).collect();
        for t in tuples {
            let (h, n) = (have.count(t), need.count(t));
            if h > n {
                surplus.push((t.clone(), h - n));
            } else if n > h {
                deficit.push((t.clone(), n - h));
            }
        }
        return Err(Error::Mismatch { surplus, deficit });
    }

    let mut queues: BTreeMap<&SizeTuple, VecDeque<&str>> = BTreeMap::new();
    for item in items {
        queues.entry(&item.size).or_default().push_back(&item.id);
    }
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for queue in queues.values_mut() {
            queue.make_contiguous().shuffle(&mut rng);
        }
    }

    let mut packs = Vec::new();
    for s in strategies {
        let sums = s.sums();
        for _ in 0..s.count {
            let ids = s
                .tuples
                .iter()
                .map(|t| {
                    queues.get_mut(t).and_then(VecDeque::pop_front).map(str::to_string).expect("histograms matched")
                })
                .collect();
            packs.push(AssignedPack { ids, sums: sums.clone() });
        }
    }
    Ok(PackAssignment { packs })
}
