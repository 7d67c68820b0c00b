//! Independent reference packers used to validate the histogram packer.
//!
//! [`exact_min_packs`] solves tiny instances to optimality by branch and
//! bound. [`ffd_items`] is an item-level first-fit-decreasing packer.

use crate::error::{Error, Result};
use crate::heuristic::HeuristicSpec;
use crate::packer::{PackingResult, Strategy};
use crate::size::{Limits, SizeTuple};

pub const DEFAULT_INSTANCE_CAP: usize = 10;

/// Minimum number of packs over all feasible assignments.
pub fn exact_min_packs(items: &[SizeTuple], limits: &Limits, max_tuples_per_pack: usize) -> Result<usize> {
    exact_min_packs_capped(items, limits, max_tuples_per_pack, DEFAULT_INSTANCE_CAP)
}

pub fn exact_min_packs_capped(
    items: &[SizeTuple],
    limits: &Limits,
    max_tuples_per_pack: usize,
    cap: usize,
) -> Result<usize> {
    if items.len() > cap {
        return Err(Error::InstanceTooLarge { items: items.len(), cap });
    }
    if max_tuples_per_pack == 0 {
        return Err(Error::InvalidArgument("max tuples per pack must be >= 1".into()));
    }
    for item in items {
        limits.check_fits(item)?;
    }
    if items.is_empty() {
        return Ok(0);
    }

    let mut sorted: Vec<&[u64]> = items.iter().map(SizeTuple::components).collect();
    sorted.sort_by_key(|c| std::cmp::Reverse(c.iter().sum::<u64>()));

    let k = limits.dim();
    let mut lower = items.len().div_ceil(max_tuples_per_pack);
    for i in 0..k {
        let total: u64 = sorted.iter().map(|c| c[i]).sum();
        lower = lower.max(total.div_ceil(limits.get(i)) as usize);
    }

    let mut search = Search {
        items: &sorted,
        limits: limits.capacities(),
        max_per_pack: max_tuples_per_pack,
        packs: Vec::new(),
        best: items.len(),
        lower,
    };
    search.place(0);
    Ok(search.best)
}

struct Search<'a> {
    items: &'a [&'a [u64]],
    limits: &'a [u64],
    max_per_pack: usize,
    /// (componentwise sums, item count) per open pack
    packs: Vec<(Vec<u64>, usize)>,
    best: usize,
    lower: usize,
}

impl Search<'_> {
    fn place(&mut self, index: usize) {
        if self.best == self.lower {
            return;
        }
        if index == self.items.len() {
            self.best = self.best.min(self.packs.len());
            return;
        }
        let item = self.items[index];
        for p in 0..self.packs.len() {
            let (sums, n) = &self.packs[p];
            let fits = *n < self.max_per_pack && sums.iter().zip(item).zip(self.limits).all(|((s, v), l)| s + v <= *l);
            if !fits {
                continue;
            }
            // Identical pack states give identical subtrees.
            if self.packs[..p].iter().any(|q| q == &self.packs[p]) {
                continue;
            }
            for (s, v) in self.packs[p].0.iter_mut().zip(item) {
                *s += v;
            }
            self.packs[p].1 += 1;
            self.place(index + 1);
            for (s, v) in self.packs[p].0.iter_mut().zip(item) {
                *s -= v;
            }
            self.packs[p].1 -= 1;
        }
        // Opening a new pack: items are visited in order, so each pack's first
        // item comes after the previous pack's first item.
        if self.packs.len() + 1 < self.best {
            self.packs.push((item.to_vec(), 1));
            self.place(index + 1);
            self.packs.pop();
        }
    }
}

/// Item-level first-fit decreasing. Identical items may share a pack.
pub fn ffd_items(
    items: &[SizeTuple],
    limits: &Limits,
    max_tuples_per_pack: usize,
    heuristic: &HeuristicSpec,
) -> Result<PackingResult> {
    if items.is_empty() {
        return Err(Error::EmptyInput("no items"));
    }
    if max_tuples_per_pack == 0 {
        return Err(Error::InvalidArgument("max tuples per pack must be >= 1".into()));
    }
    if heuristic.dim() != limits.dim() {
        return Err(Error::Dimension { expected: limits.dim(), found: heuristic.dim() });
    }
    let mut keyed = items
        .iter()
        .map(|t| {
            limits.check_fits(t)?;
            Ok((heuristic.evaluate(t)?, t))
        })
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| b.cmp(a));

    let caps = limits.capacities();
    let mut packs: Vec<(Vec<SizeTuple>, Vec<u64>)> = Vec::new();
    for (_, t) in keyed {
        let slot = packs.iter().position(|(members, sums)| {
            members.len() < max_tuples_per_pack
                && sums.iter().zip(t.components()).zip(caps).all(|((s, v), l)| s + v <= *l)
        });
        match slot {
            Some(i) => {
                let (members, sums) = &mut packs[i];
                members.push(t.clone());
                for (s, v) in sums.iter_mut().zip(t.components()) {
                    *s += v;
                }
            }
            None => packs.push((vec![t.clone()], t.components().to_vec())),
        }
    }
    let strategies = packs.into_iter().map(|(members, _)| Strategy::new(members, 1)).collect();
    PackingResult::from_strategies(strategies, limits.clone(), max_tuples_per_pack)
}
