//! Tuple histogram packing (longest-pack-first and shortest-pack-first).
//!
//! Bins of the histogram are processed in descending heuristic order. Open
//! packs live in buckets keyed by the heuristic of their remaining capacity.
//! An incoming bin is merged into the first pack that fits, scanning buckets
//! from the smallest key `>=` its own priority upward (longest-pack-first) or
//! from the largest key downward (shortest-pack-first). Merging splits the
//! pack's repeat count, so a whole bin of identical items is placed in one
//! step. After every merge the scan restarts, because the new pack may accept
//! the remaining copies. Bins that fit nowhere open new single-tuple packs
//! carrying all of their remaining copies.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristic::{HeuristicKind, HeuristicSpec};
use crate::histogram::Histogram;
use crate::scalar::Scalar;
use crate::size::{Limits, SizeTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PackMode {
    /// Best-fit: fullest fitting pack first.
    #[default]
    LongestFirst,
    /// First-fit from the emptiest pack.
    ShortestFirst,
}

impl FromStr for PackMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lpf" | "longest-first" => Ok(Self::LongestFirst),
            "spf" | "shortest-first" => Ok(Self::ShortestFirst),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

/// Upper bound on the number of tuples in one pack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaxPerPack {
    Limit(usize),
    /// Smallest component of the limits.
    Max,
}

impl MaxPerPack {
    pub fn resolve(self, limits: &Limits) -> Result<usize> {
        match self {
            Self::Limit(0) => Err(Error::InvalidArgument("max tuples per pack must be >= 1".into())),
            Self::Limit(n) => Ok(n),
            Self::Max => {
                let min = limits.capacities().iter().copied().min().unwrap_or(1);
                Ok(usize::try_from(min).unwrap_or(usize::MAX))
            }
        }
    }
}

impl FromStr for MaxPerPack {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "max" {
            return Ok(Self::Max);
        }
        s.parse()
            .map(Self::Limit)
            .map_err(|_| Error::InvalidArgument(format!("expected integer or \"max\", got {s:?}")))
    }
}

impl fmt::Display for MaxPerPack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Limit(n) => write!(f, "{n}"),
            Self::Max => f.write_str("max"),
        }
    }
}

/// One combination of tuples and how many identical packs use it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    pub tuples: Vec<SizeTuple>,
    pub count: u64,
}

impl Strategy {
    pub fn new(tuples: Vec<SizeTuple>, count: u64) -> Self {
        Self { tuples, count }
    }

    pub fn sums(&self) -> Vec<u64> {
        let k = self.tuples.first().map_or(0, SizeTuple::dim);
        let mut sums = vec![0u64; k];
        for t in &self.tuples {
            for (s, &v) in sums.iter_mut().zip(t.components()) {
                *s += v;
            }
        }
        sums
    }
}

/// Padding summary of a strategy set, measured against its realized limits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfficiencyReport {
    /// Componentwise maximum pack sum.
    pub realized_limits: Vec<u64>,
    /// Unused slots per component against the realized limits, summed over all packs.
    pub empty_slots: Vec<u128>,
    pub num_packs: u64,
}

impl EfficiencyReport {
    /// `100 * (1 - empty / (num_packs * realized))` per component; a component
    /// whose realized limit is zero has nothing to pad and reports 100.
    pub fn efficiency<T: Scalar>(&self) -> Vec<T> {
        self.realized_limits
            .iter()
            .zip(&self.empty_slots)
            .map(|(&realized, &empty)| {
                let capacity = self.num_packs as u128 * realized as u128;
                if capacity == 0 {
                    T::from_u64(100)
                } else {
                    T::from_ratio(capacity - empty, capacity) * T::from_u64(100)
                }
            })
            .collect()
    }
}

/// Computes realized limits, empty slots, and pack count for a strategy set.
pub fn efficiency(strategies: &[Strategy], requested_limits: &Limits) -> Result<EfficiencyReport> {
    if strategies.is_empty() {
        return Err(Error::EmptyInput("strategy list is empty"));
    }
    let k = requested_limits.dim();
    let sums: Vec<Vec<u64>> = strategies.iter().map(Strategy::sums).collect();
    for (s, strategy) in sums.iter().zip(strategies) {
        if strategy.tuples.is_empty() {
            return Err(Error::InvalidArgument("strategy without tuples".into()));
        }
        requested_limits.check_fits(&SizeTuple::from(s.as_slice()))?;
    }
    let mut realized = vec![0u64; k];
    for s in &sums {
        for (r, &v) in realized.iter_mut().zip(s) {
            *r = (*r).max(v);
        }
    }
    let mut empty = vec![0u128; k];
    let mut num_packs = 0u64;
    for (s, strategy) in sums.iter().zip(strategies) {
        num_packs += strategy.count;
        for i in 0..k {
            empty[i] += strategy.count as u128 * (realized[i] - s[i]) as u128;
        }
    }
    Ok(EfficiencyReport { realized_limits: realized, empty_slots: empty, num_packs })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingResult {
    pub strategies: Vec<Strategy>,
    pub requested_limits: Limits,
    pub max_tuples_per_pack: usize,
    pub report: EfficiencyReport,
}

impl PackingResult {
    pub fn from_strategies(
        strategies: Vec<Strategy>,
        requested_limits: Limits,
        max_tuples_per_pack: usize,
    ) -> Result<Self> {
        let report = efficiency(&strategies, &requested_limits)?;
        Ok(Self { strategies, requested_limits, max_tuples_per_pack, report })
    }

    pub fn num_packs(&self) -> u64 {
        self.report.num_packs
    }

    pub fn realized_limits(&self) -> &[u64] {
        &self.report.realized_limits
    }

    pub fn empty_slots(&self) -> &[u128] {
        &self.report.empty_slots
    }

    pub fn efficiency<T: Scalar>(&self) -> Vec<T> {
        self.report.efficiency()
    }

    /// Multiset of all packed tuples, expanded by strategy counts.
    pub fn packed_histogram(&self) -> Result<Histogram> {
        let mut h = Histogram::new(self.requested_limits.dim());
        for s in &self.strategies {
            for t in &s.tuples {
                h.add(t.clone(), s.count)?;
            }
        }
        Ok(h)
    }

    pub fn to_json(&self) -> StrategySetJson {
        StrategySetJson {
            k: self.requested_limits.dim(),
            requested_limits: self.requested_limits.capacities().to_vec(),
            realized_limits: self.report.realized_limits.clone(),
            efficiency: self.efficiency::<f64>(),
            num_packs: Some(self.report.num_packs),
            empty_slots: Some(self.report.empty_slots.iter().map(|&e| e as u64).collect()),
            max_tuples_per_pack: Some(self.max_tuples_per_pack),
            strategies: self
                .strategies
                .iter()
                .map(|s| StrategyJson {
                    tuples: s.tuples.iter().map(|t| t.components().to_vec()).collect(),
                    count: s.count,
                })
                .collect(),
        }
    }
}

/// Strategy-set file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySetJson {
    pub k: usize,
    pub requested_limits: Vec<u64>,
    pub realized_limits: Vec<u64>,
    pub efficiency: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_packs: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empty_slots: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tuples_per_pack: Option<usize>,
    pub strategies: Vec<StrategyJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyJson {
    pub tuples: Vec<Vec<u64>>,
    pub count: u64,
}

impl StrategySetJson {
    pub fn to_pretty_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy set serializes")
    }

    /// Validated strategies (dimension `k`, positive counts).
    pub fn strategies(&self) -> Result<Vec<Strategy>> {
        self.strategies
            .iter()
            .map(|s| {
                if s.count == 0 {
                    return Err(Error::InvalidArgument("strategy count must be >= 1".into()));
                }
                let tuples = s
                    .tuples
                    .iter()
                    .map(|c| {
                        if c.len() != self.k {
                            return Err(Error::Dimension { expected: self.k, found: c.len() });
                        }
                        Ok(SizeTuple::from(c.as_slice()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Strategy::new(tuples, s.count))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
struct OpenPack {
    tuples: Vec<SizeTuple>,
    sums: Vec<u64>,
    count: u64,
}

impl OpenPack {
    fn fits(&self, t: &SizeTuple, limits: &[u64]) -> bool {
        self.sums.iter().zip(t.components()).zip(limits).all(|((s, v), l)| s + v <= *l)
    }
}

#[derive(Debug)]
struct Bucket {
    /// Creation order, used when flattening.
    seq: u64,
    packs: Vec<OpenPack>,
}

/// Configurable histogram packer.
#[derive(Debug, Clone)]
pub struct Packer {
    limits: Limits,
    heuristic: HeuristicSpec,
    max_per_pack: MaxPerPack,
    mode: PackMode,
    deadline: Option<Instant>,
}

impl Packer {
    pub fn new(limits: Limits, heuristic: HeuristicSpec) -> Self {
        Self { limits, heuristic, max_per_pack: MaxPerPack::Max, mode: PackMode::LongestFirst, deadline: None }
    }

    pub fn max_per_pack(mut self, max: MaxPerPack) -> Self {
        self.max_per_pack = max;
        self
    }

    pub fn mode(mut self, mode: PackMode) -> Self {
        self.mode = mode;
        self
    }

    /// Abort with [`Error::Timeout`] once `deadline` has passed.
    pub fn deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn pack(&self, hist: &Histogram) -> Result<PackingResult> {
        let k = self.limits.dim();
        if hist.is_empty() {
            return Err(Error::EmptyInput("histogram has no bins"));
        }
        if hist.dim() != k {
            return Err(Error::Dimension { expected: k, found: hist.dim() });
        }
        if self.heuristic.dim() != k {
            return Err(Error::Dimension { expected: k, found: self.heuristic.dim() });
        }
        for (t, _) in hist.iter() {
            self.limits.check_fits(t)?;
        }
        let max_per_pack = self.max_per_pack.resolve(&self.limits)?;
        let limits = self.limits.capacities();
        let max_key = self.heuristic.key(limits)?;
        let started = Instant::now();

        let mut order: Vec<(u128, &SizeTuple, u64)> =
            hist.iter().map(|(t, c)| Ok((self.heuristic.evaluate(t)?, t, c))).collect::<Result<_>>()?;
        order.sort_unstable_by(|a, b| b.cmp(a));

        let mut open: BTreeMap<u128, Bucket> = BTreeMap::new();
        let mut closed: IndexMap<u128, Vec<OpenPack>> = IndexMap::new();
        let mut next_seq = 0u64;
        let mut push_open = |open: &mut BTreeMap<u128, Bucket>, key: u128, pack: OpenPack| {
            open.entry(key)
                .or_insert_with(|| {
                    next_seq += 1;
                    Bucket { seq: next_seq, packs: Vec::new() }
                })
                .packs
                .push(pack);
        };

        let mut steps = 0u64;
        for (priority, tuple, count) in order {
            let mut remaining = count;
            while remaining > 0 {
                steps += 1;
                if steps.is_multiple_of(256) {
                    if let Some(deadline) = self.deadline {
                        if Instant::now() >= deadline {
                            return Err(Error::Timeout(started.elapsed()));
                        }
                    }
                }
                match self.find_pack(&open, priority, tuple) {
                    Some((key, index)) => {
                        let bucket = open.get_mut(&key).expect("bucket found by scan");
                        let mut pack = bucket.packs.remove(index);
                        let merged = pack.count.min(remaining);
                        if pack.count > merged {
                            bucket.packs.push(OpenPack { count: pack.count - merged, ..pack.clone() });
                        }
                        if bucket.packs.is_empty() {
                            open.remove(&key);
                        }
                        pack.tuples.push(tuple.clone());
                        for (s, &v) in pack.sums.iter_mut().zip(tuple.components()) {
                            *s += v;
                        }
                        pack.count = merged;
                        let new_key = self.remainder_key(&pack.sums)?;
                        if new_key == 0 || pack.tuples.len() >= max_per_pack {
                            closed.entry(0).or_default().push(pack);
                        } else {
                            push_open(&mut open, new_key, pack);
                        }
                        remaining -= merged;
                    }
                    None => {
                        let pack = OpenPack {
                            tuples: vec![tuple.clone()],
                            sums: tuple.components().to_vec(),
                            count: remaining,
                        };
                        let new_key = self.remainder_key(&pack.sums)?;
                        if new_key == 0 || max_per_pack == 1 {
                            closed.entry(new_key).or_default().push(pack);
                        } else {
                            push_open(&mut open, new_key, pack);
                        }
                        remaining = 0;
                    }
                }
            }
        }
        debug_assert!(max_key >= open.keys().next_back().copied().unwrap_or(0));

        // Closed packs first, then open buckets in creation order; a bucket
        // whose key already holds closed packs is appended to that group.
        let mut buckets: Vec<(u128, Bucket)> = open.into_iter().collect();
        buckets.sort_by_key(|(_, b)| b.seq);
        for (key, bucket) in buckets {
            closed.entry(key).or_default().extend(bucket.packs);
        }
        let strategies = closed.into_values().flatten().map(|p| Strategy::new(p.tuples, p.count)).collect();
        PackingResult::from_strategies(strategies, self.limits.clone(), max_per_pack)
    }

    fn remainder_key(&self, sums: &[u64]) -> Result<u128> {
        let remainder: Vec<u64> = self.limits.capacities().iter().zip(sums).map(|(l, s)| l - s).collect();
        self.heuristic.key(&remainder)
    }

    fn find_pack(&self, open: &BTreeMap<u128, Bucket>, priority: u128, tuple: &SizeTuple) -> Option<(u128, usize)> {
        let limits = self.limits.capacities();
        let scan = |(key, bucket): (&u128, &Bucket)| {
            bucket.packs.iter().position(|p| p.fits(tuple, limits)).map(|i| (*key, i))
        };
        // A pack that fits has remainder >= tuple componentwise, hence key >= priority.
        match self.mode {
            PackMode::LongestFirst => open.range(priority..).find_map(scan),
            PackMode::ShortestFirst => open.range(priority..).rev().find_map(scan),
        }
    }
}

/// Packs `hist` into packs bounded by `limits`.
pub fn pack(
    hist: &Histogram,
    limits: &Limits,
    max_per_pack: MaxPerPack,
    heuristic: &HeuristicSpec,
    mode: PackMode,
) -> Result<PackingResult> {
    Packer::new(limits.clone(), heuristic.clone()).max_per_pack(max_per_pack).mode(mode).pack(hist)
}

/// Reference configurations without tuple-aware packing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// Every item in its own pack.
    None,
    /// Pack on one component only; the other components are effectively unbounded.
    SingleComponent { component: usize, limit: u64 },
}

pub fn baseline(hist: &Histogram, mode: Baseline, max_per_pack: MaxPerPack) -> Result<PackingResult> {
    if hist.is_empty() {
        return Err(Error::EmptyInput("histogram has no bins"));
    }
    let k = hist.dim();
    match mode {
        Baseline::None => {
            let max = hist.max_tuple().expect("non-empty");
            let requested = Limits::new(max.components().iter().map(|&m| m.max(1)).collect())?;
            let strategies = hist.iter().map(|(t, c)| Strategy::new(vec![t.clone()], c)).collect();
            PackingResult::from_strategies(strategies, requested, 1)
        }
        Baseline::SingleComponent { component, limit } => {
            if component >= k {
                return Err(Error::InvalidArgument(format!("component {component} out of range for {k} components")));
            }
            // The total of a component over the whole dataset can never be exceeded.
            let totals = hist.component_totals();
            let capacities = (0..k)
                .map(|i| {
                    if i == component {
                        Ok(limit)
                    } else {
                        u64::try_from(totals[i].max(1))
                            .map_err(|_| Error::InvalidArgument("component total overflows u64".into()))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let limits = Limits::new(capacities)?;
            let heuristic = HeuristicSpec::unweighted(HeuristicKind::Projection(component), k)?;
            // "max" resolves against the packed component only.
            let max_per_pack = match max_per_pack {
                MaxPerPack::Max => MaxPerPack::Limit(usize::try_from(limit).unwrap_or(usize::MAX)),
                other => other,
            };
            pack(hist, &limits, max_per_pack, &heuristic, PackMode::LongestFirst)
        }
    }
}
