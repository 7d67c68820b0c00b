#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use tuplepack::{HeuristicKind, HeuristicSpec, Histogram, Limits, PackMode, SizeTuple, Strategy};

pub fn random_histogram<R: Rng>(rng: &mut R, k: usize, max_bins: usize, max_count: u64, max_size: u64) -> Histogram {
    let mut h = Histogram::new(k);
    let bins = rng.gen_range(1..=max_bins);
    for _ in 0..bins {
        let t: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=max_size)).collect();
        h.add(SizeTuple::from(t.as_slice()), rng.gen_range(1..=max_count)).unwrap();
    }
    h
}

/// Limits at or above the histogram's componentwise maximum.
pub fn random_limits<R: Rng>(rng: &mut R, h: &Histogram, slack: u64) -> Limits {
    let max = h.max_tuple().unwrap();
    Limits::new(max.components().iter().map(|&m| m.max(1) + rng.gen_range(0..=slack)).collect()).unwrap()
}

pub fn random_heuristic<R: Rng>(rng: &mut R, k: usize) -> HeuristicSpec {
    let kind = match rng.gen_range(0..5) {
        0 => HeuristicKind::Min,
        1 => HeuristicKind::Max,
        2 => HeuristicKind::Sum,
        3 => HeuristicKind::Product,
        _ => HeuristicKind::Projection(rng.gen_range(0..k)),
    };
    let weights = (0..k).map(|_| rng.gen_range(1..=3)).collect();
    HeuristicSpec::new(kind, weights).unwrap()
}

pub fn random_mode<R: Rng>(rng: &mut R) -> PackMode {
    if rng.gen_bool(0.5) {
        PackMode::LongestFirst
    } else {
        PackMode::ShortestFirst
    }
}

pub fn expand_histogram(h: &Histogram) -> Vec<SizeTuple> {
    h.iter().flat_map(|(t, c)| std::iter::repeat_n(t.clone(), c as usize)).collect()
}

/// Efficiency recomputed from used (not empty) slots over the individual packs.
pub fn recompute_efficiency(strategies: &[Strategy], k: usize) -> Vec<BigRational> {
    let mut packs: Vec<Vec<u64>> = Vec::new();
    for s in strategies {
        let mut sums = vec![0u64; k];
        for t in &s.tuples {
            for (s, v) in sums.iter_mut().zip(t.components()) {
                *s += v;
            }
        }
        for _ in 0..s.count {
            packs.push(sums.clone());
        }
    }
    (0..k)
        .map(|i| {
            let realized = packs.iter().map(|p| p[i]).max().unwrap();
            if realized == 0 {
                return BigRational::from_integer(100.into());
            }
            let used: u64 = packs.iter().map(|p| p[i]).sum();
            BigRational::new(BigInt::from(100u64 * used), BigInt::from(packs.len() as u64 * realized))
        })
        .collect()
}

/// Straightforward one-dimensional longest-pack-first histogram packing.
///
/// Open packs are kept in an array indexed by remaining space; a length fits
/// every pack whose remaining space is at least that length.
pub fn lpf_1d(histogram: &[(u64, u64)], limit: u64, max_per_pack: usize) -> Vec<(Vec<u64>, u64)> {
    let mut bins = histogram.to_vec();
    bins.sort_by(|a, b| b.cmp(a));
    let mut open: Vec<Vec<(Vec<u64>, u64)>> = vec![Vec::new(); limit as usize + 1];
    let mut closed = Vec::new();
    for (len, count) in bins {
        let mut left = count;
        while left > 0 {
            let found = (len as usize..=limit as usize).find(|&r| !open[r].is_empty());
            match found {
                Some(space) => {
                    let (mut lens, n) = open[space].remove(0);
                    let merged = n.min(left);
                    if n > merged {
                        open[space].push((lens.clone(), n - merged));
                    }
                    lens.push(len);
                    let rest = space - len as usize;
                    if rest == 0 || lens.len() == max_per_pack {
                        closed.push((lens, merged));
                    } else {
                        open[rest].push((lens, merged));
                    }
                    left -= merged;
                }
                None => {
                    let rest = (limit - len) as usize;
                    if rest == 0 || max_per_pack == 1 {
                        closed.push((vec![len], left));
                    } else {
                        open[rest].push((vec![len], left));
                    }
                    left = 0;
                }
            }
        }
    }
    closed.extend(open.into_iter().flatten());
    closed
}
