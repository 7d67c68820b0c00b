//! Histogram-based packing of k-dimensional size tuples.
//!
//! Items are described by size tuples such as `(nodes, edges)` for graphs.
//! The packer combines items into packs whose componentwise sums stay within
//! fixed capacity limits, working on the histogram of sizes instead of on
//! individual items. Around it sit dataset statistics, baselines, reference
//! oracles, a capacity-limit sweep, id assignment, and PGM heatmaps.
//!
//! Packing decisions use exact integers. Derived metrics are generic over
//! [`Scalar`]; [`Exact`] (arbitrary-precision rationals) is the default used
//! by the CLI, and `f64`/`f32` are available for fast approximate work.

pub mod assignment;
pub mod cli;
pub mod error;
pub mod heatmap;
pub mod heuristic;
pub mod histogram;
pub mod items;
pub mod oracle;
pub mod packer;
pub mod scalar;
pub mod size;
pub mod sweep;

pub use assignment::{assign, assign_with, AssignedPack, PackAssignment};
pub use error::{Error, Result};
pub use heatmap::{write_heatmap, Channel};
pub use heuristic::{HeuristicKind, HeuristicSpec};
pub use histogram::{potential_speedup, DatasetStats, Histogram};
pub use items::{parse_items, Item};
pub use oracle::{exact_min_packs, ffd_items};
pub use packer::{
    baseline, efficiency, pack, Baseline, EfficiencyReport, MaxPerPack, PackMode, Packer, PackingResult, Strategy,
    StrategySetJson,
};
pub use scalar::Scalar;
pub use size::{Limits, SizeTuple};
pub use sweep::{
    harmonic_mean, scale_probe, select_best, sweep, AxisRange, Objective, SelectRule, SweepConfig, SweepGrid,
};

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

pub type ExactStats = DatasetStats<Exact>;
pub type Stats64 = DatasetStats<f64>;
pub type ExactGrid = SweepGrid<Exact>;
pub type Grid64 = SweepGrid<f64>;
pub type Grid32 = SweepGrid<f32>;
