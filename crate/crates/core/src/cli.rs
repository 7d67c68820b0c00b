//! Command-line front end.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 constraint violation,
//! 4 I/O error. Diagnostics go to standard error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::heatmap::{write_heatmap, Channel};
use crate::heuristic::{HeuristicKind, HeuristicSpec};
use crate::histogram::Histogram;
use crate::items::parse_items;
use crate::packer::{baseline, Baseline, MaxPerPack, PackMode, Packer, PackingResult, StrategySetJson};
use crate::scalar::Scalar;
use crate::size::{parse_u64_list, Limits};
use crate::sweep::{select_best, sweep, AxisRange, Cell, Objective, SelectRule, SweepConfig, SweepGrid};
use crate::Exact;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CONSTRAINT: u8 = 3;
pub const EXIT_IO: u8 = 4;

const GRID_PLACES: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "tuplepack", version, about = "Pack size tuples into fixed-capacity packs with minimal padding")]
pub struct Cli {
    /// Machine-readable JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dataset statistics without packing.
    Stats { histogram: PathBuf },
    /// Pack a histogram.
    Pack(PackArgs),
    /// Evaluate a grid of capacity limits.
    Sweep(SweepArgs),
    /// Assign item ids to the packs of a strategy set.
    Assign {
        items: PathBuf,
        strategies: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Shuffle ids within each size before assignment.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render a sweep grid CSV as a PGM heatmap.
    Heatmap {
        grid: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        #[arg(long)]
        clamp_floor: Option<u8>,
        /// `objective`, `eff1`, `eff2`.
        #[arg(long, default_value = "objective")]
        channel: String,
        /// Also write the grid CSV (normalized) to this path.
        #[arg(long)]
        emit_csv: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct HeuristicArgs {
    /// min, max, sum, product, node, edge, or projection:J
    #[arg(long, default_value = "product")]
    pub heuristic: String,
    #[arg(long)]
    pub weights: Option<String>,
    /// Integer or `max`.
    #[arg(long, default_value = "max")]
    pub max_per_pack: String,
}

#[derive(Debug, Args)]
pub struct PackArgs {
    pub histogram: PathBuf,
    #[arg(long)]
    pub limits: String,
    #[command(flatten)]
    pub heuristic: HeuristicArgs,
    /// lpf or spf.
    #[arg(long, default_value = "lpf")]
    pub mode: String,
    /// none, node, or edge.
    #[arg(long)]
    pub baseline: Option<String>,
    #[arg(long)]
    pub emit_strategies: Option<PathBuf>,
    /// Seconds before packing is aborted.
    #[arg(long, default_value_t = 600)]
    pub time_budget: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub histogram: PathBuf,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[arg(long)]
    pub step: Option<String>,
    #[command(flatten)]
    pub heuristic: HeuristicArgs,
    /// harmonic, min, or mean.
    #[arg(long, default_value = "harmonic")]
    pub objective: String,
    /// Also report the smallest cell with every efficiency at or above this percentage.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, env = "TUPLEPACK_WORKERS")]
    pub workers: Option<usize>,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

/// Parses `args` (program name first) and runs the selected subcommand.
pub fn run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Parse { .. }
        | Error::NegativeCount { .. }
        | Error::Dimension { .. }
        | Error::InvalidArgument(_)
        | Error::Json(_) => EXIT_USAGE,
        Error::EmptyInput(_)
        | Error::OversizedItem { .. }
        | Error::Overflow
        | Error::InstanceTooLarge { .. }
        | Error::NoFeasibleCell(_)
        | Error::Mismatch { .. }
        | Error::DuplicateId(_)
        | Error::Shape(_)
        | Error::Timeout(_) => EXIT_CONSTRAINT,
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Stats { histogram } => stats(&read_histogram(histogram)?, cli.json, out),
        Command::Pack(args) => pack(args, cli.json, out),
        Command::Sweep(args) => run_sweep(args, cli.json, out),
        Command::Assign { items, strategies, output, seed } => {
            let items = parse_items(fs::File::open(items)?)?;
            let set: StrategySetJson = serde_json::from_str(&fs::read_to_string(strategies)?)?;
            let assignment = crate::assignment::assign_with(&items, &set.strategies()?, *seed)?;
            fs::write(output, assignment.to_json() + "\n")?;
            if cli.json {
                writeln!(out, "{}", json!({ "packs": assignment.packs.len(), "items": items.len() }))?;
            } else {
                writeln!(out, "assigned {} items to {} packs", items.len(), assignment.packs.len())?;
            }
            Ok(())
        }
        Command::Heatmap { grid, output, clamp_floor, channel, emit_csv } => {
            let channel: Channel = channel.parse()?;
            let grid = SweepGrid::<Exact>::parse_csv(fs::File::open(grid)?)?;
            let image = write_heatmap(&grid, channel, *clamp_floor)?;
            fs::write(output, &image)?;
            if let Some(path) = emit_csv {
                fs::write(path, grid.to_csv(GRID_PLACES))?;
            }
            if cli.json {
                writeln!(out, "{}", json!({ "width": grid.axes[1].len(), "height": grid.axes[0].len() }))?;
            } else {
                writeln!(out, "wrote {}x{} heatmap to {}", grid.axes[1].len(), grid.axes[0].len(), output.display())?;
            }
            Ok(())
        }
    }
}

fn read_histogram(path: &Path) -> Result<Histogram> {
    Histogram::parse(fs::File::open(path)?)
}

fn fmt_list<T: Scalar>(values: &[T], places: usize) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_decimal_string(places)).collect();
    format!("({})", parts.join(", "))
}

fn fmt_ints<T: ToString>(values: &[T]) -> String {
    let parts: Vec<String> = values.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn stats(hist: &Histogram, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let s = hist.stats::<Exact>()?;
    if as_json {
        let s64 = s.map(Scalar::to_f64);
        writeln!(out, "{}", serde_json::to_string_pretty(&s64)?)?;
        return Ok(());
    }
    writeln!(out, "total items                {}", s.total_items)?;
    writeln!(out, "distinct size tuples       {}", s.distinct_bins)?;
    writeln!(out, "max                        {}", fmt_ints(&s.max))?;
    writeln!(out, "mean                       {}", fmt_list(&s.mean, 1))?;
    writeln!(out, "no-packing efficiency (%)  {}", fmt_list(&s.no_packing_efficiency, 1))?;
    writeln!(out, "potential speedup          {}", fmt_list(&s.potential_speedup, 1))?;
    Ok(())
}

fn heuristic_spec(args: &HeuristicArgs, k: usize) -> Result<HeuristicSpec> {
    let kind: HeuristicKind = args.heuristic.parse()?;
    let weights = match &args.weights {
        Some(w) => {
            let w = parse_u64_list(w)?;
            if w.len() != k {
                return Err(Error::Dimension { expected: k, found: w.len() });
            }
            w
        }
        None => vec![1; k],
    };
    HeuristicSpec::new(kind, weights)
}

fn pack(args: &PackArgs, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let hist = read_histogram(&args.histogram)?;
    let limits: Limits = args.limits.parse()?;
    if limits.dim() != hist.dim() {
        return Err(Error::Dimension { expected: hist.dim(), found: limits.dim() });
    }
    let max_per_pack: MaxPerPack = args.heuristic.max_per_pack.parse()?;
    let result = match args.baseline.as_deref() {
        None => {
            let heuristic = heuristic_spec(&args.heuristic, limits.dim())?;
            let mode: PackMode = args.mode.parse()?;
            let deadline = Instant::now().checked_add(Duration::from_secs(args.time_budget));
            Packer::new(limits.clone(), heuristic)
                .max_per_pack(max_per_pack)
                .mode(mode)
                .deadline(deadline)
                .pack(&hist)?
        }
        Some(name) => {
            let mode = match name {
                "none" => Baseline::None,
                "node" => Baseline::SingleComponent { component: 0, limit: limits.get(0) },
                "edge" if limits.dim() > 1 => Baseline::SingleComponent { component: 1, limit: limits.get(1) },
                other => return Err(Error::InvalidArgument(format!("unknown baseline {other:?}"))),
            };
            baseline(&hist, mode, max_per_pack)?
        }
    };
    if let Some(path) = &args.emit_strategies {
        fs::write(path, result.to_json().to_pretty_string() + "\n")?;
    }
    if as_json {
        writeln!(out, "{}", result.to_json().to_pretty_string())?;
    } else {
        report_pack(&result, out)?;
    }
    Ok(())
}

fn report_pack(result: &PackingResult, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "packs                {}", result.num_packs())?;
    writeln!(out, "strategies           {}", result.strategies.len())?;
    writeln!(out, "requested limits     {}", fmt_ints(result.requested_limits.capacities()))?;
    writeln!(out, "realized limits      {}", fmt_ints(result.realized_limits()))?;
    writeln!(out, "empty slots          {}", fmt_ints(result.empty_slots()))?;
    writeln!(out, "efficiency (%)       {}", fmt_list(&result.efficiency::<Exact>(), 1))?;
    Ok(())
}

fn cell_json(cell: &Cell<Exact>) -> serde_json::Value {
    match &cell.outcome {
        Ok(r) => json!({
            "limits": cell.limits,
            "efficiency": r.efficiency.iter().map(Scalar::to_f64).collect::<Vec<_>>(),
            "objective": r.objective.to_f64(),
            "num_packs": r.num_packs,
        }),
        Err(e) => json!({ "limits": cell.limits, "error": e }),
    }
}

fn run_sweep(args: &SweepArgs, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let hist = read_histogram(&args.histogram)?;
    let k = hist.dim();
    let from = parse_u64_list(&args.from)?;
    let to = parse_u64_list(&args.to)?;
    let step = match &args.step {
        Some(s) => parse_u64_list(s)?,
        None => vec![1; k],
    };
    for list in [&from, &to, &step] {
        if list.len() != k {
            return Err(Error::Dimension { expected: k, found: list.len() });
        }
    }
    let ranges: Vec<AxisRange> = (0..k).map(|i| AxisRange::new(from[i], to[i], step[i])).collect();
    let heuristic = heuristic_spec(&args.heuristic, k)?;
    let mut config = SweepConfig::new(heuristic.clone());
    config.max_per_pack = args.heuristic.max_per_pack.parse()?;
    config.objective = args.objective.parse::<Objective>()?;
    config.workers = args.workers;

    let grid = sweep::<Exact>(&hist, &ranges, &config)?;
    fs::write(&args.output, grid.to_csv(GRID_PLACES))?;

    let best = grid.best_cell();
    let selected = match &args.target {
        Some(t) => {
            let target =
                Exact::parse_decimal(t).ok_or_else(|| Error::InvalidArgument(format!("invalid target {t:?}")))?;
            Some(select_best(&grid, &SelectRule::SmallestMeetingTarget(target), &heuristic)?)
        }
        None => None,
    };
    let failed = grid.cells.iter().filter(|c| c.outcome.is_err()).count();
    if as_json {
        let value = json!({
            "cells": grid.cells.len(),
            "failed": failed,
            "best": best.map(cell_json),
            "selected": selected.map(cell_json),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        return Ok(());
    }
    writeln!(out, "cells evaluated      {} ({} failed)", grid.cells.len(), failed)?;
    let describe = |label: &str, cell: &Cell<Exact>, out: &mut dyn Write| -> Result<()> {
        if let Ok(r) = &cell.outcome {
            writeln!(
                out,
                "{label} {} efficiency {} {} {}",
                fmt_ints(&cell.limits),
                fmt_list(&r.efficiency, 1),
                config.objective,
                r.objective.to_decimal_string(1)
            )?;
        }
        Ok(())
    };
    match best {
        Some(cell) => describe("best limits         ", cell, out)?,
        None => writeln!(out, "no cell could be packed")?,
    }
    if let Some(cell) = selected {
        describe("smallest meeting target", cell, out)?;
    }
    Ok(())
}
