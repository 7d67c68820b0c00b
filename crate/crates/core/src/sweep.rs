//! Capacity-limit grid search.
//!
//! Every combination of per-component limits on the grid is packed
//! independently and scored by an [`Objective`] over the per-component
//! efficiencies. Cells may be evaluated on a bounded worker pool; the grid is
//! assembled in lexicographic limit order regardless of evaluation order.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heuristic::HeuristicSpec;
use crate::histogram::Histogram;
use crate::packer::{MaxPerPack, PackMode, Packer};
use crate::scalar::Scalar;
use crate::size::Limits;

/// `k / sum(1 / e_i)`, or zero when any argument is zero.
pub fn harmonic_mean<T: Scalar>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptyInput("harmonic mean of no values"));
    }
    let hundred = T::from_u64(100);
    if let Some(bad) = values.iter().find(|v| **v < T::zero() || **v > hundred) {
        return Err(Error::InvalidArgument(format!("percentage out of range: {bad:?}")));
    }
    if values.iter().any(|v| v.is_zero()) {
        return Ok(T::zero());
    }
    let reciprocal_sum = values.iter().fold(T::zero(), |acc, v| acc + T::one() / v.clone());
    Ok(T::from_u64(values.len() as u64) / reciprocal_sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    HarmonicMean,
    MinComponent,
    ArithmeticMean,
}

impl Objective {
    pub fn score<T: Scalar>(self, efficiencies: &[T]) -> Result<T> {
        if efficiencies.is_empty() {
            return Err(Error::EmptyInput("objective of no values"));
        }
        match self {
            Self::HarmonicMean => harmonic_mean(efficiencies),
            Self::MinComponent => {
                Ok(efficiencies.iter().cloned().reduce(|a, b| if b < a { b } else { a }).expect("non-empty"))
            }
            Self::ArithmeticMean => {
                let sum = efficiencies.iter().cloned().fold(T::zero(), |a, b| a + b);
                Ok(sum / T::from_u64(efficiencies.len() as u64))
            }
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" | "harmonic_mean" => Ok(Self::HarmonicMean),
            "min" | "min_component" => Ok(Self::MinComponent),
            "mean" | "arithmetic_mean" => Ok(Self::ArithmeticMean),
            other => Err(Error::InvalidArgument(format!("unknown objective {other:?}"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HarmonicMean => "harmonic",
            Self::MinComponent => "min",
            Self::ArithmeticMean => "mean",
        })
    }
}

/// Inclusive range `from..=to` with a positive step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisRange {
    pub from: u64,
    pub to: u64,
    pub step: u64,
}

impl AxisRange {
    pub fn new(from: u64, to: u64, step: u64) -> Self {
        Self { from, to, step }
    }

    pub fn values(&self) -> Vec<u64> {
        if self.step == 0 || self.from > self.to {
            return Vec::new();
        }
        (self.from..=self.to).step_by(self.step as usize).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult<T> {
    pub efficiency: Vec<T>,
    pub objective: T,
    pub num_packs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell<T> {
    pub limits: Vec<u64>,
    /// Error message when packing this cell failed.
    pub outcome: std::result::Result<CellResult<T>, String>,
}

impl<T> Cell<T> {
    pub fn result(&self) -> Option<&CellResult<T>> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid<T> {
    /// Ascending limit values per component.
    pub axes: Vec<Vec<u64>>,
    /// Row-major over `axes`, i.e. sorted lexicographically by limits.
    pub cells: Vec<Cell<T>>,
    /// Index of the best successful cell, if any.
    pub best: Option<usize>,
}

impl<T: Scalar> SweepGrid<T> {
    pub fn best_cell(&self) -> Option<&Cell<T>> {
        self.best.map(|i| &self.cells[i])
    }

    pub fn cell(&self, limits: &[u64]) -> Option<&Cell<T>> {
        self.cells.iter().find(|c| c.limits == limits)
    }

    /// Writes `limit_1..limit_k,eff_1..eff_k,objective,num_packs`; failed
    /// cells leave the value columns empty.
    pub fn to_csv(&self, places: usize) -> String {
        let k = self.axes.len();
        let mut header: Vec<String> = (1..=k).map(|i| format!("limit_{i}")).collect();
        header.extend((1..=k).map(|i| format!("eff_{i}")));
        header.push("objective".into());
        header.push("num_packs".into());
        let mut out = header.join(",");
        out.push('\n');
        for cell in &self.cells {
            let mut row: Vec<String> = cell.limits.iter().map(u64::to_string).collect();
            match &cell.outcome {
                Ok(r) => {
                    row.extend(r.efficiency.iter().map(|e| e.to_decimal_string(places)));
                    row.push(r.objective.to_decimal_string(places));
                    row.push(r.num_packs.to_string());
                }
                Err(_) => row.extend(std::iter::repeat_n(String::new(), k + 2)),
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads a grid CSV back. Every combination of the axis values must be
    /// present exactly once.
    pub fn parse_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let width = rdr.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?.len();
        if width < 4 || (width - 2) % 2 != 0 {
            return Err(Error::Parse { line: 1, message: format!("unexpected grid header width {width}") });
        }
        let k = (width - 2) / 2;
        let mut cells = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let bad = |what: &str, f: &str| Error::Parse { line, message: format!("invalid {what} {f:?}") };
            let limits = record
                .iter()
                .take(k)
                .map(|f| f.parse::<u64>().map_err(|_| bad("limit", f)))
                .collect::<Result<Vec<_>>>()?;
            let outcome = if record.iter().skip(k).all(str::is_empty) {
                Err("failed".to_string())
            } else {
                let efficiency = record
                    .iter()
                    .skip(k)
                    .take(k)
                    .map(|f| T::parse_decimal(f).ok_or_else(|| bad("efficiency", f)))
                    .collect::<Result<Vec<_>>>()?;
                let objective = T::parse_decimal(&record[2 * k]).ok_or_else(|| bad("objective", &record[2 * k]))?;
                let num_packs = record[2 * k + 1].parse().map_err(|_| bad("num_packs", &record[2 * k + 1]))?;
                Ok(CellResult { efficiency, objective, num_packs })
            };
            cells.push(Cell { limits, outcome });
        }
        let mut axes: Vec<Vec<u64>> = (0..k).map(|i| cells.iter().map(|c| c.limits[i]).collect()).collect();
        for axis in &mut axes {
            axis.sort_unstable();
            axis.dedup();
        }
        let expected: usize = axes.iter().map(Vec::len).product();
        cells.sort_by(|a, b| a.limits.cmp(&b.limits));
        let duplicates = cells.windows(2).any(|w| w[0].limits == w[1].limits);
        if cells.len() != expected || duplicates {
            return Err(Error::Shape(format!(
                "{} cells do not form a full {} grid",
                cells.len(),
                axes.iter().map(|a| a.len().to_string()).collect::<Vec<_>>().join("x")
            )));
        }
        let best = best_index(&cells, None)?;
        Ok(Self { axes, cells, best })
    }
}

/// Sweep parameters shared by every cell.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub heuristic: HeuristicSpec,
    pub max_per_pack: MaxPerPack,
    pub mode: PackMode,
    pub objective: Objective,
    /// Worker threads; `None` uses the available parallelism, `Some(1)` runs serially.
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn new(heuristic: HeuristicSpec) -> Self {
        Self {
            heuristic,
            max_per_pack: MaxPerPack::Max,
            mode: PackMode::LongestFirst,
            objective: Objective::HarmonicMean,
            workers: None,
        }
    }
}

pub fn sweep<T: Scalar>(hist: &Histogram, ranges: &[AxisRange], config: &SweepConfig) -> Result<SweepGrid<T>> {
    if hist.is_empty() {
        return Err(Error::EmptyInput("histogram has no bins"));
    }
    if ranges.len() != hist.dim() {
        return Err(Error::Dimension { expected: hist.dim(), found: ranges.len() });
    }
    let max = hist.max_tuple().expect("non-empty");
    let mut axes = Vec::with_capacity(ranges.len());
    for (i, range) in ranges.iter().enumerate() {
        if range.step == 0 {
            return Err(Error::InvalidArgument(format!("step for component {i} must be >= 1")));
        }
        if range.from < max.get(i) {
            let mut lower = max.components().to_vec();
            lower[i] = range.from;
            return Err(Error::OversizedItem { tuple: max.clone(), limits: lower.as_slice().into(), component: i });
        }
        let values = range.values();
        if values.is_empty() {
            return Err(Error::EmptyInput("empty limit range"));
        }
        axes.push(values);
    }

    let combos = cartesian(&axes);
    let eval = |limits: &Vec<u64>| Cell { limits: limits.clone(), outcome: evaluate_cell(hist, limits, config) };
    let workers = config.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    let cells: Vec<Cell<T>> = if workers == 1 {
        combos.iter().map(eval).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
        pool.install(|| combos.par_iter().map(eval).collect())
    };
    let best = best_index(&cells, Some(&config.heuristic))?;
    Ok(SweepGrid { axes, cells, best })
}

fn evaluate_cell<T: Scalar>(
    hist: &Histogram,
    limits: &[u64],
    config: &SweepConfig,
) -> std::result::Result<CellResult<T>, String> {
    let run = || -> Result<CellResult<T>> {
        let limits = Limits::new(limits.to_vec())?;
        let result = Packer::new(limits, config.heuristic.clone())
            .max_per_pack(config.max_per_pack)
            .mode(config.mode)
            .pack(hist)?;
        let efficiency = result.efficiency::<T>();
        let objective = config.objective.score(&efficiency)?;
        Ok(CellResult { efficiency, objective, num_packs: result.num_packs() })
    };
    run().map_err(|e| e.to_string())
}

fn cartesian(axes: &[Vec<u64>]) -> Vec<Vec<u64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect()
    })
}

/// Highest objective; ties go to the smaller heuristic value of the limits
/// (when a heuristic is given), then to the lexicographically smaller limits.
fn best_index<T: Scalar>(cells: &[Cell<T>], heuristic: Option<&HeuristicSpec>) -> Result<Option<usize>> {
    let mut best: Option<(usize, &CellResult<T>, u128)> = None;
    for (i, cell) in cells.iter().enumerate() {
        let Some(result) = cell.result() else { continue };
        let size = match heuristic {
            Some(h) => h.key(&cell.limits)?,
            None => 0,
        };
        let better = match &best {
            None => true,
            Some((j, current, current_size)) => {
                result.objective > current.objective
                    || (result.objective == current.objective
                        && (size, &cell.limits) < (*current_size, &cells[*j].limits))
            }
        };
        if better {
            best = Some((i, result, size));
        }
    }
    Ok(best.map(|(i, _, _)| i))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectRule<T> {
    MaxObjective,
    /// Smallest heuristic value of the limits among cells with every
    /// component efficiency at or above the target.
    SmallestMeetingTarget(T),
}

pub fn select_best<'g, T: Scalar>(
    grid: &'g SweepGrid<T>,
    rule: &SelectRule<T>,
    heuristic: &HeuristicSpec,
) -> Result<&'g Cell<T>> {
    if grid.cells.is_empty() {
        return Err(Error::EmptyInput("grid has no cells"));
    }
    match rule {
        SelectRule::MaxObjective => {
            let index = best_index(&grid.cells, Some(heuristic))?;
            index.map(|i| &grid.cells[i]).ok_or_else(|| Error::NoFeasibleCell("every cell failed".into()))
        }
        SelectRule::SmallestMeetingTarget(target) => {
            let mut best: Option<(u128, &Cell<T>)> = None;
            for cell in &grid.cells {
                let Some(result) = cell.result() else { continue };
                if !result.efficiency.iter().all(|e| e >= target) {
                    continue;
                }
                let size = heuristic.key(&cell.limits)?;
                if best.as_ref().is_none_or(|(s, c)| (size, &cell.limits) < (*s, &c.limits)) {
                    best = Some((size, cell));
                }
            }
            best.map(|(_, c)| c)
                .ok_or_else(|| Error::NoFeasibleCell(format!("no cell reaches {target:?} in every component")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult<T> {
    pub factor: Ratio<u64>,
    pub limits: Limits,
    pub efficiency: Vec<T>,
}

/// Scales `base` by `1, 1 + step, 1 + 2 step, ...` (limits rounded up) until
/// some component reaches `target`.
pub fn scale_probe<T: Scalar>(
    hist: &Histogram,
    base: &Limits,
    factor_step: Ratio<u64>,
    target: &T,
    heuristic: &HeuristicSpec,
    max_per_pack: MaxPerPack,
    ceiling: Ratio<u64>,
) -> Result<ProbeResult<T>> {
    if factor_step <= Ratio::from_integer(0) {
        return Err(Error::InvalidArgument("factor step must be positive".into()));
    }
    let mut factor = Ratio::from_integer(1u64);
    while factor <= ceiling {
        let scaled = base
            .capacities()
            .iter()
            .map(|&b| {
                (factor * Ratio::from_integer(b))
                    .ceil()
                    .to_integer()
                    .to_u64()
                    .ok_or_else(|| Error::InvalidArgument("scaled limit overflows".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let limits = Limits::new(scaled)?;
        let result = Packer::new(limits.clone(), heuristic.clone()).max_per_pack(max_per_pack).pack(hist)?;
        let efficiency = result.efficiency::<T>();
        if efficiency.iter().any(|e| e >= target) {
            return Ok(ProbeResult { factor, limits, efficiency });
        }
        factor += factor_step;
    }
    Err(Error::NoFeasibleCell(format!("no scale factor up to {ceiling} reaches {target:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristic::HeuristicKind;
    use crate::size::SizeTuple;
    use crate::Exact;
    use num_traits::Signed;

    fn exact(n: u128, d: u128) -> Exact {
        Exact::from_ratio(n, d)
    }

    fn decimal(s: &str) -> Exact {
        Exact::parse_decimal(s).unwrap()
    }

    fn toy() -> Histogram {
        let mut h = Histogram::new(2);
        h.add(SizeTuple::from([2, 3]), 2).unwrap();
        h.add(SizeTuple::from([3, 2]), 2).unwrap();
        h
    }

    fn toy_config(workers: usize) -> SweepConfig {
        let mut c = SweepConfig::new(HeuristicSpec::unweighted(HeuristicKind::Product, 2).unwrap());
        c.max_per_pack = MaxPerPack::Limit(2);
        c.workers = Some(workers);
        c
    }

    #[test]
    fn harmonic_mean_anchors() {
        let tol = decimal("0.05");
        let a = harmonic_mean(&[decimal("76.1"), decimal("58.0")]).unwrap();
        assert!((a.clone() - decimal("65.8")).abs() <= tol, "{}", a.to_decimal_string(4));
        let b = harmonic_mean(&[decimal("98.6"), decimal("99.0")]).unwrap();
        assert!((b - decimal("98.8")).abs() <= tol);
        assert_eq!(harmonic_mean(&[exact(123, 2), exact(123, 2)]).unwrap(), exact(123, 2));
        assert_eq!(harmonic_mean(&[50.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(harmonic_mean::<f64>(&[]), Err(Error::EmptyInput(_))));
        assert!(harmonic_mean(&[101.0]).is_err());
    }

    #[test]
    fn objectives() {
        let e = [exact(80, 1), exact(100, 1)];
        assert_eq!(Objective::MinComponent.score(&e).unwrap(), exact(80, 1));
        assert_eq!(Objective::ArithmeticMean.score(&e).unwrap(), exact(90, 1));
        assert_eq!(Objective::HarmonicMean.score(&e).unwrap(), exact(800, 9));
    }

    #[test]
    fn toy_grid() {
        let ranges = [AxisRange::new(4, 5, 1), AxisRange::new(4, 5, 1)];
        let grid: SweepGrid<Exact> = sweep(&toy(), &ranges, &toy_config(1)).unwrap();
        assert_eq!(grid.cells.len(), 4);
        let best = grid.best_cell().unwrap();
        assert_eq!(best.limits, vec![5, 5]);
        assert_eq!(best.result().unwrap().efficiency, vec![exact(100, 1), exact(100, 1)]);
        let corner = grid.cell(&[4, 4]).unwrap().result().unwrap();
        assert_eq!(corner.objective.to_decimal_string(1), "83.3");

        let h = HeuristicSpec::unweighted(HeuristicKind::Product, 2).unwrap();
        let target = select_best(&grid, &SelectRule::SmallestMeetingTarget(exact(95, 1)), &h).unwrap();
        assert_eq!(target.limits, vec![5, 5]);
        assert_eq!(select_best(&grid, &SelectRule::MaxObjective, &h).unwrap().limits, vec![5, 5]);
        assert!(matches!(
            select_best(&grid, &SelectRule::SmallestMeetingTarget(exact(101, 1)), &h),
            Err(Error::NoFeasibleCell(_))
        ));
    }

    #[test]
    fn parallel_matches_serial() {
        let ranges = [AxisRange::new(3, 9, 1), AxisRange::new(3, 11, 2)];
        let serial: SweepGrid<Exact> = sweep(&toy(), &ranges, &toy_config(1)).unwrap();
        let parallel: SweepGrid<Exact> = sweep(&toy(), &ranges, &toy_config(4)).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn single_cell_equals_pack() {
        let ranges = [AxisRange::new(7, 7, 1), AxisRange::new(6, 6, 3)];
        let grid: SweepGrid<Exact> = sweep(&toy(), &ranges, &toy_config(1)).unwrap();
        let direct = Packer::new(Limits::new(vec![7, 6]).unwrap(), toy_config(1).heuristic)
            .max_per_pack(MaxPerPack::Limit(2))
            .pack(&toy())
            .unwrap();
        let cell = grid.cells[0].result().unwrap();
        assert_eq!(cell.efficiency, direct.efficiency::<Exact>());
        assert_eq!(cell.num_packs, direct.num_packs());
    }

    #[test]
    fn validation() {
        let cfg = toy_config(1);
        assert!(matches!(
            sweep::<f64>(&toy(), &[AxisRange::new(2, 5, 1), AxisRange::new(4, 5, 1)], &cfg),
            Err(Error::OversizedItem { component: 0, .. })
        ));
        assert!(matches!(
            sweep::<f64>(&toy(), &[AxisRange::new(5, 4, 1), AxisRange::new(4, 5, 1)], &cfg),
            Err(Error::EmptyInput(_))
        ));
        assert!(sweep::<f64>(&toy(), &[AxisRange::new(4, 5, 0), AxisRange::new(4, 5, 1)], &cfg).is_err());
    }

    #[test]
    fn failed_cells_are_recorded() {
        let mut h = Histogram::new(3);
        h.add(SizeTuple::from([1, 1, 1]), 1).unwrap();
        let mut cfg = SweepConfig::new(HeuristicSpec::unweighted(HeuristicKind::Product, 3).unwrap());
        cfg.workers = Some(1);
        cfg.max_per_pack = MaxPerPack::Limit(2);
        let huge = u64::MAX - 1;
        let ranges = [AxisRange::new(2, 2, 1), AxisRange::new(huge, huge, 1), AxisRange::new(huge, huge, 1)];
        let grid: SweepGrid<f64> = sweep(&h, &ranges, &cfg).unwrap();
        assert!(grid.cells[0].outcome.is_err());
        assert_eq!(grid.best, None);
        let csv = grid.to_csv(4);
        assert!(csv.lines().nth(1).unwrap().ends_with(",,,,,"));
    }

    #[test]
    fn grid_csv_round_trip() {
        let ranges = [AxisRange::new(4, 6, 1), AxisRange::new(4, 5, 1)];
        let grid: SweepGrid<Exact> = sweep(&toy(), &ranges, &toy_config(1)).unwrap();
        let text = grid.to_csv(4);
        assert!(text.starts_with("limit_1,limit_2,eff_1,eff_2,objective,num_packs\n4,4,83.3333,83.3333,83.3333,4\n"));
        let back = SweepGrid::<Exact>::parse_csv(text.as_bytes()).unwrap();
        assert_eq!(back.axes, grid.axes);
        assert_eq!(back.cells.len(), grid.cells.len());
        assert_eq!(back.best_cell().unwrap().limits, vec![5, 5]);

        let ragged = "limit_1,limit_2,eff_1,eff_2,objective,num_packs\n4,4,1,1,1,1\n4,5,1,1,1,1\n5,4,1,1,1,1\n";
        assert!(matches!(SweepGrid::<f64>::parse_csv(ragged.as_bytes()), Err(Error::Shape(_))));
    }

    #[test]
    fn probe() {
        let h = HeuristicSpec::unweighted(HeuristicKind::Product, 2).unwrap();
        let base = Limits::new(vec![4, 4]).unwrap();
        let step = Ratio::new(1, 4);
        let ceiling = Ratio::from_integer(4);
        let r = scale_probe(&toy(), &base, step, &exact(95, 1), &h, MaxPerPack::Limit(2), ceiling).unwrap();
        assert_eq!(r.factor, Ratio::new(5, 4));
        assert_eq!(r.limits.capacities(), &[5, 5]);
        assert_eq!(r.efficiency, vec![exact(100, 1), exact(100, 1)]);

        let zero = scale_probe(&toy(), &base, step, &exact(0, 1), &h, MaxPerPack::Limit(2), ceiling).unwrap();
        assert_eq!(zero.factor, Ratio::from_integer(1));
        assert_eq!(zero.limits, base);

        assert!(matches!(
            scale_probe(&toy(), &base, step, &exact(101, 1), &h, MaxPerPack::Limit(2), ceiling),
            Err(Error::NoFeasibleCell(_))
        ));
    }
}
