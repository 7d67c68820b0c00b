//! Plain-text PGM (`P2`) rendering of two-component sweep grids.
//!
//! Rows follow the component-0 axis (ascending, top to bottom), columns the
//! component-1 axis (ascending, left to right). Pixels are percentages
//! rounded half away from zero, maxval 100. Failed cells render as 0.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sweep::SweepGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Channel {
    #[default]
    Objective,
    /// Efficiency of one component.
    Efficiency(usize),
}

impl std::str::FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "objective" {
            return Ok(Self::Objective);
        }
        s.strip_prefix("eff")
            .and_then(|i| i.parse::<usize>().ok())
            .filter(|&i| i >= 1)
            .map(|i| Self::Efficiency(i - 1))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown channel {s:?}")))
    }
}

pub fn write_heatmap<T: Scalar>(grid: &SweepGrid<T>, channel: Channel, clamp_floor: Option<u8>) -> Result<String> {
    if grid.axes.len() != 2 {
        return Err(Error::Shape(format!("heatmap needs a 2-component grid, got {}", grid.axes.len())));
    }
    let (rows, cols) = (&grid.axes[0], &grid.axes[1]);
    if rows.is_empty() || cols.is_empty() || grid.cells.len() != rows.len() * cols.len() {
        return Err(Error::Shape(format!("{} cells for a {}x{} grid", grid.cells.len(), rows.len(), cols.len())));
    }
    if let Channel::Efficiency(i) = channel {
        if i >= 2 {
            return Err(Error::InvalidArgument(format!("component {} out of range", i + 1)));
        }
    }

    let mut out = format!("P2\n{} {}\n100\n", cols.len(), rows.len());
    for (r, &row_limit) in rows.iter().enumerate() {
        let mut line = Vec::with_capacity(cols.len());
        for (c, &col_limit) in cols.iter().enumerate() {
            let cell = &grid.cells[r * cols.len() + c];
            if cell.limits != [row_limit, col_limit] {
                return Err(Error::Shape(format!("cell {:?} out of order", cell.limits)));
            }
            let value = cell.result().map(|res| match channel {
                Channel::Objective => res.objective.clone(),
                Channel::Efficiency(i) => res.efficiency[i].clone(),
            });
            let mut pixel = value.map_or(0, |v| percent_pixel(v.to_f64()));
            if let Some(floor) = clamp_floor {
                pixel = pixel.max(floor.min(100));
            }
            line.push(pixel.to_string());
        }
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

fn percent_pixel(value: f64) -> u8 {
    if value.is_nan() {
        return 0;
    }
    value.round().clamp(0.0, 100.0) as u8
}
