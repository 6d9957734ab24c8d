//! Error grids keyed by (pos count, observer distance).

use crate::error::{Error, Result};
use crate::simulator::MAX_POS_COUNT;

pub const POS_COUNT_BINS: usize = MAX_POS_COUNT as usize + 1;
pub const DISTANCE_BINS: usize = 9;
pub const DISTANCE_BIN_WIDTH: f64 = 5.0;

pub fn distance_bin(distance: f64) -> usize {
    ((distance / DISTANCE_BIN_WIDTH).floor().max(0.0) as usize).min(DISTANCE_BINS - 1)
}

/// Lower and upper edge of a distance bin; the last bin has no upper edge.
pub fn distance_bin_bounds(bin: usize) -> (f64, Option<f64>) {
    let lo = bin as f64 * DISTANCE_BIN_WIDTH;
    (lo, (bin + 1 < DISTANCE_BINS).then_some(lo + DISTANCE_BIN_WIDTH))
}

/// Representative distance of a bin; the open last bin is treated as one
/// bin width wide.
pub fn distance_bin_center(bin: usize) -> f64 {
    (bin as f64 + 0.5) * DISTANCE_BIN_WIDTH
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Cell {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Cell {
    pub fn add(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Cell) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn is_missing(&self) -> bool {
        self.count == 0
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }

    /// Population standard deviation.
    pub fn stddev(&self) -> Option<f64> {
        (self.count > 0).then(|| (self.m2 / self.count as f64).max(0.0).sqrt())
    }

    /// Cell rebuilt from a table row.
    pub fn from_summary(count: u64, mean: f64, stddev: f64) -> Self {
        if count == 0 {
            return Cell::default();
        }
        let mut cell = Self {
            count,
            mean,
            m2: stddev * stddev * count as f64,
        };
        // step m2 by ulps until the written stddev is reproduced exactly, so
        // that tables re-render byte for byte
        for _ in 0..16 {
            let s = cell.stddev().unwrap_or(0.0);
            if s == stddev {
                break;
            }
            cell.m2 = if s < stddev { cell.m2.next_up() } else { cell.m2.next_down() };
        }
        cell
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorGrid {
    cells: Vec<Cell>,
}

impl Default for ErrorGrid {
    fn default() -> Self {
        Self::new()
    }
}

impl ErrorGrid {
    pub fn new() -> Self {
        Self {
            cells: vec![Cell::default(); POS_COUNT_BINS * DISTANCE_BINS],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (POS_COUNT_BINS, DISTANCE_BINS)
    }

    pub fn add(&mut self, pos_count: u8, distance: f64, error: f64) {
        let pc = (pos_count as usize).min(POS_COUNT_BINS - 1);
        self.cells[pc * DISTANCE_BINS + distance_bin(distance)].add(error);
    }

    pub fn cell(&self, pos_count: usize, distance_bin: usize) -> &Cell {
        &self.cells[pos_count * DISTANCE_BINS + distance_bin]
    }

    pub fn cell_mut(&mut self, pos_count: usize, distance_bin: usize) -> &mut Cell {
        &mut self.cells[pos_count * DISTANCE_BINS + distance_bin]
    }

    pub fn total_count(&self) -> u64 {
        self.cells.iter().map(|c| c.count).sum()
    }

    /// Cells merged over distance, one per pos count.
    pub fn by_pos_count(&self) -> Vec<Cell> {
        (0..POS_COUNT_BINS)
            .map(|pc| self.merged(|p, _| p == pc))
            .collect()
    }

    /// Cells merged over pos count, one per distance bin.
    pub fn by_distance(&self) -> Vec<Cell> {
        (0..DISTANCE_BINS).map(|b| self.merged(|_, d| d == b)).collect()
    }

    /// All cells satisfying `keep(pos_count, distance_bin)` merged into one.
    pub fn merged(&self, keep: impl Fn(usize, usize) -> bool) -> Cell {
        let mut out = Cell::default();
        for pc in 0..POS_COUNT_BINS {
            for d in 0..DISTANCE_BINS {
                if keep(pc, d) {
                    out.merge(self.cell(pc, d));
                }
            }
        }
        out
    }
}

/// Per-cell `second.mean - first.mean`; positive where `first` is better.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrSubGrid {
    pub min_count: u64,
    cells: Vec<Option<f64>>,
    counts: Vec<(u64, u64)>,
}

impl ErrSubGrid {
    pub fn get(&self, pos_count: usize, distance_bin: usize) -> Option<f64> {
        self.cells[pos_count * DISTANCE_BINS + distance_bin]
    }

    /// Sample counts of the two source cells.
    pub fn counts(&self, pos_count: usize, distance_bin: usize) -> (u64, u64) {
        self.counts[pos_count * DISTANCE_BINS + distance_bin]
    }

    pub fn populated(&self) -> usize {
        self.cells.iter().flatten().count()
    }
}

pub fn err_sub(first: &ErrorGrid, second: &ErrorGrid, min_count: u64) -> Result<ErrSubGrid> {
    if first.shape() != second.shape() {
        return Err(Error::Config(format!(
            "cannot subtract grids of shapes {:?} and {:?}",
            first.shape(),
            second.shape()
        )));
    }
    let mut cells = Vec::with_capacity(first.cells.len());
    let mut counts = Vec::with_capacity(first.cells.len());
    for (a, b) in first.cells.iter().zip(&second.cells) {
        counts.push((a.count, b.count));
        let present = a.count >= min_count.max(1) && b.count >= min_count.max(1);
        cells.push(present.then_some(b.mean - a.mean));
    }
    Ok(ErrSubGrid {
        min_count,
        cells,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins() {
        assert_eq!(distance_bin(3.2), 0);
        assert_eq!(distance_bin(5.0), 1);
        assert_eq!(distance_bin(39.99), 7);
        assert_eq!(distance_bin(40.0), 8);
        assert_eq!(distance_bin(400.0), 8);
        assert_eq!(distance_bin_bounds(8), (40.0, None));
        assert_eq!(distance_bin_bounds(0), (0.0, Some(5.0)));
        assert_eq!(distance_bin_center(2), 12.5);
    }

    #[test]
    fn cell_statistics() {
        let mut c = Cell::default();
        for x in [1.0, 2.0, 3.0, 4.0] {
            c.add(x);
        }
        assert_eq!(c.mean(), Some(2.5));
        assert!((c.stddev().unwrap() - 1.25f64.sqrt()).abs() < 1e-12);
        let mut a = Cell::default();
        let mut b = Cell::default();
        [1.0, 2.0].iter().for_each(|&x| a.add(x));
        [3.0, 4.0].iter().for_each(|&x| b.add(x));
        a.merge(&b);
        assert!((a.mean - c.mean).abs() < 1e-12 && (a.m2 - c.m2).abs() < 1e-12);
        assert_eq!(Cell::default().mean(), None);
    }

    #[test]
    fn err_sub_sign_and_guard() {
        let mut first = ErrorGrid::new();
        let mut second = ErrorGrid::new();
        for _ in 0..30 {
            first.add(4, 12.0, 1.0);
            second.add(4, 12.0, 3.0);
        }
        second.add(5, 12.0, 3.0);
        first.add(5, 12.0, 1.0);
        let s = err_sub(&first, &second, 30).unwrap();
        assert_eq!(s.get(4, 2), Some(2.0));
        assert_eq!(s.get(5, 2), None);
        assert_eq!(s.populated(), 1);
        let same = err_sub(&first, &first, 30).unwrap();
        assert_eq!(same.get(4, 2), Some(0.0));
    }
}
