//! Scoring predictions against the truth and aggregating the errors.

pub mod grid;
pub mod report;
pub mod svg;

use crate::dataset::scaling::{POSITION_X, POSITION_Y};
use crate::dataset::window::{WindowRef, WindowSet};
use crate::error::{Error, Result};
use crate::predictors::{Prediction, Predictor};
use crate::simulator::{Position, MAX_POS_COUNT, TEAM_SIZE};

pub use grid::{
    distance_bin, distance_bin_bounds, distance_bin_center, err_sub, Cell, ErrSubGrid, ErrorGrid, DISTANCE_BINS,
    POS_COUNT_BINS,
};
pub use report::{read_tables, render_reports, write_tables, EvaluationTables, GridEntry, GridKind};

/// Which opponents are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subject {
    /// Zero-based opponent index; opponent 5 is `Player(4)`.
    Player(usize),
    AllOpponents,
}

impl Default for Subject {
    fn default() -> Self {
        Subject::Player(4)
    }
}

impl Subject {
    pub fn indices(self) -> std::ops::Range<usize> {
        match self {
            Subject::Player(i) => i..i + 1,
            Subject::AllOpponents => 0..TEAM_SIZE,
        }
    }

    pub fn label(self) -> String {
        match self {
            Subject::Player(i) => format!("opponent {}", i + 1),
            Subject::AllOpponents => "all opponents".into(),
        }
    }
}

pub fn sample_error(predicted: Position, accurate: Position) -> f64 {
    predicted.distance(accurate)
}

/// True position of opponent `i` at the window's last cycle.
pub fn true_position(w: &WindowRef<'_>, i: usize) -> Position {
    Position::new(POSITION_X.unscale(w.target[2 * i]), POSITION_Y.unscale(w.target[2 * i + 1]))
}

fn is_scored(w: &WindowRef<'_>, i: usize) -> bool {
    w.pos_counts[i] < MAX_POS_COUNT
}

/// Bins `predictions[k]` (for window `k` of `set`) by pos count and true
/// observer distance. Forgotten subjects are skipped.
pub fn bin_errors(predictions: &[Prediction], set: &WindowSet, subject: Subject) -> Result<ErrorGrid> {
    if predictions.len() != set.len() {
        return Err(Error::Config(format!(
            "{} predictions for {} windows",
            predictions.len(),
            set.len()
        )));
    }
    let mut grid = ErrorGrid::new();
    for (p, w) in predictions.iter().zip(set.iter()) {
        for i in subject.indices() {
            if is_scored(&w, i) {
                grid.add(w.pos_counts[i], w.distances[i], sample_error(p.positions[i], true_position(&w, i)));
            }
        }
    }
    Ok(grid)
}

/// Runs `predictor` over `set` and bins the errors.
pub fn evaluate(predictor: &Predictor, set: &WindowSet, subject: Subject) -> Result<ErrorGrid> {
    bin_errors(&predictor.predict_set(set)?, set, subject)
}

/// Refuses to score a model on matches it was trained on.
pub fn check_unseen(trained_on: &std::collections::BTreeSet<u32>, set: &WindowSet) -> Result<()> {
    match set.match_ids().intersection(trained_on).next() {
        Some(id) => Err(Error::Config(format!("match {id} is in both the training and the evaluation data"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub distance_bin: usize,
    pub method: String,
    pub count: u64,
    pub mean_error: f64,
    /// Mean error divided by the bin's centre distance.
    pub rate: f64,
}

/// Mean error over distance, normalized by distance, for each method.
pub fn distance_rate_curve(grids: &[(&str, &ErrorGrid)]) -> Vec<CurveRow> {
    let mut rows = Vec::new();
    for b in 0..DISTANCE_BINS {
        for (method, grid) in grids {
            let cell = grid.by_distance()[b];
            if let Some(mean) = cell.mean() {
                rows.push(CurveRow {
                    distance_bin: b,
                    method: method.to_string(),
                    count: cell.count,
                    mean_error: mean,
                    rate: mean / distance_bin_center(b),
                });
            }
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosCountHistogram {
    pub counts: [u64; POS_COUNT_BINS],
}

impl PosCountHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Scored subjects per pos count.
pub fn poscount_histogram(set: &WindowSet, subject: Subject) -> PosCountHistogram {
    let mut counts = [0u64; POS_COUNT_BINS];
    for w in set.iter() {
        for i in subject.indices() {
            if is_scored(&w, i) {
                counts[w.pos_counts[i] as usize] += 1;
            }
        }
    }
    PosCountHistogram { counts }
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties. `None` for fewer
/// than two points or a constant series.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_errors() {
        assert_eq!(sample_error(Position::new(10.0, 5.0), Position::new(13.0, 9.0)), 5.0);
        assert_eq!(sample_error(Position::new(1.0, 1.0), Position::new(1.0, 1.0)), 0.0);
    }

    #[test]
    fn spearman_values() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        // d = (0, 0, 1, -1) -> 1 - 6*2/(4*15) = 0.8
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 4.0, 3.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-12);
        assert_eq!(spearman(&[1.0], &[1.0]), None);
        assert_eq!(spearman(&[1.0, 2.0], &[5.0, 5.0]), None);
    }

    #[test]
    fn rate_divides_by_centre() {
        let mut g = ErrorGrid::new();
        g.add(0, 11.0, 0.5);
        let rows = distance_rate_curve(&[("last_seen", &g)]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].distance_bin, 2);
        assert!((rows[0].rate - 0.5 / 12.5).abs() < 1e-15);
    }
}
