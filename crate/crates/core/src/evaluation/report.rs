//! Evaluation tables on disk and the figures and summary rendered from them.
//!
//! `write_tables` stores every error grid plus the derived err_sub grids,
//! distance-rate curves and pos-count histograms under `grids/`, with an
//! `index.tsv` naming them. `render_reports` only needs the error grids and
//! the index, so re-rendering from the same tables is byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::grid::{distance_bin_bounds, err_sub, Cell, ErrSubGrid, ErrorGrid, DISTANCE_BINS, POS_COUNT_BINS};
use super::svg::{bar_chart, heatmap, line_chart, BarChart, ColorScale, Heatmap, LineChart, Series};
use super::{distance_rate_curve, CurveRow, Subject};

const GRID_COLUMNS: &str = "pos_count_bin\tdistance_bin_lo\tdistance_bin_hi\tcount\tmean_error_m\tstddev_m";
const INDEX_MAGIC: &str = "#ssdenoise-eval";
/// Pos counts from which the models are expected to beat the baseline.
pub const STALE_FROM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Error,
    ErrSub,
    Curve,
    Histogram,
}

impl GridKind {
    fn name(self) -> &'static str {
        match self {
            GridKind::Error => "error",
            GridKind::ErrSub => "errsub",
            GridKind::Curve => "curve",
            GridKind::Histogram => "histogram",
        }
    }
}

/// One method's error grid at one lookback.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub lookback: usize,
    pub method: String,
    pub grid: ErrorGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationTables {
    pub subject: Subject,
    pub min_count: u64,
    pub grids: Vec<GridEntry>,
    /// `(lookback, first, second)`: err_sub panels, positive where `first` wins.
    pub comparisons: Vec<(usize, String, String)>,
    /// Method whose grid provides the pos-count histogram.
    pub baseline: String,
}

impl EvaluationTables {
    pub fn grid(&self, lookback: usize, method: &str) -> Option<&ErrorGrid> {
        self.grids
            .iter()
            .find(|g| g.lookback == lookback && g.method == method)
            .map(|g| &g.grid)
    }

    pub fn lookbacks(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.grids.iter().map(|g| g.lookback).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    fn methods(&self, lookback: usize) -> Vec<&str> {
        self.grids
            .iter()
            .filter(|g| g.lookback == lookback)
            .map(|g| g.method.as_str())
            .collect()
    }

    pub fn err_sub(&self, lookback: usize, first: &str, second: &str) -> Result<ErrSubGrid> {
        let missing = |m: &str| Error::Config(format!("no error grid for `{m}` at lookback {lookback}"));
        let a = self.grid(lookback, first).ok_or_else(|| missing(first))?;
        let b = self.grid(lookback, second).ok_or_else(|| missing(second))?;
        err_sub(a, b, self.min_count)
    }

    pub fn curve(&self, lookback: usize) -> Vec<CurveRow> {
        let grids: Vec<(&str, &ErrorGrid)> = self
            .grids
            .iter()
            .filter(|g| g.lookback == lookback)
            .map(|g| (g.method.as_str(), &g.grid))
            .collect();
        distance_rate_curve(&grids)
    }
}

fn subject_key(s: Subject) -> String {
    match s {
        Subject::Player(i) => format!("opponent{}", i + 1),
        Subject::AllOpponents => "all".into(),
    }
}

fn parse_subject(text: &str) -> Option<Subject> {
    if text == "all" {
        return Some(Subject::AllOpponents);
    }
    let n: usize = text.strip_prefix("opponent")?.parse().ok()?;
    (1..=11).contains(&n).then(|| Subject::Player(n - 1))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("NA".into(), |v| v.to_string())
}

fn hi_text(hi: Option<f64>) -> String {
    hi.map_or("inf".into(), |h| h.to_string())
}

pub fn grid_tsv(grid: &ErrorGrid) -> String {
    let mut s = String::from(GRID_COLUMNS);
    s.push('\n');
    for pc in 0..POS_COUNT_BINS {
        for d in 0..DISTANCE_BINS {
            let c = grid.cell(pc, d);
            let (lo, hi) = distance_bin_bounds(d);
            let _ = writeln!(
                s,
                "{pc}\t{lo}\t{}\t{}\t{}\t{}",
                hi_text(hi),
                c.count,
                fmt_opt(c.mean()),
                fmt_opt(c.stddev())
            );
        }
    }
    s
}

pub fn parse_grid_tsv(text: &str, name: &str) -> Result<ErrorGrid> {
    let mut lines = text.lines();
    if lines.next() != Some(GRID_COLUMNS) {
        return Err(Error::parse(name, 1, "unexpected grid header"));
    }
    let mut grid = ErrorGrid::new();
    let mut seen = 0;
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let f: Vec<&str> = line.split('\t').collect();
        let bad = |what: &str| Error::parse(name, lineno, format!("bad {what}"));
        if f.len() != 6 {
            return Err(Error::parse(name, lineno, format!("expected 6 columns, found {}", f.len())));
        }
        let pc: usize = f[0].parse().map_err(|_| bad("pos count bin"))?;
        let lo: f64 = f[1].parse().map_err(|_| bad("distance bin"))?;
        let d = (lo / super::grid::DISTANCE_BIN_WIDTH).round() as usize;
        if pc >= POS_COUNT_BINS || d >= DISTANCE_BINS || distance_bin_bounds(d).0 != lo {
            return Err(bad("bin"));
        }
        let count: u64 = f[3].parse().map_err(|_| bad("count"))?;
        let cell = if count == 0 {
            Cell::default()
        } else {
            let mean: f64 = f[4].parse().map_err(|_| bad("mean"))?;
            let sd: f64 = f[5].parse().map_err(|_| bad("stddev"))?;
            Cell::from_summary(count, mean, sd)
        };
        *grid.cell_mut(pc, d) = cell;
        seen += 1;
    }
    if seen != POS_COUNT_BINS * DISTANCE_BINS {
        return Err(Error::parse(name, seen + 1, "grid is truncated"));
    }
    Ok(grid)
}

fn errsub_tsv(g: &ErrSubGrid) -> String {
    let mut s = String::from("pos_count_bin\tdistance_bin_lo\tdistance_bin_hi\tfirst_count\tsecond_count\terr_sub_m\n");
    for pc in 0..POS_COUNT_BINS {
        for d in 0..DISTANCE_BINS {
            let (lo, hi) = distance_bin_bounds(d);
            let (a, b) = g.counts(pc, d);
            let _ = writeln!(s, "{pc}\t{lo}\t{}\t{a}\t{b}\t{}", hi_text(hi), fmt_opt(g.get(pc, d)));
        }
    }
    s
}

fn curve_tsv(rows: &[CurveRow]) -> String {
    let mut s = String::from("distance_bin_lo\tdistance_bin_hi\tmethod\tcount\tmean_error_m\trate\n");
    for r in rows {
        let (lo, hi) = distance_bin_bounds(r.distance_bin);
        let _ = writeln!(s, "{lo}\t{}\t{}\t{}\t{}\t{}", hi_text(hi), r.method, r.count, r.mean_error, r.rate);
    }
    s
}

fn histogram_counts(grid: &ErrorGrid) -> Vec<u64> {
    grid.by_pos_count().iter().map(|c| c.count).collect()
}

fn histogram_tsv(counts: &[u64]) -> String {
    let mut s = String::from("pos_count\tcount\n");
    for (pc, c) in counts.iter().enumerate() {
        let _ = writeln!(s, "{pc}\t{c}");
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn grid_file(w: usize, method: &str) -> String {
    format!("w{w}_{method}.tsv")
}

fn errsub_file(w: usize, first: &str, second: &str) -> String {
    format!("w{w}_errsub_{first}_vs_{second}")
}

/// Writes `out_dir/grids/`: error grids, derived tables and the index.
pub fn write_tables(tables: &EvaluationTables, out_dir: &Path) -> Result<()> {
    let dir = out_dir.join("grids");
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut index = format!(
        "{INDEX_MAGIC} subject={} min_count={} baseline={}\nkind\tlookback\tfirst\tsecond\tfile\n",
        subject_key(tables.subject),
        tables.min_count,
        tables.baseline
    );
    let mut entry = |kind: GridKind, w: usize, first: &str, second: &str, file: &str| {
        let _ = writeln!(index, "{}\t{w}\t{first}\t{second}\t{file}", kind.name());
    };
    for g in &tables.grids {
        let file = grid_file(g.lookback, &g.method);
        write_file(&dir.join(&file), &grid_tsv(&g.grid))?;
        entry(GridKind::Error, g.lookback, &g.method, "", &file);
    }
    for (w, first, second) in &tables.comparisons {
        let file = format!("{}.tsv", errsub_file(*w, first, second));
        write_file(&dir.join(&file), &errsub_tsv(&tables.err_sub(*w, first, second)?))?;
        entry(GridKind::ErrSub, *w, first, second, &file);
    }
    for w in tables.lookbacks() {
        let file = format!("w{w}_distance_rate.tsv");
        write_file(&dir.join(&file), &curve_tsv(&tables.curve(w)))?;
        entry(GridKind::Curve, w, "", "", &file);
        if let Some(g) = tables.grid(w, &tables.baseline) {
            let file = format!("w{w}_poscount_histogram.tsv");
            write_file(&dir.join(&file), &histogram_tsv(&histogram_counts(g)))?;
            entry(GridKind::Histogram, w, &tables.baseline, "", &file);
        }
    }
    write_file(&dir.join("index.tsv"), &index)
}

/// Reads the error grids and comparisons back from `out_dir/grids/`.
pub fn read_tables(out_dir: &Path) -> Result<EvaluationTables> {
    let dir = out_dir.join("grids");
    let index_path = dir.join("index.tsv");
    let index = fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
    let name = index_path.display().to_string();
    let mut lines = index.lines();
    let header = lines.next().unwrap_or_default();
    let mut fields = header.split_whitespace();
    if fields.next() != Some(INDEX_MAGIC) {
        return Err(Error::parse(&name, 1, "not an evaluation index"));
    }
    let kv: Vec<(&str, &str)> = fields.filter_map(|f| f.split_once('=')).collect();
    let get = |k: &str| kv.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
    let subject = get("subject")
        .and_then(parse_subject)
        .ok_or_else(|| Error::parse(&name, 1, "bad subject"))?;
    let min_count = get("min_count")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(&name, 1, "bad min_count"))?;
    let baseline = get("baseline").unwrap_or("last_seen").to_string();
    lines.next();
    let mut tables = EvaluationTables {
        subject,
        min_count,
        grids: Vec::new(),
        comparisons: Vec::new(),
        baseline,
    };
    for (k, line) in lines.enumerate() {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(Error::parse(&name, k + 3, "expected 5 columns"));
        }
        let w: usize = f[1].parse().map_err(|_| Error::parse(&name, k + 3, "bad lookback"))?;
        match f[0] {
            "error" => {
                let path = dir.join(f[4]);
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let grid = parse_grid_tsv(&text, &path.display().to_string())?;
                tables.grids.push(GridEntry {
                    lookback: w,
                    method: f[2].to_string(),
                    grid,
                });
            }
            "errsub" => tables.comparisons.push((w, f[2].to_string(), f[3].to_string())),
            "curve" | "histogram" => {}
            other => return Err(Error::parse(&name, k + 3, format!("unknown kind `{other}`"))),
        }
    }
    Ok(tables)
}

fn pos_count_ticks() -> Vec<String> {
    (0..POS_COUNT_BINS).map(|p| p.to_string()).collect()
}

fn distance_ticks() -> Vec<String> {
    (0..DISTANCE_BINS)
        .map(|d| match distance_bin_bounds(d) {
            (lo, Some(hi)) => format!("{lo}-{hi}"),
            (lo, None) => format!("{lo}+"),
        })
        .collect()
}

fn grid_heatmap(title: &str, grid: &ErrorGrid) -> String {
    let values: Vec<Vec<Option<f64>>> = (0..POS_COUNT_BINS)
        .map(|pc| (0..DISTANCE_BINS).map(|d| grid.cell(pc, d).mean()).collect())
        .collect();
    let max = values.iter().flatten().flatten().fold(0.0f64, |m, v| m.max(*v));
    heatmap(&Heatmap {
        title,
        x_label: "pos count",
        y_label: "distance (m)",
        x_ticks: pos_count_ticks(),
        y_ticks: distance_ticks(),
        values,
        scale: ColorScale::Sequential { max },
        legend_label: "mean error (m)",
    })
}

fn errsub_heatmap(title: &str, g: &ErrSubGrid) -> String {
    let values: Vec<Vec<Option<f64>>> = (0..POS_COUNT_BINS)
        .map(|pc| (0..DISTANCE_BINS).map(|d| g.get(pc, d)).collect())
        .collect();
    let limit = values.iter().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    heatmap(&Heatmap {
        title,
        x_label: "pos count",
        y_label: "distance (m)",
        x_ticks: pos_count_ticks(),
        y_ticks: distance_ticks(),
        values,
        scale: ColorScale::Diverging { limit },
        legend_label: "err_sub (m)",
    })
}

/// Headline statistics of one method's grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Headline {
    pub scored: u64,
    pub mean: Option<f64>,
    pub stale_scored: u64,
    pub stale_mean: Option<f64>,
}

pub fn headline(grid: &ErrorGrid) -> Headline {
    let all = grid.merged(|_, _| true);
    let stale = grid.merged(|pc, _| pc >= STALE_FROM);
    Headline {
        scored: all.count,
        mean: all.mean(),
        stale_scored: stale.count,
        stale_mean: stale.mean(),
    }
}

fn summary(tables: &EvaluationTables) -> Result<String> {
    let f3 = |v: Option<f64>| v.map_or("NA".into(), |v| format!("{v:.3}"));
    let mut s = String::new();
    let _ = writeln!(s, "subject: {}", tables.subject.label());
    let _ = writeln!(s, "err_sub min_count: {}", tables.min_count);
    for w in tables.lookbacks() {
        let _ = writeln!(s, "\nlookback {w}");
        let _ = writeln!(
            s,
            "{:<12} {:>10} {:>14} {:>14} {:>22}",
            "method", "scored", "mean_error_m", "stale_scored", "stale_mean_error_m"
        );
        for g in tables.grids.iter().filter(|g| g.lookback == w) {
            let h = headline(&g.grid);
            let _ = writeln!(
                s,
                "{:<12} {:>10} {:>14} {:>14} {:>22}",
                g.method,
                h.scored,
                f3(h.mean),
                h.stale_scored,
                f3(h.stale_mean)
            );
        }
        for (_, first, second) in tables.comparisons.iter().filter(|c| c.0 == w) {
            let e = tables.err_sub(w, first, second)?;
            let (mut n, mut pos, mut sum) = (0, 0, 0.0);
            for pc in 0..POS_COUNT_BINS {
                for d in 0..DISTANCE_BINS {
                    if let Some(v) = e.get(pc, d) {
                        n += 1;
                        pos += usize::from(v > 0.0);
                        sum += v;
                    }
                }
            }
            let mean = (n > 0).then(|| sum / n as f64);
            let _ = writeln!(
                s,
                "err_sub {first} vs {second}: {n} cells, {pos} favour {first}, mean {} m",
                f3(mean)
            );
        }
    }
    let _ = writeln!(s, "\nstale: pos count >= {STALE_FROM}");
    Ok(s)
}

/// Writes `out_dir/figures/*.svg` and `out_dir/summary.txt`.
pub fn render_reports(tables: &EvaluationTables, out_dir: &Path) -> Result<()> {
    let dir = out_dir.join("figures");
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for g in &tables.grids {
        let title = format!("{} mean error, lookback {}, {}", g.method, g.lookback, tables.subject.label());
        write_file(
            &dir.join(format!("w{}_{}_error.svg", g.lookback, g.method)),
            &grid_heatmap(&title, &g.grid),
        )?;
    }
    for (w, first, second) in &tables.comparisons {
        let e = tables.err_sub(*w, first, second)?;
        let title = format!("err_sub {first} vs {second}, lookback {w} (positive: {first} better)");
        write_file(&dir.join(format!("{}.svg", errsub_file(*w, first, second))), &errsub_heatmap(&title, &e))?;
    }
    for w in tables.lookbacks() {
        let rows = tables.curve(w);
        let methods = tables.methods(w);
        let series = methods
            .iter()
            .map(|m| Series {
                label: m,
                points: rows
                    .iter()
                    .filter(|r| r.method == *m)
                    .map(|r| (super::grid::distance_bin_center(r.distance_bin), r.rate))
                    .collect(),
            })
            .collect();
        let title = format!("distance error rate, lookback {w}");
        let chart = line_chart(&LineChart {
            title: &title,
            x_label: "distance (m)",
            y_label: "mean error / distance",
            series,
        });
        write_file(&dir.join(format!("w{w}_distance_rate.svg")), &chart)?;
        if let Some(g) = tables.grid(w, &tables.baseline) {
            let title = format!("samples per pos count, lookback {w}");
            let bars = histogram_counts(g)
                .iter()
                .enumerate()
                .map(|(pc, &c)| (pc.to_string(), c as f64))
                .collect();
            let chart = bar_chart(&BarChart {
                title: &title,
                x_label: "pos count",
                y_label: "samples",
                bars,
            });
            write_file(&dir.join(format!("w{w}_poscount_histogram.svg")), &chart)?;
        }
    }
    write_file(&out_dir.join("summary.txt"), &summary(tables)?)
}
