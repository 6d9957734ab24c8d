//! Dataset files.
//!
//! Tab-separated text. Line 1 is `#ssdenoise-dataset version=1 lookback=W`,
//! line 2 names the columns. With `W = 1` each sample is one row:
//! `sample match cycle <137 features> <22 targets> <11 pos counts> <11 distances>`.
//! With `W > 1` each sample is `W` rows of role `input` followed by one row
//! of role `target`; a `role` column follows `sample`, input rows leave the
//! trailing fields empty and the target row leaves the features empty.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::simulator::TEAM_SIZE;

use super::record::{block_column_names, BLOCK_WIDTH};
use super::window::{WindowRef, WindowSet, TARGET_WIDTH};

const MAGIC: &str = "#ssdenoise-dataset";
pub const DATASET_VERSION: u32 = 1;
const META_WIDTH: usize = TARGET_WIDTH + 2 * TEAM_SIZE;

fn meta_column_names() -> Vec<String> {
    let mut names = Vec::with_capacity(META_WIDTH);
    for i in 1..=TEAM_SIZE {
        names.push(format!("t_l{i}_x"));
        names.push(format!("t_l{i}_y"));
    }
    names.extend((1..=TEAM_SIZE).map(|i| format!("pc_l{i}")));
    names.extend((1..=TEAM_SIZE).map(|i| format!("dist_l{i}")));
    names
}

/// Column names for a dataset of the given lookback.
pub fn dataset_columns(lookback: usize) -> Vec<String> {
    let mut cols = vec!["sample".to_string()];
    if lookback > 1 {
        cols.push("role".into());
    }
    cols.push("match".into());
    cols.push("cycle".into());
    cols.extend(block_column_names("n"));
    cols.extend(meta_column_names());
    cols
}

fn push_meta(line: &mut String, w: &WindowRef<'_>) {
    use std::fmt::Write as _;
    for v in w.target {
        let _ = write!(line, "\t{v}");
    }
    for pc in w.pos_counts {
        let _ = write!(line, "\t{pc}");
    }
    for d in w.distances {
        let _ = write!(line, "\t{d}");
    }
}

pub fn write_dataset_to<'a, W: Write>(
    out: W,
    lookback: usize,
    windows: impl IntoIterator<Item = WindowRef<'a>>,
) -> std::io::Result<()> {
    use std::fmt::Write as _;
    let mut w = BufWriter::new(out);
    writeln!(w, "{MAGIC} version={DATASET_VERSION} lookback={lookback}")?;
    writeln!(w, "{}", dataset_columns(lookback).join("\t"))?;
    let mut line = String::new();
    for (n, win) in windows.into_iter().enumerate() {
        assert_eq!(win.lookback, lookback, "window lookback differs from the file");
        if lookback == 1 {
            line.clear();
            let _ = write!(line, "{n}\t{}\t{}", win.match_id, win.cycle);
            crate::simulator::trace::push_values(&mut line, win.inputs);
            push_meta(&mut line, &win);
            writeln!(w, "{line}")?;
            continue;
        }
        for k in 0..lookback {
            line.clear();
            let cycle = win.cycle + 1 + k as u32 - lookback as u32;
            let _ = write!(line, "{n}\tinput\t{}\t{cycle}", win.match_id);
            crate::simulator::trace::push_values(&mut line, &win.inputs[k * BLOCK_WIDTH..(k + 1) * BLOCK_WIDTH]);
            line.push_str(&"\t".repeat(META_WIDTH));
            writeln!(w, "{line}")?;
        }
        line.clear();
        let _ = write!(line, "{n}\ttarget\t{}\t{}", win.match_id, win.cycle);
        line.push_str(&"\t".repeat(BLOCK_WIDTH));
        push_meta(&mut line, &win);
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn write_dataset(set: &WindowSet, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset_to(file, set.lookback(), set.iter()).map_err(|e| Error::io(path, e))
}

struct Reader<'a> {
    name: &'a str,
    lineno: usize,
    columns: usize,
}

impl Reader<'_> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::parse(self.name, self.lineno, reason)
    }

    fn split<'l>(&self, line: &'l str) -> Result<Vec<&'l str>> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != self.columns {
            return Err(self.err(format!("expected {} columns, found {}", self.columns, fields.len())));
        }
        Ok(fields)
    }

    fn int<T: std::str::FromStr>(&self, text: &str, what: &str) -> Result<T> {
        text.parse().map_err(|_| self.err(format!("bad {what} `{text}`")))
    }

    fn reals(&self, fields: &[&str], out: &mut [f64]) -> Result<()> {
        for (slot, text) in out.iter_mut().zip(fields) {
            *slot = text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| self.err(format!("bad value `{text}`")))?;
        }
        Ok(())
    }

    fn meta(&self, fields: &[&str]) -> Result<Meta> {
        let mut target = [0.0; TARGET_WIDTH];
        self.reals(&fields[..TARGET_WIDTH], &mut target)?;
        let mut pos_counts = [0u8; TEAM_SIZE];
        for (slot, text) in pos_counts.iter_mut().zip(&fields[TARGET_WIDTH..]) {
            *slot = self.int(text, "pos count")?;
        }
        let mut distances = [0.0; TEAM_SIZE];
        self.reals(&fields[TARGET_WIDTH + TEAM_SIZE..], &mut distances)?;
        Ok(Meta {
            target,
            pos_counts,
            distances,
        })
    }
}

struct Meta {
    target: [f64; TARGET_WIDTH],
    pos_counts: [u8; TEAM_SIZE],
    distances: [f64; TEAM_SIZE],
}

fn parse_header(line: &str, name: &str) -> Result<usize> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::parse(name, 1, "not a dataset file"));
    }
    let mut version = None;
    let mut lookback = None;
    for (k, v) in parts.filter_map(|p| p.split_once('=')) {
        match k {
            "version" => version = v.parse::<u32>().ok(),
            "lookback" => lookback = v.parse::<usize>().ok(),
            _ => {}
        }
    }
    match version {
        Some(DATASET_VERSION) => {}
        Some(v) => {
            return Err(Error::parse(
                name,
                1,
                format!("dataset version {v}, expected {DATASET_VERSION}"),
            ))
        }
        None => return Err(Error::parse(name, 1, "header lacks a version")),
    }
    lookback
        .filter(|&w| w >= 1)
        .ok_or_else(|| Error::parse(name, 1, "header lacks a positive lookback"))
}

pub fn read_dataset_from<R: BufRead>(input: R, name: &str) -> Result<WindowSet> {
    let mut lines = input.lines();
    let mut next = |r: &mut Reader<'_>| -> Result<Option<String>> {
        r.lineno += 1;
        lines.next().transpose().map_err(|e| r.err(e.to_string()))
    };
    let mut r = Reader {
        name,
        lineno: 0,
        columns: 0,
    };
    let header = next(&mut r)?.ok_or_else(|| r.err("empty file"))?;
    let lookback = parse_header(&header, name)?;
    let expected = dataset_columns(lookback);
    r.columns = expected.len();
    let cols = next(&mut r)?.ok_or_else(|| r.err("missing column header"))?;
    if cols != expected.join("\t") {
        return Err(r.err("column header does not match the dataset layout"));
    }

    let mut set = WindowSet::new(lookback);
    let mut inputs = Vec::with_capacity(lookback * BLOCK_WIDTH);
    let mut sample = 0usize;
    let mut group: Option<(usize, u32, u32)> = None; // (sample, match, last cycle)
    let fixed = if lookback > 1 { 4 } else { 3 };
    while let Some(line) = next(&mut r)? {
        let fields = r.split(&line)?;
        let id: usize = r.int(fields[0], "sample id")?;
        if lookback == 1 {
            if id != sample {
                return Err(r.err(format!("sample id {id}, expected {sample}")));
            }
            let match_id = r.int(fields[1], "match id")?;
            let cycle = r.int(fields[2], "cycle")?;
            inputs.resize(BLOCK_WIDTH, 0.0);
            r.reals(&fields[fixed..fixed + BLOCK_WIDTH], &mut inputs)?;
            let meta = r.meta(&fields[fixed + BLOCK_WIDTH..])?;
            push(&mut set, match_id, cycle, lookback, &inputs, &meta);
            sample += 1;
            continue;
        }
        let match_id: u32 = r.int(fields[2], "match id")?;
        let cycle: u32 = r.int(fields[3], "cycle")?;
        match fields[1] {
            "input" => {
                match group {
                    None if id == sample => {}
                    Some((g, m, c)) if g == id && m == match_id && c + 1 == cycle => {}
                    _ => return Err(r.err(format!("input row out of place for sample {id}"))),
                }
                if inputs.len() == lookback * BLOCK_WIDTH {
                    return Err(r.err(format!("sample {id} has more than {lookback} input rows")));
                }
                let at = inputs.len();
                inputs.resize(at + BLOCK_WIDTH, 0.0);
                r.reals(&fields[fixed..fixed + BLOCK_WIDTH], &mut inputs[at..])?;
                group = Some((id, match_id, cycle));
            }
            "target" => {
                let complete = inputs.len() == lookback * BLOCK_WIDTH;
                if !complete || group != Some((id, match_id, cycle)) {
                    return Err(r.err(format!("sample {id}: target row without {lookback} matching input rows")));
                }
                let meta = r.meta(&fields[fixed + BLOCK_WIDTH..])?;
                push(&mut set, match_id, cycle, lookback, &inputs, &meta);
                inputs.clear();
                group = None;
                sample += 1;
            }
            other => return Err(r.err(format!("unknown role `{other}`"))),
        }
    }
    if group.is_some() {
        return Err(r.err(format!("truncated: sample {sample} has no target row")));
    }
    Ok(set)
}

fn push(set: &mut WindowSet, match_id: u32, cycle: u32, lookback: usize, inputs: &[f64], meta: &Meta) {
    set.push_window(WindowRef {
        match_id,
        cycle,
        lookback,
        inputs,
        target: &meta.target,
        pos_counts: &meta.pos_counts,
        distances: &meta.distances,
    });
}

pub fn read_dataset(path: &Path) -> Result<WindowSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset_from(BufReader::new(file), &path.display().to_string())
}
