//! Match trace files: one tab-separated row per cycle carrying the mode and
//! the same noisy/accurate blocks as a dataset record.
//!
//! ```text
//! #ssdenoise-trace version=1 match=3 seed=1234 cycles=6000
//! cycle  mode  n_ball_x ... a_r11_pc
//! 1      play_on  ...
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::dataset::record::{block_column_names, Record, BLOCK_WIDTH};
use crate::error::{Error, Result};

use super::matchrun::Frame;
use super::world::GameMode;

const MAGIC: &str = "#ssdenoise-trace";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceHeader {
    pub match_id: u32,
    pub seed: u64,
    pub cycles: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub mode: GameMode,
    pub record: Record,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub rows: Vec<TraceRow>,
}

fn mode_name(mode: GameMode) -> &'static str {
    match mode {
        GameMode::PlayOn => "play_on",
        GameMode::Other => "other",
    }
}

fn column_header() -> String {
    let mut cols = vec!["cycle".to_string(), "mode".to_string()];
    cols.extend(block_column_names("n"));
    cols.extend(block_column_names("a"));
    cols.join("\t")
}

pub(crate) fn push_values(line: &mut String, values: &[f64]) {
    use std::fmt::Write as _;
    for v in values {
        let _ = write!(line, "\t{v}");
    }
}

/// Streams `frames` to `out`.
pub fn write_trace<W: Write>(out: W, header: &TraceHeader, frames: impl IntoIterator<Item = Frame>) -> std::io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(
        w,
        "{MAGIC} version={VERSION} match={} seed={} cycles={}",
        header.match_id, header.seed, header.cycles
    )?;
    writeln!(w, "{}", column_header())?;
    let mut line = String::new();
    for frame in frames {
        let record = Record::from_frame(&frame.truth, &frame.belief);
        line.clear();
        line.push_str(&record.cycle.to_string());
        line.push('\t');
        line.push_str(mode_name(frame.truth.mode));
        push_values(&mut line, &record.noisy);
        push_values(&mut line, &record.accurate);
        writeln!(w, "{line}")?;
    }
    w.flush()
}

fn header_field<'a>(fields: &[(&'a str, &'a str)], key: &str) -> Option<&'a str> {
    fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

fn parse_header(line: &str, name: &str) -> Result<TraceHeader> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::parse(name, 1, "not a trace file"));
    }
    let fields: Vec<(&str, &str)> = parts.filter_map(|p| p.split_once('=')).collect();
    let get = |key: &str| -> Result<&str> {
        header_field(&fields, key).ok_or_else(|| Error::parse(name, 1, format!("header lacks `{key}`")))
    };
    let bad = |key: &str| Error::parse(name, 1, format!("header field `{key}` is not a number"));
    let version: u32 = get("version")?.parse().map_err(|_| bad("version"))?;
    if version != VERSION {
        return Err(Error::parse(name, 1, format!("trace version {version}, expected {VERSION}")));
    }
    Ok(TraceHeader {
        match_id: get("match")?.parse().map_err(|_| bad("match"))?,
        seed: get("seed")?.parse().map_err(|_| bad("seed"))?,
        cycles: get("cycles")?.parse().map_err(|_| bad("cycles"))?,
    })
}

fn parse_row(line: &str, name: &str, lineno: usize) -> Result<TraceRow> {
    let fields: Vec<&str> = line.split('\t').collect();
    let expected = 2 + 2 * BLOCK_WIDTH;
    if fields.len() != expected {
        return Err(Error::parse(name, lineno, format!("expected {expected} columns, found {}", fields.len())));
    }
    let cycle: u32 = fields[0]
        .parse()
        .map_err(|_| Error::parse(name, lineno, format!("bad cycle `{}`", fields[0])))?;
    let mode = match fields[1] {
        "play_on" => GameMode::PlayOn,
        "other" => GameMode::Other,
        m => return Err(Error::parse(name, lineno, format!("unknown mode `{m}`"))),
    };
    let mut values = [0.0; 2 * BLOCK_WIDTH];
    for (k, (slot, text)) in values.iter_mut().zip(&fields[2..]).enumerate() {
        *slot = text
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::parse(name, lineno, format!("column {}: bad value `{text}`", k + 3)))?;
    }
    let mut noisy = [0.0; BLOCK_WIDTH];
    let mut accurate = [0.0; BLOCK_WIDTH];
    noisy.copy_from_slice(&values[..BLOCK_WIDTH]);
    accurate.copy_from_slice(&values[BLOCK_WIDTH..]);
    Ok(TraceRow {
        mode,
        record: Record { cycle, noisy, accurate },
    })
}

/// Parses a trace; errors name the first bad line.
pub fn parse_trace<R: BufRead>(input: R, name: &str) -> Result<Trace> {
    let mut lines = input.lines();
    let mut next_line = |lineno: usize| -> Result<Option<String>> {
        lines
            .next()
            .transpose()
            .map_err(|e| Error::parse(name, lineno, e.to_string()))
    };
    let first = next_line(1)?.ok_or_else(|| Error::parse(name, 1, "empty file"))?;
    let header = parse_header(&first, name)?;
    let columns = next_line(2)?.ok_or_else(|| Error::parse(name, 2, "missing column header"))?;
    if columns != column_header() {
        return Err(Error::parse(name, 2, "column header does not match the record layout"));
    }
    let mut rows = Vec::new();
    let mut lineno = 2;
    let mut prev: Option<u32> = None;
    while let Some(line) = next_line(lineno + 1)? {
        lineno += 1;
        if line.is_empty() {
            continue;
        }
        let row = parse_row(&line, name, lineno)?;
        if prev.is_some_and(|p| row.record.cycle <= p) {
            return Err(Error::parse(name, lineno, "cycles must increase"));
        }
        prev = Some(row.record.cycle);
        rows.push(row);
    }
    Ok(Trace { header, rows })
}

pub fn read_trace(path: &Path) -> Result<Trace> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_trace(BufReader::new(file), &path.display().to_string())
}
