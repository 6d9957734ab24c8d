//! Play-on sequences and the sliding windows cut from them.

use std::collections::BTreeSet;

use crate::simulator::TEAM_SIZE;

use super::record::{Record, BLOCK_WIDTH};
use super::scaling::{scale_block, scaled_targets};

pub const TARGET_WIDTH: usize = 2 * TEAM_SIZE;

/// Records with strictly consecutive cycles from one match.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayOnSequence {
    pub match_id: u32,
    pub records: Vec<Record>,
}

impl PlayOnSequence {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Cuts records (in cycle order) into maximal runs of consecutive cycles.
pub fn split_sequences(match_id: u32, records: Vec<Record>) -> Vec<PlayOnSequence> {
    let mut out: Vec<PlayOnSequence> = Vec::new();
    for r in records {
        match out.last_mut() {
            Some(seq) if seq.records.last().is_some_and(|p| p.cycle + 1 == r.cycle) => seq.records.push(r),
            _ => out.push(PlayOnSequence {
                match_id,
                records: vec![r],
            }),
        }
    }
    out
}

/// One training example: `lookback` scaled noisy rows and the scaled true
/// opponent positions at the last of them, plus per-opponent pos counts and
/// observer distances at that cycle for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSample {
    pub match_id: u32,
    /// Cycle of the window's last row.
    pub cycle: u32,
    pub lookback: usize,
    pub inputs: Vec<f64>,
    pub target: [f64; TARGET_WIDTH],
    pub pos_counts: [u8; TEAM_SIZE],
    pub distances: [f64; TEAM_SIZE],
}

impl WindowSample {
    pub fn as_ref(&self) -> WindowRef<'_> {
        WindowRef {
            match_id: self.match_id,
            cycle: self.cycle,
            lookback: self.lookback,
            inputs: &self.inputs,
            target: &self.target,
            pos_counts: &self.pos_counts,
            distances: &self.distances,
        }
    }
}

/// Borrowed view of a window, either from a [`WindowSample`] or a [`WindowSet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowRef<'a> {
    pub match_id: u32,
    pub cycle: u32,
    pub lookback: usize,
    pub inputs: &'a [f64],
    pub target: &'a [f64; TARGET_WIDTH],
    pub pos_counts: &'a [u8; TEAM_SIZE],
    pub distances: &'a [f64; TEAM_SIZE],
}

impl WindowRef<'_> {
    pub fn last_row(&self) -> &[f64] {
        &self.inputs[self.inputs.len() - BLOCK_WIDTH..]
    }

    pub fn to_owned(&self) -> WindowSample {
        WindowSample {
            match_id: self.match_id,
            cycle: self.cycle,
            lookback: self.lookback,
            inputs: self.inputs.to_vec(),
            target: *self.target,
            pos_counts: *self.pos_counts,
            distances: *self.distances,
        }
    }
}

pub fn build_windows(sequence: &PlayOnSequence, lookback: usize) -> Vec<WindowSample> {
    let mut set = WindowSet::new(lookback);
    set.push_sequence(sequence);
    set.iter().map(|w| w.to_owned()).collect()
}

/// Per-row data of one sequence, scaled once and shared by overlapping windows.
#[derive(Debug, Clone)]
struct Rows {
    match_id: u32,
    first_cycle: u32,
    inputs: Vec<f64>,
    targets: Vec<[f64; TARGET_WIDTH]>,
    pos_counts: Vec<[u8; TEAM_SIZE]>,
    distances: Vec<[f64; TEAM_SIZE]>,
}

impl Rows {
    fn new(match_id: u32, first_cycle: u32) -> Self {
        Self {
            match_id,
            first_cycle,
            inputs: Vec::new(),
            targets: Vec::new(),
            pos_counts: Vec::new(),
            distances: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.targets.len()
    }

    fn push(&mut self, row: &[f64], target: [f64; TARGET_WIDTH], pc: [u8; TEAM_SIZE], dist: [f64; TEAM_SIZE]) {
        self.inputs.extend_from_slice(row);
        self.targets.push(target);
        self.pos_counts.push(pc);
        self.distances.push(dist);
    }
}

/// Windows of one lookback over many sequences, stored without duplicating
/// the overlapping rows.
#[derive(Debug, Clone)]
pub struct WindowSet {
    lookback: usize,
    sequences: Vec<Rows>,
    /// (sequence, row index of the window's last cycle)
    index: Vec<(u32, u32)>,
}

impl WindowSet {
    pub fn new(lookback: usize) -> Self {
        assert!(lookback >= 1, "lookback must be positive");
        Self {
            lookback,
            sequences: Vec::new(),
            index: Vec::new(),
        }
    }

    pub fn from_sequences<'a>(sequences: impl IntoIterator<Item = &'a PlayOnSequence>, lookback: usize) -> Self {
        let mut set = Self::new(lookback);
        for s in sequences {
            set.push_sequence(s);
        }
        set
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    /// Adds every window of `sequence`; sequences shorter than the
    /// lookback are dropped.
    pub fn push_sequence(&mut self, sequence: &PlayOnSequence) {
        if sequence.len() < self.lookback {
            return;
        }
        let mut rows = Rows::new(sequence.match_id, sequence.records[0].cycle);
        for r in &sequence.records {
            let pc = std::array::from_fn(|i| r.opponent_pos_count(i));
            rows.push(&scale_block(&r.noisy), scaled_targets(&r.accurate), pc, r.opponent_distances());
        }
        self.push_rows(rows);
    }

    fn push_rows(&mut self, rows: Rows) {
        let s = self.sequences.len() as u32;
        for end in self.lookback - 1..rows.len() {
            self.index.push((s, end as u32));
        }
        self.sequences.push(rows);
    }

    /// Appends one window. It shares storage with the previous window when
    /// it continues the same sequence by one cycle.
    pub fn push_window(&mut self, w: WindowRef<'_>) {
        assert_eq!(w.lookback, self.lookback, "window lookback differs from the set");
        let width = BLOCK_WIDTH;
        let continues = self.index.last().is_some_and(|&(s, end)| {
            let rows = &self.sequences[s as usize];
            s as usize == self.sequences.len() - 1
                && end as usize + 1 == rows.len()
                && rows.match_id == w.match_id
                && rows.first_cycle + end + 1 == w.cycle
                && rows.inputs[(end as usize + 2 - self.lookback) * width..] == w.inputs[..w.inputs.len() - width]
        });
        if continues {
            let s = self.sequences.len() - 1;
            let rows = &mut self.sequences[s];
            rows.push(w.last_row(), *w.target, *w.pos_counts, *w.distances);
            self.index.push((s as u32, rows.len() as u32 - 1));
            return;
        }
        let mut rows = Rows::new(w.match_id, w.cycle + 1 - self.lookback as u32);
        // rows before the last carry no target of their own
        for k in 0..self.lookback - 1 {
            rows.push(&w.inputs[k * width..(k + 1) * width], [0.0; TARGET_WIDTH], [0; TEAM_SIZE], [0.0; TEAM_SIZE]);
        }
        rows.push(w.last_row(), *w.target, *w.pos_counts, *w.distances);
        self.push_rows(rows);
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, i: usize) -> WindowRef<'_> {
        let (s, end) = self.index[i];
        let rows = &self.sequences[s as usize];
        let end = end as usize;
        let start = end + 1 - self.lookback;
        WindowRef {
            match_id: rows.match_id,
            cycle: rows.first_cycle + end as u32,
            lookback: self.lookback,
            inputs: &rows.inputs[start * BLOCK_WIDTH..(end + 1) * BLOCK_WIDTH],
            target: &rows.targets[end],
            pos_counts: &rows.pos_counts[end],
            distances: &rows.distances[end],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = WindowRef<'_>> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn match_ids(&self) -> BTreeSet<u32> {
        self.sequences.iter().map(|r| r.match_id).collect()
    }

    /// The windows whose match is in `ids`.
    pub fn subset(&self, ids: &BTreeSet<u32>) -> WindowSet {
        let mut out = WindowSet::new(self.lookback);
        for rows in self.sequences.iter().filter(|r| ids.contains(&r.match_id)) {
            out.push_rows(rows.clone());
        }
        out
    }

    /// Copies the windows at `indices` into contiguous input and target buffers.
    pub fn gather(&self, indices: &[usize], inputs: &mut Vec<f64>, targets: &mut Vec<f64>) {
        inputs.clear();
        targets.clear();
        for &i in indices {
            let w = self.get(i);
            inputs.extend_from_slice(w.inputs);
            targets.extend_from_slice(w.target);
        }
    }
}
