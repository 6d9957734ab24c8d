use std::collections::BTreeSet;

use proptest::prelude::*;
use ssdenoise_core::dataset::record::{field, left_offset, right_offset};
use ssdenoise_core::dataset::scaling::DOMAINS;
use ssdenoise_core::dataset::{
    dataset_columns, read_dataset, read_dataset_from, record_column_names, records_from_frames, scale, scale_block,
    split_by_match, split_sequences, unscale, write_dataset, write_dataset_to, PlayOnSequence, Record, WindowSet,
    BLOCK_WIDTH, RECORD_WIDTH,
};
use ssdenoise_core::simulator::{run_match, MatchConfig, TEAM_SIZE};
use ssdenoise_core::Error;

fn sequences(seed: u64, cycles: u32) -> Vec<PlayOnSequence> {
    let frames = run_match(
        &MatchConfig {
            cycles,
            ..MatchConfig::default()
        },
        seed,
    );
    split_sequences(seed as u32, records_from_frames(&frames))
}

/// A record whose cycle is `cycle` and whose values are all `v`.
fn flat_record(cycle: u32, v: f64) -> Record {
    Record {
        cycle,
        noisy: [v; BLOCK_WIDTH],
        accurate: [v; BLOCK_WIDTH],
    }
}

#[test]
fn schema_order_is_fixed() {
    let names = record_column_names();
    assert_eq!(names.len(), RECORD_WIDTH);
    let mut expected = vec!["cycle".to_string()];
    for block in ["n", "a"] {
        for f in ["x", "y", "vx", "vy", "pc"] {
            expected.push(format!("{block}_ball_{f}"));
        }
        for team in ["l", "r"] {
            for i in 1..=11 {
                for f in ["x", "y", "vx", "vy", "body", "pc"] {
                    expected.push(format!("{block}_{team}{i}_{f}"));
                }
            }
        }
    }
    assert_eq!(names, expected);
}

#[test]
fn scaled_features_are_in_range_or_imputed() {
    for seq in sequences(2, 1500) {
        for r in &seq.records {
            let s = scale_block(&r.noisy);
            for i in 0..2 * TEAM_SIZE {
                let o = if i < TEAM_SIZE { left_offset(i) } else { right_offset(i - TEAM_SIZE) };
                let unknown = r.noisy[o + field::POS_COUNT] >= 30.0;
                for k in [field::X, field::Y] {
                    if unknown {
                        assert_eq!(s[o + k], -2.0);
                    } else {
                        assert!((-1.0..=1.0).contains(&s[o + k]), "{}", s[o + k]);
                    }
                }
            }
            for (c, v) in s.iter().enumerate() {
                assert!((-1.0..=1.0).contains(v) || *v == -2.0, "column {c}: {v}");
            }
        }
    }
}

#[test]
fn window_count_law_on_simulated_data() {
    let seqs = sequences(4, 2000);
    for w in [1, 5, 10, 15] {
        let set = WindowSet::from_sequences(&seqs, w);
        let expected: usize = seqs.iter().filter(|s| s.len() >= w).map(|s| s.len() - w + 1).sum();
        assert_eq!(set.len(), expected, "lookback {w}");
    }
}

#[test]
fn dataset_file_round_trips() {
    let seqs = sequences(6, 600);
    let dir = tempfile::tempdir().unwrap();
    for w in [1, 5] {
        let set = WindowSet::from_sequences(&seqs, w);
        let path = dir.path().join(format!("w{w}.tsv"));
        write_dataset(&set, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(back.lookback(), w);
        assert_eq!(back.len(), set.len());
        for (a, b) in set.iter().zip(back.iter()) {
            assert_eq!(a, b);
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().ends_with(&format!("lookback={w}")));
        assert_eq!(lines.next().unwrap(), dataset_columns(w).join("\t"));
        // one row per sample for W = 1, W inputs plus a target otherwise
        let rows_per_sample = if w == 1 { 1 } else { w + 1 };
        assert_eq!(lines.count(), set.len() * rows_per_sample);
    }
}

#[test]
fn truncated_dataset_is_rejected_with_a_line() {
    let seqs = sequences(6, 300);
    let set = WindowSet::from_sequences(&seqs, 5);
    let mut buf = Vec::new();
    write_dataset_to(&mut buf, 5, set.iter()).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let cut = lines[..lines.len() - 1].join("\n");
    assert!(read_dataset_from(cut.as_bytes(), "d.tsv").is_err());
    let mut bad: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    bad[4] = bad[4].replacen('\t', "\t\t", 1);
    match read_dataset_from(bad.join("\n").as_bytes(), "d.tsv").unwrap_err() {
        Error::Parse { line, .. } => assert_eq!(line, 5),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn split_examples() {
    let ids: Vec<u32> = (0..10).collect();
    let s = split_by_match(&ids, [0.8, 0.1, 0.1], 9).unwrap();
    assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (8, 1, 1));
    assert_eq!(s, split_by_match(&ids, [0.8, 0.1, 0.1], 9).unwrap());
    let all: BTreeSet<u32> = s.parts().into_iter().flatten().copied().collect();
    assert_eq!(all, ids.iter().copied().collect());
    assert!(split_by_match(&ids, [0.8, 0.3, 0.1], 9).is_err());
}

proptest! {
    #[test]
    fn scaling_round_trip(k in 0usize..5, t in 0.0f64..=1.0) {
        let d = DOMAINS[k];
        let v = d.lo + t * (d.hi - d.lo);
        prop_assert!((unscale(scale(v, &d), &d) - v).abs() <= 1e-12);
        let s = scale(v, &d);
        prop_assert!(s >= d.scaled_lo - 1e-12 && s <= d.scaled_hi + 1e-12);
    }

    #[test]
    fn window_count_law(lengths in prop::collection::vec(1usize..40, 1..8), w in 1usize..16) {
        let mut seqs = Vec::new();
        let mut cycle = 1;
        for len in &lengths {
            let records = (0..*len).map(|k| flat_record(cycle + k as u32, 0.0)).collect();
            seqs.push(PlayOnSequence { match_id: 1, records });
            cycle += *len as u32 + 1;
        }
        let set = WindowSet::from_sequences(&seqs, w);
        let expected: usize = lengths.iter().filter(|&&l| l >= w).map(|l| l - w + 1).sum();
        prop_assert_eq!(set.len(), expected);
    }

    #[test]
    fn splits_partition_the_matches(n in 3u32..60, seed in any::<u64>(), a in 0.1f64..0.8, b in 0.0f64..0.1) {
        let ids: Vec<u32> = (0..n).collect();
        let s = split_by_match(&ids, [a, b, 1.0 - a - b], seed).unwrap();
        let [tr, va, te] = s.parts();
        prop_assert!(tr.is_disjoint(va) && tr.is_disjoint(te) && va.is_disjoint(te));
        prop_assert_eq!(tr.len() + va.len() + te.len(), n as usize);
        prop_assert!(!tr.is_empty() && !te.is_empty());
    }
}
