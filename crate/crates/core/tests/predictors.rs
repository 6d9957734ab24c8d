use std::collections::BTreeSet;

use ssdenoise_core::dataset::record::{field, left_offset};
use ssdenoise_core::dataset::scaling::{POSITION_X, POSITION_Y};
use ssdenoise_core::dataset::{records_from_frames, split_sequences, WindowSet};
use ssdenoise_core::evaluation::check_unseen;
use ssdenoise_core::predictors::{
    predict_last_seen, predict_model, predict_velocity_extrapolation, train, Predictor, TrainConfig, CLAMP_MARGIN,
};
use ssdenoise_core::simulator::{run_match, MatchConfig, TEAM_SIZE};
use ssdenoise_neural::{ModelSpec, Network};

fn windows(seeds: &[u64], cycles: u32, lookback: usize) -> WindowSet {
    let cfg = MatchConfig {
        cycles,
        ..MatchConfig::default()
    };
    let mut seqs = Vec::new();
    for &s in seeds {
        seqs.extend(split_sequences(s as u32, records_from_frames(&run_match(&cfg, s))));
    }
    WindowSet::from_sequences(&seqs, lookback)
}

#[test]
fn last_seen_is_the_unscaled_last_row() {
    let set = windows(&[1], 800, 5);
    let cfg = MatchConfig {
        cycles: 800,
        ..MatchConfig::default()
    };
    let records = records_from_frames(&run_match(&cfg, 1));
    for w in set.iter() {
        let p = predict_last_seen(&w);
        let row = w.last_row();
        let raw = records.iter().find(|r| r.cycle == w.cycle).unwrap();
        for i in 0..TEAM_SIZE {
            let o = left_offset(i);
            assert_eq!(p.positions[i].x, POSITION_X.unscale(row[o + field::X]));
            assert_eq!(p.positions[i].y, POSITION_Y.unscale(row[o + field::Y]));
            assert!(p.positions[i].distance(raw.opponent_believed(i)) < 1e-12);
            assert_eq!(p.unknown[i], raw.opponent_pos_count(i) >= 30);
        }
    }
}

#[test]
fn velocity_extrapolation_agrees_with_last_seen_when_fresh() {
    let set = windows(&[2], 600, 1);
    for w in set.iter() {
        let a = predict_last_seen(&w);
        let b = predict_velocity_extrapolation(&w);
        for i in 0..TEAM_SIZE {
            if w.pos_counts[i] == 0 {
                assert!(a.positions[i].distance(b.positions[i]) < 1e-12);
            }
            assert_eq!(a.unknown[i], b.unknown[i]);
        }
    }
}

#[test]
fn model_prediction_is_unscaled_forward() {
    let set = windows(&[3], 400, 5);
    for arch in [1, 6] {
        let net = Network::initialized(ModelSpec::table(arch, 5).unwrap(), 17).unwrap();
        let batched = Predictor::from_network(net.clone()).predict_set(&set).unwrap();
        for (k, w) in set.iter().enumerate().step_by(7) {
            let out = net.forward(w.inputs).unwrap();
            let p = predict_model(&net, &w).unwrap();
            for i in 0..TEAM_SIZE {
                let x = POSITION_X.unscale(out[2 * i]).clamp(-52.5 - CLAMP_MARGIN, 52.5 + CLAMP_MARGIN);
                let y = POSITION_Y.unscale(out[2 * i + 1]).clamp(-34.0 - CLAMP_MARGIN, 34.0 + CLAMP_MARGIN);
                assert!((p.positions[i].x - x).abs() < 1e-9 && (p.positions[i].y - y).abs() < 1e-9);
                assert!(p.positions[i].distance(batched[k].positions[i]) < 1e-9);
            }
        }
    }
}

#[test]
fn lookback_mismatch_is_rejected() {
    let set = windows(&[3], 200, 5);
    let net = Network::initialized(ModelSpec::table(6, 10).unwrap(), 1).unwrap();
    assert!(predict_model(&net, &set.get(0)).is_err());
    assert!(Predictor::from_network(net).predict_set(&set).is_err());
}

#[test]
fn training_is_deterministic() {
    let set = windows(&[4], 500, 5);
    let spec = ModelSpec::table(1, 5).unwrap();
    let cfg = TrainConfig {
        epochs: 2,
        seed: 5,
        ..TrainConfig::default()
    };
    let a = train(&spec, &set, Some(&set), &cfg).unwrap();
    let b = train(&spec, &set, Some(&set), &cfg).unwrap();
    assert_eq!(a.network, b.network);
    assert_eq!(a.report.losses(), b.report.losses());
    assert_eq!(a.report.steps, b.report.steps);
    assert_eq!(a.report.train_matches, BTreeSet::from([4]));
    let c = train(&spec, &set, None, &TrainConfig { seed: 6, ..cfg }).unwrap();
    assert_ne!(a.network, c.network);
}

#[test]
fn training_reduces_loss_on_a_small_set() {
    let full = windows(&[5], 300, 1);
    let mut small = WindowSet::new(1);
    for w in full.iter().take(32) {
        small.push_window(w);
    }
    let spec = ModelSpec::table(1, 1).unwrap();
    let cfg = TrainConfig {
        epochs: 400,
        batch_size: 32,
        seed: 1,
        ..TrainConfig::default()
    };
    let t = train(&spec, &small, None, &cfg).unwrap();
    let losses = t.report.losses();
    assert!(losses.last().unwrap().0 < losses[0].0 / 10.0, "{:?}", losses[losses.len() - 1]);
}

#[test]
fn evaluation_on_training_matches_is_refused() {
    let set = windows(&[6, 7], 300, 5);
    assert!(check_unseen(&BTreeSet::from([6]), &set).is_err());
    assert!(check_unseen(&BTreeSet::from([8]), &set).is_ok());
}
