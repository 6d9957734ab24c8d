use std::fs;
use std::path::Path;

use ssdenoise_core::pipeline::{Pipeline, PipelineConfig, Stage};
use ssdenoise_core::Error;

fn small(out: &Path) -> PipelineConfig {
    let text = format!(
        "# desk-scale smoke run\nmatches = 2\ncycles_per_match = 400\narchitectures = 1\nlookbacks = 5\nepochs = 1\nsubject = all\noutput_dir = {}\n",
        out.display()
    );
    PipelineConfig::parse_str(&text, "small.cfg").unwrap()
}

fn ran(summaries: &[(Stage, ssdenoise_core::pipeline::StageSummary)], stage: Stage) -> usize {
    summaries.iter().find(|(s, _)| *s == stage).unwrap().1.ran
}

#[test]
fn full_run_then_everything_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("out");
    let first = Pipeline::new(small(&root)).unwrap().run_all().unwrap();
    assert_eq!(ran(&first, Stage::Generate), 2);
    assert_eq!(ran(&first, Stage::Train), 1);
    for f in [
        "traces/match_0000.tsv",
        "traces/match_0001.tsv",
        "datasets/split.tsv",
        "datasets/w5/train.tsv",
        "datasets/w5/validation.tsv",
        "datasets/w5/test.tsv",
        "models/arch1_w5.ckpt",
        "models/arch1_w5.log.tsv",
        "grids/index.tsv",
        "grids/w5_last_seen.tsv",
        "grids/w5_arch1.tsv",
        "grids/w5_errsub_arch1_vs_last_seen.tsv",
        "figures/w5_errsub_arch1_vs_last_seen.svg",
        "summary.txt",
    ] {
        assert!(root.join(f).is_file(), "missing {f}");
    }
    let again = Pipeline::new(small(&root)).unwrap().run_all().unwrap();
    for (stage, s) in again {
        assert_eq!(s.ran, 0, "{} reran", stage.name());
    }
}

#[test]
fn same_config_gives_identical_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    Pipeline::new(small(&a)).unwrap().run_all().unwrap();
    Pipeline::new(PipelineConfig { jobs: 2, ..small(&b) }).unwrap().run_all().unwrap();
    for f in ["summary.txt", "models/arch1_w5.ckpt", "grids/w5_arch1.tsv", "datasets/w5/test.tsv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn deleting_eval_outputs_regenerates_them_without_retraining() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("out");
    Pipeline::new(small(&root)).unwrap().run_all().unwrap();
    let before = fs::read(root.join("grids/w5_arch1.tsv")).unwrap();
    let ckpt = fs::read(root.join("models/arch1_w5.ckpt")).unwrap();
    fs::remove_dir_all(root.join("grids")).unwrap();
    let p = Pipeline::new(small(&root)).unwrap();
    assert_eq!(p.train().unwrap().ran, 0);
    assert_eq!(p.eval().unwrap().ran, 1);
    assert_eq!(fs::read(root.join("grids/w5_arch1.tsv")).unwrap(), before);
    assert_eq!(fs::read(root.join("models/arch1_w5.ckpt")).unwrap(), ckpt);
}

#[test]
fn changed_intermediate_halts_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("out");
    Pipeline::new(small(&root)).unwrap().dataset().unwrap();
    let trace = root.join("traces/match_0001.tsv");
    let mut text = fs::read_to_string(&trace).unwrap();
    text.push_str("garbage\n");
    fs::write(&trace, text).unwrap();
    let err = Pipeline::new(small(&root)).unwrap().run_all().unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("generate"), "{msg}");
    assert!(msg.contains("match_0001.tsv"), "{msg}");
    assert!(err.is_user_error());
}

#[test]
fn stage_failure_names_the_stage_and_keeps_earlier_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("out");
    fs::create_dir_all(&root).unwrap();
    // a file where the models directory should be
    fs::write(root.join("models"), "not a directory").unwrap();
    let err = Pipeline::new(small(&root)).unwrap().run_all().unwrap_err();
    match &err {
        Error::Stage { stage, .. } => assert_eq!(*stage, "train"),
        other => panic!("unexpected {other}"),
    }
    assert!(root.join("datasets/w5/test.tsv").is_file());
}

#[test]
fn config_rules() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.cfg");
    fs::write(&path, "matches = 10\n").unwrap();
    let c = PipelineConfig::load(Some(&path), &[("matches".into(), "3".into())]).unwrap();
    assert_eq!(c.matches, 3);
    let c = PipelineConfig::load(Some(&path), &[]).unwrap();
    assert_eq!(c.matches, 10);
    assert!(PipelineConfig::load(None, &[("lookbacks".into(), "7".into())]).is_err());
    let c = PipelineConfig::load(
        None,
        &[("allow_custom".into(), "true".into()), ("lookbacks".into(), "7".into())],
    )
    .unwrap();
    assert_eq!(c.lookbacks, vec![7]);
    assert_eq!(PipelineConfig::load(None, &[]).unwrap(), PipelineConfig::default());
    fs::write(&path, "matches = 10\nspeed = 3\n").unwrap();
    let err = PipelineConfig::load(Some(&path), &[]).unwrap_err().to_string();
    assert!(err.contains("speed") && err.contains("line 2"), "{err}");
}

#[test]
fn best_lstm_is_compared_with_best_dnn_without_a_validation_split() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("out");
    let cfg = PipelineConfig {
        architectures: vec![1, 2, 6],
        cycles_per_match: 300,
        ..small(&root)
    };
    Pipeline::new(cfg).unwrap().run_all().unwrap();
    assert!(fs::read_to_string(root.join("datasets/w5/validation.tsv")).unwrap().lines().count() <= 2);
    let dnn = ["arch1", "arch2"]
        .into_iter()
        .min_by(|a, b| {
            let loss = |m: &str| {
                ssdenoise_core::pipeline::selection_loss(&root.join(format!("models/{m}_w5.log.tsv")))
                    .unwrap()
                    .unwrap()
            };
            loss(a).total_cmp(&loss(b))
        })
        .unwrap();
    assert!(root.join(format!("grids/w5_errsub_arch6_vs_{dnn}.tsv")).is_file());
    assert!(fs::read_to_string(root.join("summary.txt")).unwrap().contains(&format!("arch6 vs {dnn}")));
}
