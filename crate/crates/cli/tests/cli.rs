use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ssdenoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssdenoise"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn small_args(out: &Path) -> Vec<String> {
    [
        "--out",
        out.to_str().unwrap(),
        "--matches",
        "2",
        "--cycles",
        "300",
        "--architectures",
        "1",
        "--lookbacks",
        "5",
        "--epochs",
        "1",
        "--all-opponents",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[test]
fn all_then_rerun_skips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let mut args = vec!["all".to_string()];
    args.extend(small_args(&out));
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let first = ssdenoise(&argv);
    assert!(first.status.success(), "{}", text(&first));
    assert!(text(&first).contains("generate: 2 ran"));
    assert!(out.join("summary.txt").is_file());
    let second = ssdenoise(&argv);
    assert!(second.status.success());
    for stage in ["generate", "dataset", "train", "eval", "report"] {
        assert!(text(&second).contains(&format!("{stage}: 0 ran")), "{}", text(&second));
    }
}

#[test]
fn single_stages_and_standalone_training() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let mut args = vec!["dataset".to_string()];
    args.extend(small_args(&out));
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = ssdenoise(&argv);
    assert!(o.status.success(), "{}", text(&o));
    assert!(out.join("datasets/w5/train.tsv").is_file());
    assert!(!out.join("models").exists());

    let ckpt = dir.path().join("m/arch6.ckpt");
    let data = out.join("datasets/w5");
    let o = ssdenoise(&[
        "train",
        "--arch",
        "6",
        "--lookback",
        "5",
        "--epochs",
        "1",
        "--seed",
        "3",
        "--data",
        data.to_str().unwrap(),
        "--out",
        ckpt.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o));
    assert!(ckpt.is_file());
    assert!(dir.path().join("m/arch6.ckpt.log.tsv").is_file());

    let o = ssdenoise(&[
        "train",
        "--arch",
        "6",
        "--lookback",
        "10",
        "--data",
        data.to_str().unwrap(),
        "--out",
        ckpt.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    assert!(text(&o).contains("lookback"));
}

#[test]
fn user_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "matches = 2\ncolour = blue\n").unwrap();
    let o = ssdenoise(&["generate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("colour"), "{}", text(&o));

    let o = ssdenoise(&["all", "--lookbacks", "7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("lookback 7"), "{}", text(&o));

    let o = ssdenoise(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));

    let o = ssdenoise(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    let out = dir.path().join("run");
    fs::write(&cfg, format!("matches = 10\ncycles_per_match = 100\noutput_dir = {}\n", out.display())).unwrap();
    let o = ssdenoise(&["generate", "--config", cfg.to_str().unwrap(), "--matches", "3"]);
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).contains("generate: 3 ran"), "{}", text(&o));
    assert_eq!(fs::read_dir(out.join("traces")).unwrap().count(), 3);
}
