//! The end-to-end pipeline: generate, dataset, train, eval, report.
//!
//! Every unit of work records a content-hash stamp of its inputs and
//! outputs under `output_dir/.stamps`, so rerunning skips whatever is
//! already up to date.

pub mod config;
pub mod memo;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use log::info;
use rayon::prelude::*;
use ssdenoise_neural::{Checkpoint, ModelKind, ModelSpec};

use crate::dataset::{extract_records, read_dataset, split_by_match, split_sequences, write_dataset, MatchSplit, WindowSet};
use crate::error::{Error, Result};
use crate::evaluation::{check_unseen, evaluate, render_reports, write_tables, EvaluationTables, GridEntry};
use crate::predictors::{train, Predictor, TrainConfig};
use crate::simulator::{read_trace, run_match, write_trace, MatchConfig, TraceHeader, ViewConfig};

pub use config::{PipelineConfig, REFERENCE_LOOKBACKS};
pub use memo::{hash_file, KeyBuilder, Memo, Output};

/// Bumped whenever an on-disk format or algorithm changes.
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Generate,
    Dataset,
    Train,
    Eval,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Generate, Stage::Dataset, Stage::Train, Stage::Eval, Stage::Report];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Generate => "generate",
            Stage::Dataset => "dataset",
            Stage::Train => "train",
            Stage::Eval => "eval",
            Stage::Report => "report",
        }
    }
}

/// How many units of a stage ran and how many were reused.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageSummary {
    pub ran: usize,
    pub skipped: usize,
}

impl StageSummary {
    fn add(&mut self, ran: bool) {
        if ran {
            self.ran += 1;
        } else {
            self.skipped += 1;
        }
    }
}

/// Seed of one simulated match, derived from the pipeline seed.
pub fn match_seed(seed: u64, match_id: u32) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (u64::from(match_id) + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Label of a reference architecture in file names and tables.
pub fn arch_label(arch: u8) -> String {
    format!("arch{arch}")
}

pub const SPLIT_NAMES: [&str; 3] = ["train", "validation", "test"];

pub fn write_split(split: &MatchSplit, path: &Path) -> Result<()> {
    let mut text = String::from("match\tsplit\n");
    for (name, ids) in SPLIT_NAMES.iter().zip(split.parts()) {
        for id in ids {
            text.push_str(&format!("{id}\t{name}\n"));
        }
    }
    write_atomic(path, text.as_bytes())
}

pub fn read_split(path: &Path) -> Result<MatchSplit> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut split = MatchSplit::default();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "match\tsplit")) => {}
        _ => return Err(Error::parse(&name, 1, "expected header `match<TAB>split`")),
    }
    for (k, line) in lines {
        let (id, part) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(&name, k + 1, "expected two fields"))?;
        let id: u32 = id.parse().map_err(|_| Error::parse(&name, k + 1, format!("bad match id `{id}`")))?;
        let set = match part {
            "train" => &mut split.train,
            "validation" => &mut split.validation,
            "test" => &mut split.test,
            other => return Err(Error::parse(&name, k + 1, format!("unknown split `{other}`"))),
        };
        if !set.insert(id) {
            return Err(Error::parse(&name, k + 1, format!("match {id} listed twice")));
        }
    }
    let [a, b, c] = split.parts();
    if a.intersection(b).chain(a.intersection(c)).chain(b.intersection(c)).next().is_some() {
        return Err(Error::parse(&name, 0, "a match is assigned to two splits"));
    }
    Ok(split)
}

/// Writes through a temporary file so an interrupted write never leaves a
/// truncated output behind under the final name.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    with_atomic(path, |w| w.write_all(bytes).map_err(|e| Error::io(path, e)))
}

fn with_atomic(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("partial");
    let file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(|e| Error::io(&tmp, e))?;
    drop(w);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn key_of_outputs(key: &mut KeyBuilder, outputs: &[Output]) {
    for o in outputs {
        key.add("input", &o.hash);
    }
}

/// Loss used to pick the best model of a kind: the minimum validation loss
/// in a training log, or the last training loss when there was no
/// validation split.
pub fn selection_loss(log: &Path) -> Result<Option<f64>> {
    let text = fs::read_to_string(log).map_err(|e| Error::io(log, e))?;
    let mut best: Option<f64> = None;
    let mut last_train = None;
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("epoch")) {
        let cols: Vec<&str> = line.split('\t').collect();
        last_train = cols.get(1).and_then(|v| v.parse::<f64>().ok()).or(last_train);
        if let Some(v) = cols.get(2).and_then(|v| v.parse::<f64>().ok()) {
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    Ok(best.or(last_train))
}

pub struct Pipeline {
    config: PipelineConfig,
    root: PathBuf,
    memo: Memo,
    pool: rayon::ThreadPool,
    generated: OnceLock<Generated>,
    datasets: OnceLock<Datasets>,
    trained: OnceLock<Trained>,
    evaluated: OnceLock<(StageSummary, Vec<Output>)>,
    reported: OnceLock<StageSummary>,
}

type Generated = (StageSummary, Vec<Output>);
/// Per-lookback dataset files, then the split file.
type Datasets = (StageSummary, Vec<(usize, Vec<Output>)>, Vec<Output>);
type Trained = (StageSummary, Vec<(u8, usize, Vec<Output>)>);

/// Computes a stage result at most once per pipeline instance.
fn cached<T: Clone>(cell: &OnceLock<T>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    if let Some(v) = cell.get() {
        return Ok(v.clone());
    }
    let v = f()?;
    Ok(cell.get_or_init(|| v).clone())
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let root = config.output_dir.clone();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", config.jobs)))?;
        Ok(Self {
            memo: Memo::new(&root),
            root,
            config,
            pool,
            generated: OnceLock::new(),
            datasets: OnceLock::new(),
            trained: OnceLock::new(),
            evaluated: OnceLock::new(),
            reported: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn trace_path(&self, match_id: u32) -> PathBuf {
        self.root.join("traces").join(format!("match_{match_id:04}.tsv"))
    }

    pub fn split_path(&self) -> PathBuf {
        self.root.join("datasets").join("split.tsv")
    }

    pub fn dataset_path(&self, lookback: usize, part: &str) -> PathBuf {
        self.root.join("datasets").join(format!("w{lookback}")).join(format!("{part}.tsv"))
    }

    pub fn checkpoint_path(&self, arch: u8, lookback: usize) -> PathBuf {
        self.root.join("models").join(format!("{}_w{lookback}.ckpt", arch_label(arch)))
    }

    pub fn log_path(&self, arch: u8, lookback: usize) -> PathBuf {
        self.root.join("models").join(format!("{}_w{lookback}.log.tsv", arch_label(arch)))
    }

    fn match_config(&self) -> MatchConfig {
        MatchConfig {
            cycles: self.config.cycles_per_match,
            view: ViewConfig {
                width: self.config.view_width,
                neck_policy: self.config.neck_policy,
                ..ViewConfig::default()
            },
        }
    }

    /// Runs `produce` unless `unit` is already fresh for `key`.
    fn unit(&self, unit: &str, key: &KeyBuilder, produce: impl FnOnce() -> Result<Vec<PathBuf>>) -> Result<(bool, Vec<Output>)> {
        let key = key.finish();
        if let Some(outputs) = self.memo.fresh(unit, &key)? {
            info!("{unit}: up to date");
            return Ok((false, outputs));
        }
        info!("{unit}: running");
        let paths = produce()?;
        Ok((true, self.memo.record(unit, &key, &paths)?))
    }

    fn generate_match(&self, match_id: u32) -> Result<(bool, Vec<Output>)> {
        let seed = match_seed(self.config.seed, match_id);
        let mut key = KeyBuilder::new("generate");
        key.add("format", FORMAT_VERSION)
            .add("seed", seed)
            .add("cycles", self.config.cycles_per_match)
            .add("view_width", self.config.view_width.degrees())
            .add("neck_policy", format!("{:?}", self.config.neck_policy));
        let path = self.trace_path(match_id);
        self.unit(&format!("generate_match_{match_id:04}"), &key, || {
            let frames = run_match(&self.match_config(), seed);
            let header = TraceHeader {
                match_id,
                seed,
                cycles: self.config.cycles_per_match,
            };
            with_atomic(&path, |w| write_trace(w, &header, frames).map_err(|e| Error::io(&path, e)))?;
            Ok(vec![path.clone()])
        })
    }

    fn generated(&self) -> Result<Generated> {
        staged(Stage::Generate, || cached(&self.generated, || self.generate_outputs()))
    }

    fn generate_outputs(&self) -> Result<Generated> {
        let results: Vec<Result<(bool, Vec<Output>)>> =
            self.pool.install(|| (0..self.config.matches).into_par_iter().map(|m| self.generate_match(m)).collect());
        let mut summary = StageSummary::default();
        let mut outputs = Vec::new();
        for r in results {
            let (ran, out) = r?;
            summary.add(ran);
            outputs.extend(out);
        }
        Ok((summary, outputs))
    }

    pub fn generate(&self) -> Result<StageSummary> {
        Ok(self.generated()?.0)
    }

    fn split_outputs(&self, traces: &[Output], summary: &mut StageSummary) -> Result<Vec<Output>> {
        let mut key = KeyBuilder::new("split");
        key.add("format", FORMAT_VERSION)
            .add("matches", self.config.matches)
            .add("fractions", format!("{:?}", self.config.split))
            .add("seed", self.config.seed);
        key_of_outputs(&mut key, traces);
        let path = self.split_path();
        let (ran, out) = self.unit("split", &key, || {
            let ids: Vec<u32> = (0..self.config.matches).collect();
            let split = split_by_match(&ids, self.config.split, self.config.seed)?;
            write_split(&split, &path)?;
            Ok(vec![path.clone()])
        })?;
        summary.add(ran);
        Ok(out)
    }

    fn datasets(&self) -> Result<Datasets> {
        let (_, traces) = self.generated()?;
        staged(Stage::Dataset, || cached(&self.datasets, || self.dataset_outputs(&traces)))
    }

    fn dataset_outputs(&self, traces: &[Output]) -> Result<Datasets> {
        let mut summary = StageSummary::default();
        let split_out = self.split_outputs(traces, &mut summary)?;
        let mut per_lookback = Vec::new();
        // traces are parsed at most once, and only if some lookback is stale
        let mut sequences = None;
        for &w in &self.config.lookbacks {
            let mut key = KeyBuilder::new("dataset");
            key.add("format", FORMAT_VERSION).add("lookback", w);
            key_of_outputs(&mut key, traces);
            key_of_outputs(&mut key, &split_out);
            let paths: Vec<PathBuf> = SPLIT_NAMES.iter().map(|p| self.dataset_path(w, p)).collect();
            let (ran, out) = self.unit(&format!("dataset_w{w}"), &key, || {
                if sequences.is_none() {
                    let mut all = Vec::new();
                    for m in 0..self.config.matches {
                        let trace = read_trace(&self.trace_path(m))?;
                        if trace.header.match_id != m {
                            return Err(Error::parse(
                                self.trace_path(m).display(),
                                1,
                                format!("header names match {}, expected {m}", trace.header.match_id),
                            ));
                        }
                        all.extend(split_sequences(m, extract_records(&trace)));
                    }
                    sequences = Some(all);
                }
                let all = WindowSet::from_sequences(sequences.as_ref().expect("parsed above"), w);
                let split = read_split(&self.split_path())?;
                let dir = paths[0].parent().expect("dataset directory");
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                for (ids, path) in split.parts().into_iter().zip(&paths) {
                    let part = all.subset(ids);
                    let tmp = path.with_extension("partial");
                    write_dataset(&part, &tmp)?;
                    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
                }
                Ok(paths.clone())
            })?;
            summary.add(ran);
            per_lookback.push((w, out));
        }
        Ok((summary, per_lookback, split_out))
    }

    pub fn dataset(&self) -> Result<StageSummary> {
        Ok(self.datasets()?.0)
    }

    fn trained(&self) -> Result<Trained> {
        let (_, datasets, _) = self.datasets()?;
        staged(Stage::Train, || cached(&self.trained, || self.train_outputs(&datasets)))
    }

    fn train_outputs(&self, datasets: &[(usize, Vec<Output>)]) -> Result<Trained> {
        let units: Vec<(u8, usize, &Vec<Output>)> = datasets
            .iter()
            .flat_map(|(w, out)| self.config.architectures.iter().map(move |&a| (a, *w, out)))
            .collect();
        let cfg = self.config.train_config();
        let loaded: std::sync::Mutex<Vec<(usize, std::sync::Arc<(WindowSet, WindowSet)>)>> = Default::default();
        let load = |w: usize| -> Result<std::sync::Arc<(WindowSet, WindowSet)>> {
            let mut cache = loaded.lock().expect("dataset cache");
            if let Some((_, s)) = cache.iter().find(|(lw, _)| *lw == w) {
                return Ok(s.clone());
            }
            let sets = std::sync::Arc::new((
                read_dataset(&self.dataset_path(w, "train"))?,
                read_dataset(&self.dataset_path(w, "validation"))?,
            ));
            cache.push((w, sets.clone()));
            Ok(sets)
        };
        let results: Vec<Result<(bool, Vec<Output>)>> = self.pool.install(|| {
            units
                .par_iter()
                .map(|&(arch, w, data)| {
                    let mut key = KeyBuilder::new("train");
                    key.add("format", FORMAT_VERSION)
                        .add("arch", arch)
                        .add("lookback", w)
                        .add("epochs", cfg.epochs)
                        .add("batch_size", cfg.batch_size)
                        .add("learning_rate", cfg.adam.learning_rate)
                        .add("seed", cfg.seed);
                    // the test split never influences training
                    key_of_outputs(&mut key, &data[..2]);
                    let ckpt = self.checkpoint_path(arch, w);
                    let log = self.log_path(arch, w);
                    self.unit(&format!("train_{}_w{w}", arch_label(arch)), &key, || {
                        let sets = load(w)?;
                        let (training, validation) = (&sets.0, &sets.1);
                        let spec = ModelSpec::table(arch, w)?;
                        let validation = (!validation.is_empty()).then_some(validation);
                        let trained = train(&spec, training, validation, &cfg)?;
                        let dir = ckpt.parent().expect("models directory");
                        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                        trained.report.save_log(&log)?;
                        let checkpoint = Checkpoint {
                            network: trained.network,
                            seed: cfg.seed,
                            steps: trained.report.steps,
                        };
                        let tmp = ckpt.with_extension("partial");
                        checkpoint.save(&tmp)?;
                        fs::rename(&tmp, &ckpt).map_err(|e| Error::io(&ckpt, e))?;
                        Ok(vec![ckpt.clone(), log.clone()])
                    })
                })
                .collect()
        });
        let mut summary = StageSummary::default();
        let mut models = Vec::new();
        for (r, &(arch, w, _)) in results.into_iter().zip(&units) {
            let (ran, out) = r?;
            summary.add(ran);
            models.push((arch, w, out));
        }
        Ok((summary, models))
    }

    pub fn train(&self) -> Result<StageSummary> {
        Ok(self.trained()?.0)
    }

    fn evaluated(&self) -> Result<(StageSummary, Vec<Output>)> {
        let (_, datasets, split) = self.datasets()?;
        let (_, models) = self.trained()?;
        staged(Stage::Eval, || cached(&self.evaluated, || self.eval_outputs(&datasets, &split, &models)))
    }

    fn eval_outputs(
        &self,
        datasets: &[(usize, Vec<Output>)],
        split: &[Output],
        models: &[(u8, usize, Vec<Output>)],
    ) -> Result<(StageSummary, Vec<Output>)> {
        let mut key = KeyBuilder::new("eval");
        key.add("format", FORMAT_VERSION)
            .add("subject", self.config.subject.label())
            .add("min_count", self.config.min_count);
        key_of_outputs(&mut key, split);
        for (w, out) in datasets {
            key.add("lookback", w);
            key_of_outputs(&mut key, &out[2..]);
        }
        for (arch, w, out) in models {
            key.add("model", format!("{arch}_{w}"));
            // checkpoint only; logs carry wall-clock times
            key_of_outputs(&mut key, &out[..1]);
        }
        let grids_dir = self.root.join("grids");
        let mut summary = StageSummary::default();
        let (ran, out) = self.unit("eval", &key, || {
            let tables = self.evaluate_models(models)?;
            write_tables(&tables, &self.root)?;
            let mut files: Vec<PathBuf> = fs::read_dir(&grids_dir)
                .map_err(|e| Error::io(&grids_dir, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
                .collect();
            files.sort();
            Ok(files)
        })?;
        summary.add(ran);
        Ok((summary, out))
    }

    fn evaluate_models(&self, models: &[(u8, usize, Vec<Output>)]) -> Result<EvaluationTables> {
        let split = read_split(&self.split_path())?;
        let subject = self.config.subject;
        let mut tables = EvaluationTables {
            subject,
            min_count: self.config.min_count,
            grids: Vec::new(),
            comparisons: Vec::new(),
            baseline: "last_seen".into(),
        };
        for &w in &self.config.lookbacks {
            let test = read_dataset(&self.dataset_path(w, "test"))?;
            check_unseen(&split.train, &test)?;
            check_unseen(&split.validation, &test)?;
            for (name, predictor) in [("last_seen", Predictor::last_seen()), ("velocity", Predictor::velocity_extrapolation())] {
                tables.grids.push(GridEntry {
                    lookback: w,
                    method: name.into(),
                    grid: evaluate(&predictor, &test, subject)?,
                });
            }
            let mut best: [Option<(f64, String)>; 2] = [None, None];
            let trained: Vec<u8> = models.iter().filter(|m| m.1 == w).map(|m| m.0).collect();
            let grids: Vec<Result<GridEntry>> = self.pool.install(|| {
                trained
                    .par_iter()
                    .map(|&arch| {
                        let ckpt = Checkpoint::load(&self.checkpoint_path(arch, w))?;
                        Ok(GridEntry {
                            lookback: w,
                            method: arch_label(arch),
                            grid: evaluate(&Predictor::from_network(ckpt.network), &test, subject)?,
                        })
                    })
                    .collect()
            });
            for (entry, &arch) in grids.into_iter().zip(&trained) {
                let entry = entry?;
                let label = entry.method.clone();
                tables.comparisons.push((w, label.clone(), "last_seen".into()));
                tables.grids.push(entry);
                let kind = ModelSpec::table(arch, w)?.kind;
                if let Some(loss) = selection_loss(&self.log_path(arch, w))? {
                    let slot = &mut best[usize::from(kind == ModelKind::Lstm)];
                    if slot.as_ref().is_none_or(|(b, _)| loss < *b) {
                        *slot = Some((loss, label));
                    }
                }
            }
            if let [Some((_, dnn)), Some((_, lstm))] = &best {
                tables.comparisons.push((w, lstm.clone(), dnn.clone()));
            }
        }
        Ok(tables)
    }

    pub fn eval(&self) -> Result<StageSummary> {
        Ok(self.evaluated()?.0)
    }

    fn report_outputs(&self, grids: &[Output]) -> Result<StageSummary> {
        let mut key = KeyBuilder::new("report");
        key.add("format", FORMAT_VERSION);
        key_of_outputs(&mut key, grids);
        let mut summary = StageSummary::default();
        let (ran, _) = self.unit("report", &key, || {
            let tables = crate::evaluation::read_tables(&self.root)?;
            render_reports(&tables, &self.root)?;
            let figures = self.root.join("figures");
            let mut files: Vec<PathBuf> = fs::read_dir(&figures)
                .map_err(|e| Error::io(&figures, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .collect();
            files.sort();
            files.push(self.root.join("summary.txt"));
            Ok(files)
        })?;
        summary.add(ran);
        Ok(summary)
    }

    pub fn report(&self) -> Result<StageSummary> {
        let (_, grids) = self.evaluated()?;
        staged(Stage::Report, || cached(&self.reported, || self.report_outputs(&grids)))
    }

    /// Runs every stage in order and returns what each one did.
    pub fn run_all(&self) -> Result<Vec<(Stage, StageSummary)>> {
        Ok(vec![
            (Stage::Generate, self.generate()?),
            (Stage::Dataset, self.dataset()?),
            (Stage::Train, self.train()?),
            (Stage::Eval, self.eval()?),
            (Stage::Report, self.report()?),
        ])
    }

    pub fn run(&self, stage: Stage) -> Result<StageSummary> {
        match stage {
            Stage::Generate => self.generate(),
            Stage::Dataset => self.dataset(),
            Stage::Train => self.train(),
            Stage::Eval => self.eval(),
            Stage::Report => self.report(),
        }
    }
}

/// Upstream units that fail keep their own stage name.
fn staged<T>(stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().map_err(|e| match e {
        Error::Stage { .. } => e,
        other => Error::Stage {
            stage: stage.name(),
            source: Box::new(other),
        },
    })
}

/// Reads a training set from `data`: either a dataset file, or a directory
/// holding `train.tsv` and optionally `validation.tsv`.
pub fn load_training_data(data: &Path) -> Result<(WindowSet, Option<WindowSet>)> {
    if data.is_dir() {
        let validation = data.join("validation.tsv");
        let validation = if validation.exists() { Some(read_dataset(&validation)?) } else { None };
        Ok((read_dataset(&data.join("train.tsv"))?, validation.filter(|v| !v.is_empty())))
    } else {
        Ok((read_dataset(data)?, None))
    }
}

/// Trains one reference architecture on files and writes the checkpoint to
/// `out` and its log next to it as `<out>.log.tsv`.
pub fn train_from_files(arch: u8, lookback: usize, data: &Path, out: &Path, config: &TrainConfig) -> Result<crate::predictors::TrainReport> {
    let (training, validation) = load_training_data(data)?;
    if training.lookback() != lookback {
        return Err(Error::Config(format!(
            "{} holds lookback {} windows, not {lookback}",
            data.display(),
            training.lookback()
        )));
    }
    let spec = ModelSpec::table(arch, lookback)?;
    let trained = train(&spec, &training, validation.as_ref(), config)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut log = out.as_os_str().to_owned();
    log.push(".log.tsv");
    trained.report.save_log(Path::new(&log))?;
    Checkpoint {
        network: trained.network,
        seed: config.seed,
        steps: trained.report.steps,
    }
    .save(out)?;
    Ok(trained.report)
}
