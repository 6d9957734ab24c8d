use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ssdenoise_core::pipeline::{train_from_files, Pipeline, PipelineConfig, Stage, StageSummary};
use ssdenoise_core::Error;

#[derive(Debug, Parser)]
#[command(name = "ssdenoise", version, about = "Simulate matches, train opponent-position models and evaluate them")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for match generation and training
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    matches: Option<u32>,
    #[arg(long, global = true)]
    cycles: Option<u32>,
    /// 60, 120 or 180
    #[arg(long, global = true)]
    view_width: Option<u32>,
    /// rotating_scan or ball_focused
    #[arg(long, global = true)]
    neck_policy: Option<String>,
    /// Comma-separated lookbacks, e.g. 5,10,15
    #[arg(long, global = true)]
    lookbacks: Option<String>,
    /// Comma-separated architecture ids 1..9
    #[arg(long, global = true)]
    architectures: Option<String>,
    /// Train, validation and test fractions, e.g. 0.8,0.1,0.1
    #[arg(long, global = true)]
    split: Option<String>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    #[arg(long, global = true)]
    learning_rate: Option<f64>,
    /// Opponent 1..11 to score
    #[arg(long, global = true)]
    subject: Option<usize>,
    /// Score all eleven opponents
    #[arg(long, global = true)]
    all_opponents: bool,
    #[arg(long, global = true)]
    min_count: Option<u64>,
    /// Accept lookbacks other than 5, 10, 15
    #[arg(long, global = true)]
    allow_custom: bool,
    /// Any config key, as key=value; may repeat
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Log progress to stderr
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate matches and write their traces
    Generate,
    /// Build windowed train/validation/test datasets
    Dataset {
        /// Build only this lookback
        #[arg(long)]
        lookback: Option<usize>,
    },
    /// Train models: the configured grid, or one model from --data
    Train(TrainArgs),
    /// Score predictors on the test split and write error tables
    Eval,
    /// Render figures and the summary from the error tables
    Report,
    /// Every stage in order
    All,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Architecture id 1..9
    #[arg(long)]
    arch: Option<u8>,
    #[arg(long)]
    lookback: Option<usize>,
    /// Dataset file, or a directory with train.tsv and validation.tsv;
    /// trains a single model outside the pipeline and writes the
    /// checkpoint to --out
    #[arg(long, requires_all = ["arch", "lookback", "out"])]
    data: Option<PathBuf>,
}

impl Global {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut o: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                o.push((k.to_string(), v));
            }
        };
        put("seed", self.seed.map(|v| v.to_string()));
        put("jobs", self.jobs.map(|v| v.to_string()));
        put("output_dir", self.out.as_ref().map(|p| p.display().to_string()));
        put("matches", self.matches.map(|v| v.to_string()));
        put("cycles_per_match", self.cycles.map(|v| v.to_string()));
        put("view_width", self.view_width.map(|v| v.to_string()));
        put("neck_policy", self.neck_policy.clone());
        put("allow_custom", self.allow_custom.then(|| "true".to_string()));
        put("lookbacks", self.lookbacks.clone());
        put("architectures", self.architectures.clone());
        put("split", self.split.clone());
        put("epochs", self.epochs.map(|v| v.to_string()));
        put("batch_size", self.batch_size.map(|v| v.to_string()));
        put("learning_rate", self.learning_rate.map(|v| v.to_string()));
        put("subject", self.subject.map(|v| v.to_string()));
        put("subject", self.all_opponents.then(|| "all".to_string()));
        put("min_count", self.min_count.map(|v| v.to_string()));
        o
    }
}

fn set_pairs(items: &[String]) -> Result<Vec<(String, String)>, Error> {
    items
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Config(format!("--set expects key=value, got `{s}`")))
        })
        .collect()
}

fn print_summary(stage: Stage, s: StageSummary) {
    println!("{}: {} ran, {} up to date", stage.name(), s.ran, s.skipped);
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut overrides = set_pairs(&cli.global.set)?;
    overrides.extend(cli.global.overrides());
    match &cli.command {
        Command::Dataset { lookback: Some(w) } => overrides.push(("lookbacks".into(), w.to_string())),
        Command::Train(t) if t.data.is_none() => {
            if let Some(a) = t.arch {
                overrides.push(("architectures".into(), a.to_string()));
            }
            if let Some(w) = t.lookback {
                overrides.push(("lookbacks".into(), w.to_string()));
            }
        }
        _ => {}
    }
    let config = PipelineConfig::load(cli.global.config.as_deref(), &overrides)?;

    if let (
        Command::Train(TrainArgs {
            arch: Some(arch),
            lookback: Some(lookback),
            data: Some(data),
        }),
        Some(ckpt),
    ) = (&cli.command, &cli.global.out)
    {
        let mut check = config.clone();
        check.lookbacks = vec![*lookback];
        check.architectures = vec![*arch];
        check.validate()?;
        let report = train_from_files(*arch, *lookback, data, ckpt, &config.train_config())?;
        println!(
            "trained arch{arch} lookback {lookback}: {} steps, final training loss {:.6}, best epoch {}",
            report.steps,
            report.final_train_loss(),
            report.best_epoch
        );
        return Ok(());
    }

    let pipeline = Pipeline::new(config)?;
    let stage = match cli.command {
        Command::Generate => Stage::Generate,
        Command::Dataset { .. } => Stage::Dataset,
        Command::Train(_) => Stage::Train,
        Command::Eval => Stage::Eval,
        Command::Report => Stage::Report,
        Command::All => {
            for (stage, s) in pipeline.run_all()? {
                print_summary(stage, s);
            }
            return Ok(());
        }
    };
    let s = pipeline.run(stage)?;
    print_summary(stage, s);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = if cli.global.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_user_error() { 1 } else { 2 })
        }
    }
}
