//! Mini-batch Adam training with per-epoch validation.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssdenoise_neural::{AdamConfig, AdamState, ModelSpec, Network, OUTPUT_WIDTH};

use crate::dataset::window::WindowSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    /// Seeds both the initialization and the per-epoch shuffles.
    pub seed: u64,
    /// Stop after this many optimizer steps even mid-epoch.
    pub max_steps: Option<usize>,
    /// Stop once an epoch's mean training loss falls below this.
    pub target_loss: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            batch_size: 64,
            adam: AdamConfig::default(),
            seed: 0,
            max_steps: None,
            target_loss: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean of the mini-batch losses seen during the epoch.
    pub train_loss: f64,
    pub validation_loss: Option<f64>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub spec: ModelSpec,
    pub seed: u64,
    pub steps: u64,
    pub epochs: Vec<EpochStats>,
    /// Epoch whose parameters were kept (best validation loss, or the last).
    pub best_epoch: usize,
    pub train_matches: BTreeSet<u32>,
}

impl TrainReport {
    /// Losses only; wall times differ between otherwise identical runs.
    pub fn losses(&self) -> Vec<(f64, Option<f64>)> {
        self.epochs.iter().map(|e| (e.train_loss, e.validation_loss)).collect()
    }

    pub fn final_train_loss(&self) -> f64 {
        self.epochs.last().map_or(f64::NAN, |e| e.train_loss)
    }

    /// Tab-separated log, one epoch per row.
    pub fn write_log<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let arch = self.spec.arch.map_or("custom".to_string(), |a| a.to_string());
        writeln!(
            w,
            "#train arch={arch} lookback={} seed={} steps={} best_epoch={}",
            self.spec.lookback, self.seed, self.steps, self.best_epoch
        )?;
        writeln!(w, "epoch\ttrain_loss\tvalidation_loss\twall_seconds")?;
        for e in &self.epochs {
            let val = e.validation_loss.map_or(String::new(), |v| v.to_string());
            writeln!(w, "{}\t{}\t{val}\t{:.3}", e.epoch, e.train_loss, e.wall_seconds)?;
        }
        Ok(())
    }

    pub fn save_log(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_log(std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub network: Network,
    pub report: TrainReport,
}

/// Mean loss over a whole set, evaluated in fixed-size batches.
pub fn evaluate_loss(net: &Network, set: &WindowSet) -> Result<f64> {
    const BATCH: usize = 256;
    let (mut inputs, mut targets) = (Vec::new(), Vec::new());
    let indices: Vec<usize> = (0..set.len()).collect();
    let mut total = 0.0;
    for chunk in indices.chunks(BATCH) {
        set.gather(chunk, &mut inputs, &mut targets);
        total += net.loss(&inputs, &targets, chunk.len())? * chunk.len() as f64;
    }
    Ok(total / set.len().max(1) as f64)
}

/// Fits `spec` to `training`, keeping the parameters of the epoch with the
/// lowest validation loss when a validation set is given.
pub fn train(spec: &ModelSpec, training: &WindowSet, validation: Option<&WindowSet>, config: &TrainConfig) -> Result<Trained> {
    if training.is_empty() {
        return Err(Error::Config("training split has no windows".into()));
    }
    if config.epochs == 0 || config.batch_size == 0 {
        return Err(Error::Config("epochs and batch size must be positive".into()));
    }
    for set in std::iter::once(training).chain(validation) {
        if set.lookback() != spec.lookback {
            return Err(Error::Config(format!(
                "dataset lookback {} does not match model lookback {}",
                set.lookback(),
                spec.lookback
            )));
        }
    }
    let validation = validation.filter(|v| !v.is_empty());

    let mut net = Network::initialized(spec.clone(), config.seed)?;
    let mut adam = AdamState::new(&net.params(), config.adam);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_5eed);
    let mut order: Vec<usize> = (0..training.len()).collect();
    let (mut inputs, mut targets) = (Vec::new(), Vec::new());
    let mut epochs = Vec::new();
    let mut best: Option<(f64, usize, Network)> = None;
    let mut steps = 0u64;

    'epochs: for epoch in 1..=config.epochs {
        let started = Instant::now();
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        let mut stop = false;
        for chunk in order.chunks(config.batch_size) {
            training.gather(chunk, &mut inputs, &mut targets);
            debug_assert_eq!(targets.len(), chunk.len() * OUTPUT_WIDTH);
            let (loss, grads) = net.backward(&inputs, &targets, chunk.len())?;
            if !loss.is_finite() {
                return Err(Error::Domain(format!("training loss diverged at step {steps}")));
            }
            adam.update(net.params_mut(), &grads.tensors)?;
            loss_sum += loss;
            batches += 1;
            steps += 1;
            if config.max_steps.is_some_and(|m| steps as usize >= m) {
                stop = true;
                break;
            }
        }
        let train_loss = loss_sum / batches as f64;
        let validation_loss = validation.map(|v| evaluate_loss(&net, v)).transpose()?;
        epochs.push(EpochStats {
            epoch,
            train_loss,
            validation_loss,
            wall_seconds: started.elapsed().as_secs_f64(),
        });
        log::info!("epoch {epoch}: train {train_loss:.6e} validation {validation_loss:?}");
        if let Some(v) = validation_loss {
            if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                best = Some((v, epoch, net.clone()));
            }
        }
        if stop || config.target_loss.is_some_and(|t| train_loss < t) {
            break 'epochs;
        }
    }

    let (best_epoch, network) = match best {
        Some((_, e, n)) => (e, n),
        None => (epochs.len(), net),
    };
    Ok(Trained {
        network,
        report: TrainReport {
            spec: spec.clone(),
            seed: config.seed,
            steps,
            epochs,
            best_epoch,
            train_matches: training.match_ids(),
        },
    })
}
