//! Baselines and trained models behind one prediction interface.

pub mod train;

use ssdenoise_neural::{ModelKind, Network, OUTPUT_WIDTH};

use crate::dataset::record::{field, left_offset, BLOCK_WIDTH};
use crate::dataset::scaling::{POSITION_X, POSITION_Y, POS_COUNT, VELOCITY};
use crate::dataset::window::{WindowRef, WindowSet};
use crate::error::{Error, Result};
use crate::simulator::{Position, TEAM_SIZE};

pub use train::{evaluate_loss, train, EpochStats, TrainConfig, TrainReport, Trained};

/// Model outputs are clamped to the field plus this margin, in meters.
pub const CLAMP_MARGIN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredictorKind {
    LastSeen,
    /// Last seen position moved by the believed velocity for every cycle
    /// since the sighting. Not one of the reference methods.
    VelocityExtrapolation,
    Dnn,
    Lstm,
}

impl PredictorKind {
    pub fn label(self) -> &'static str {
        match self {
            PredictorKind::LastSeen => "last_seen",
            PredictorKind::VelocityExtrapolation => "velocity",
            PredictorKind::Dnn => "dnn",
            PredictorKind::Lstm => "lstm",
        }
    }
}

/// Predicted positions of the 11 opponents in meters. `unknown[i]` marks
/// opponents the observer had forgotten at the window's last cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub positions: [Position; TEAM_SIZE],
    pub unknown: [bool; TEAM_SIZE],
}

fn unknown_flags(last_row: &[f64]) -> [bool; TEAM_SIZE] {
    std::array::from_fn(|i| last_row[left_offset(i) + field::POS_COUNT] >= 1.0)
}

/// Unscaled believed positions from the window's last cycle.
pub fn predict_last_seen(w: &WindowRef<'_>) -> Prediction {
    let row = w.last_row();
    Prediction {
        positions: std::array::from_fn(|i| {
            let o = left_offset(i);
            Position::new(POSITION_X.unscale(row[o + field::X]), POSITION_Y.unscale(row[o + field::Y]))
        }),
        unknown: unknown_flags(row),
    }
}

pub fn predict_velocity_extrapolation(w: &WindowRef<'_>) -> Prediction {
    let mut p = predict_last_seen(w);
    let row = w.last_row();
    for i in 0..TEAM_SIZE {
        if p.unknown[i] {
            continue;
        }
        let o = left_offset(i);
        let age = POS_COUNT.unscale(row[o + field::POS_COUNT]).round();
        let vx = VELOCITY.unscale(row[o + field::VX]);
        let vy = VELOCITY.unscale(row[o + field::VY]);
        p.positions[i] = Position::new(p.positions[i].x + age * vx, p.positions[i].y + age * vy).clamp_to_field();
    }
    p
}

/// Unscales 22 model outputs and clamps them near the field.
pub fn unscale_outputs(outputs: &[f64], last_row: &[f64]) -> Prediction {
    Prediction {
        positions: std::array::from_fn(|i| {
            Position::new(POSITION_X.unscale(outputs[2 * i]), POSITION_Y.unscale(outputs[2 * i + 1]))
                .clamp_with_margin(CLAMP_MARGIN)
        }),
        unknown: unknown_flags(last_row),
    }
}

pub fn predict_model(net: &Network, w: &WindowRef<'_>) -> Result<Prediction> {
    check_lookback(net, w.lookback)?;
    let out = net.forward(w.inputs)?;
    Ok(unscale_outputs(&out, w.last_row()))
}

fn check_lookback(net: &Network, lookback: usize) -> Result<()> {
    let spec = net.spec();
    if spec.lookback != lookback || spec.output_width != OUTPUT_WIDTH || spec.input_width != BLOCK_WIDTH {
        return Err(Error::Config(format!(
            "model expects lookback {} ({} -> {}), window has lookback {lookback}",
            spec.lookback, spec.input_width, spec.output_width
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Predictor {
    kind: PredictorKind,
    model: Option<Network>,
}

impl Predictor {
    pub fn last_seen() -> Self {
        Self {
            kind: PredictorKind::LastSeen,
            model: None,
        }
    }

    pub fn velocity_extrapolation() -> Self {
        Self {
            kind: PredictorKind::VelocityExtrapolation,
            model: None,
        }
    }

    pub fn from_network(net: Network) -> Self {
        let kind = match net.spec().kind {
            ModelKind::Dnn => PredictorKind::Dnn,
            ModelKind::Lstm => PredictorKind::Lstm,
        };
        Self { kind, model: Some(net) }
    }

    pub fn kind(&self) -> PredictorKind {
        self.kind
    }

    pub fn network(&self) -> Option<&Network> {
        self.model.as_ref()
    }

    /// Window length the predictor reads; baselines only need the last cycle.
    pub fn lookback(&self) -> usize {
        self.model.as_ref().map_or(1, |m| m.spec().lookback)
    }

    pub fn predict(&self, w: &WindowRef<'_>) -> Result<Prediction> {
        match (&self.model, self.kind) {
            (Some(net), _) => predict_model(net, w),
            (None, PredictorKind::VelocityExtrapolation) => Ok(predict_velocity_extrapolation(w)),
            (None, _) => Ok(predict_last_seen(w)),
        }
    }

    /// Predictions for every window of `set`, batching model forward passes.
    pub fn predict_set(&self, set: &WindowSet) -> Result<Vec<Prediction>> {
        let Some(net) = &self.model else {
            return set.iter().map(|w| self.predict(&w)).collect();
        };
        check_lookback(net, set.lookback())?;
        const BATCH: usize = 256;
        let mut out = Vec::with_capacity(set.len());
        let (mut inputs, mut targets) = (Vec::new(), Vec::new());
        let indices: Vec<usize> = (0..set.len()).collect();
        for chunk in indices.chunks(BATCH) {
            set.gather(chunk, &mut inputs, &mut targets);
            let y = net.forward_batch(&inputs, chunk.len())?;
            for (k, &i) in chunk.iter().enumerate() {
                out.push(unscale_outputs(&y[k * OUTPUT_WIDTH..(k + 1) * OUTPUT_WIDTH], set.get(i).last_row()));
            }
        }
        Ok(out)
    }
}
