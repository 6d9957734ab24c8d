//! Architecture descriptions and the network that realises them.
//!
//! A DNN is a stack of ReLU dense layers followed by a linear output layer.
//! An LSTM model runs one LSTM layer over the window and feeds the final
//! hidden state through the same kind of dense stack.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dense::{Activation, DenseLayer};
use crate::error::{shape_err, NeuralError, Result};
use crate::lstm::{LstmCell, LstmTape};
use crate::tensor::{Tensor, View};

/// Width of one scaled noisy feature row.
pub const INPUT_WIDTH: usize = 137;
/// x, y for each of the 11 opponents.
pub const OUTPUT_WIDTH: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Dnn,
    Lstm,
}

/// What a DNN reads from a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DnnInput {
    /// Only the final row of the window.
    LastCycle,
    /// All `lookback` rows, flattened.
    Window,
}

/// Hidden-layer sizes of the nine reference architectures, indexed by id - 1.
/// For LSTM rows the first entry is the LSTM width.
const ARCHITECTURES: [(ModelKind, &[usize]); 9] = [
    (ModelKind::Dnn, &[128, 64]),
    (ModelKind::Dnn, &[256, 128]),
    (ModelKind::Dnn, &[512, 256]),
    (ModelKind::Dnn, &[256, 128, 64, 32]),
    (ModelKind::Dnn, &[512, 256, 128, 64, 32]),
    (ModelKind::Lstm, &[256, 128]),
    (ModelKind::Lstm, &[512, 256]),
    (ModelKind::Lstm, &[128, 64, 32]),
    (ModelKind::Lstm, &[512, 256, 128, 32]),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub hidden_sizes: Vec<usize>,
    pub lookback: usize,
    pub input_width: usize,
    pub output_width: usize,
    pub dnn_input: DnnInput,
    /// Reference architecture id (1..=9), or `None` for a custom spec.
    pub arch: Option<u8>,
}

impl ModelSpec {
    /// One of the nine reference architectures at the given lookback.
    pub fn table(arch: u8, lookback: usize) -> Result<Self> {
        let (kind, hidden) = ARCHITECTURES
            .get((arch as usize).wrapping_sub(1))
            .ok_or_else(|| NeuralError::Spec(format!("architecture id {arch} not in 1..=9")))?;
        let spec = Self {
            kind: *kind,
            hidden_sizes: hidden.to_vec(),
            lookback,
            input_width: INPUT_WIDTH,
            output_width: OUTPUT_WIDTH,
            dnn_input: DnnInput::LastCycle,
            arch: Some(arch),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn custom(
        kind: ModelKind,
        hidden_sizes: Vec<usize>,
        lookback: usize,
        input_width: usize,
        output_width: usize,
    ) -> Result<Self> {
        let spec = Self {
            kind,
            hidden_sizes,
            lookback,
            input_width,
            output_width,
            dnn_input: DnnInput::LastCycle,
            arch: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_dnn_input(mut self, dnn_input: DnnInput) -> Self {
        self.dnn_input = dnn_input;
        self
    }

    pub fn is_custom(&self) -> bool {
        self.arch.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return Err(NeuralError::Spec("hidden sizes must be non-empty and positive".into()));
        }
        if self.lookback == 0 || self.input_width == 0 || self.output_width == 0 {
            return Err(NeuralError::Spec("lookback and widths must be positive".into()));
        }
        if let Some(arch) = self.arch {
            let (kind, hidden) = ARCHITECTURES
                .get((arch as usize).wrapping_sub(1))
                .ok_or_else(|| NeuralError::Spec(format!("architecture id {arch} not in 1..=9")))?;
            if *kind != self.kind
                || *hidden != self.hidden_sizes.as_slice()
                || self.input_width != INPUT_WIDTH
                || self.output_width != OUTPUT_WIDTH
            {
                return Err(NeuralError::Spec(format!(
                    "spec does not match reference architecture {arch}"
                )));
            }
        }
        Ok(())
    }

    /// Number of values in one input window.
    pub fn window_len(&self) -> usize {
        self.lookback * self.input_width
    }

    fn first_layer_inputs(&self) -> usize {
        match (self.kind, self.dnn_input) {
            (ModelKind::Lstm, _) => self.hidden_sizes[0],
            (ModelKind::Dnn, DnnInput::LastCycle) => self.input_width,
            (ModelKind::Dnn, DnnInput::Window) => self.window_len(),
        }
    }

    fn dense_hidden(&self) -> &[usize] {
        match self.kind {
            ModelKind::Lstm => &self.hidden_sizes[1..],
            ModelKind::Dnn => &self.hidden_sizes,
        }
    }
}

/// Gradients aligned one-to-one with [`Network::params`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub tensors: Vec<Tensor>,
}

impl Gradients {
    pub fn max_abs(&self) -> f64 {
        self.tensors
            .iter()
            .flat_map(|t| t.as_slice())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    spec: ModelSpec,
    lstm: Option<LstmCell>,
    layers: Vec<DenseLayer>,
}

struct Pass {
    tape: Option<LstmTape>,
    outputs: Vec<Vec<f64>>,
}

impl Network {
    /// All parameters zero.
    pub fn zeros(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let lstm = (spec.kind == ModelKind::Lstm)
            .then(|| LstmCell::zeros(spec.input_width, spec.hidden_sizes[0]));
        let mut layers = Vec::new();
        let mut width = spec.first_layer_inputs();
        for &h in spec.dense_hidden() {
            layers.push(DenseLayer::zeros(width, h, Activation::Relu));
            width = h;
        }
        layers.push(DenseLayer::zeros(width, spec.output_width, Activation::Identity));
        Ok(Self { spec, lstm, layers })
    }

    /// Fan-in uniform initialisation, fully determined by `seed`.
    pub fn initialized(spec: ModelSpec, seed: u64) -> Result<Self> {
        let mut net = Self::zeros(spec)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(cell) = net.lstm.as_mut() {
            cell.init(&mut rng);
        }
        for layer in &mut net.layers {
            layer.init(&mut rng);
        }
        Ok(net)
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn lstm(&self) -> Option<&LstmCell> {
        self.lstm.as_ref()
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn params(&self) -> Vec<&Tensor> {
        let mut out = Vec::new();
        if let Some(c) = &self.lstm {
            out.extend([&c.input_weights, &c.hidden_weights, &c.bias]);
        }
        for l in &self.layers {
            out.extend([&l.weights, &l.bias]);
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = Vec::new();
        if let Some(c) = &mut self.lstm {
            out.extend([&mut c.input_weights, &mut c.hidden_weights, &mut c.bias]);
        }
        for l in &mut self.layers {
            out.extend([&mut l.weights, &mut l.bias]);
        }
        out
    }

    /// Names matching [`Network::params`], used by checkpoints and reports.
    pub fn param_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.lstm.is_some() {
            out.extend(["lstm.input_weights", "lstm.hidden_weights", "lstm.bias"].map(String::from));
        }
        for i in 0..self.layers.len() {
            out.push(format!("dense{i}.weights"));
            out.push(format!("dense{i}.bias"));
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|t| t.len()).sum()
    }

    fn rows_per_sample(&self, sample_len: usize) -> Result<usize> {
        let w = self.spec.input_width;
        let ok = match (self.spec.kind, self.spec.dnn_input) {
            (ModelKind::Dnn, DnnInput::LastCycle) => sample_len >= w && sample_len.is_multiple_of(w),
            _ => sample_len == self.spec.window_len(),
        };
        if !ok {
            return Err(shape_err("forward", &[self.spec.window_len()], &[sample_len]));
        }
        Ok(sample_len / w)
    }

    fn split_batch(&self, inputs: &[f64], batch: usize) -> Result<usize> {
        if batch == 0 || !inputs.len().is_multiple_of(batch) {
            return Err(shape_err("forward batch", &[batch, self.spec.window_len()], &[inputs.len()]));
        }
        self.rows_per_sample(inputs.len() / batch)
    }

    fn run(&self, inputs: &[f64], batch: usize) -> Result<Pass> {
        let rows = self.split_batch(inputs, batch)?;
        let w = self.spec.input_width;
        let tape = self
            .lstm
            .as_ref()
            .map(|cell| cell.forward_sequence(inputs, batch, rows));
        let mut outputs: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let input = if i > 0 {
                View::new(&outputs[i - 1], batch, layer.inputs())
            } else {
                self.first_input(inputs, batch, rows, w, tape.as_ref())
            };
            let mut out = Vec::new();
            layer.forward_view(input, &mut out);
            outputs.push(out);
        }
        Ok(Pass { tape, outputs })
    }

    fn first_input<'a>(
        &self,
        inputs: &'a [f64],
        batch: usize,
        rows: usize,
        w: usize,
        tape: Option<&'a LstmTape>,
    ) -> View<'a> {
        match (tape, self.spec.dnn_input) {
            (Some(t), _) => View::new(t.last_hidden(), batch, self.spec.hidden_sizes[0]),
            (None, DnnInput::LastCycle) => View::strided(&inputs[(rows - 1) * w..], batch, w, rows * w),
            (None, DnnInput::Window) => View::new(inputs, batch, rows * w),
        }
    }

    /// Prediction for one window (`lookback × input_width` values; a DNN that
    /// reads the last cycle also accepts a bare row).
    pub fn forward(&self, window: &[f64]) -> Result<Vec<f64>> {
        self.forward_batch(window, 1)
    }

    /// Predictions for `batch` windows laid out back to back; returns
    /// `batch × output_width` values.
    pub fn forward_batch(&self, inputs: &[f64], batch: usize) -> Result<Vec<f64>> {
        let mut pass = self.run(inputs, batch)?;
        Ok(pass.outputs.pop().unwrap_or_default())
    }

    /// Mean-over-batch MSE and its exact gradient w.r.t. every parameter.
    pub fn backward(&self, inputs: &[f64], targets: &[f64], batch: usize) -> Result<(f64, Gradients)> {
        let out_w = self.spec.output_width;
        if targets.len() != batch * out_w {
            return Err(shape_err("backward targets", &[batch, out_w], &[targets.len()]));
        }
        let pass = self.run(inputs, batch)?;
        let rows = inputs.len() / batch / self.spec.input_width;
        let pred = pass.outputs.last().expect("network has an output layer");

        let scale = 1.0 / (batch * out_w) as f64;
        let loss = pred
            .iter()
            .zip(targets)
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>()
            * scale;
        let mut grad: Vec<f64> = pred
            .iter()
            .zip(targets)
            .map(|(p, t)| 2.0 * (p - t) * scale)
            .collect();

        let mut grads = Network::zeros(self.spec.clone())?;
        let mut next = Vec::new();
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let input = if i > 0 {
                View::new(&pass.outputs[i - 1], batch, layer.inputs())
            } else {
                self.first_input(inputs, batch, rows, self.spec.input_width, pass.tape.as_ref())
            };
            let need_input_grad = i > 0 || self.lstm.is_some();
            layer.backward_view(
                input,
                &pass.outputs[i],
                &mut grad,
                &mut grads.layers[i],
                need_input_grad.then_some(&mut next),
            );
            std::mem::swap(&mut grad, &mut next);
        }
        if let (Some(cell), Some(tape)) = (&self.lstm, &pass.tape) {
            let g = grads.lstm.as_mut().expect("same spec");
            cell.backward_sequence(tape, inputs, &grad, g);
        }
        let tensors = grads.params().into_iter().cloned().collect();
        Ok((loss, Gradients { tensors }))
    }

    /// Mean-over-batch MSE without gradients.
    pub fn loss(&self, inputs: &[f64], targets: &[f64], batch: usize) -> Result<f64> {
        let pred = self.forward_batch(inputs, batch)?;
        mse_loss(&pred, targets)
    }
}

/// Mean of squared differences.
pub fn mse_loss(prediction: &[f64], target: &[f64]) -> Result<f64> {
    if prediction.len() != target.len() {
        return Err(shape_err("mse_loss", &[prediction.len()], &[target.len()]));
    }
    if prediction.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = prediction
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / prediction.len() as f64)
}
