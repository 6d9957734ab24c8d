//! LSTM cell with gate order `i, f, g, o` and full backpropagation through time.

use rand::Rng;

use crate::error::{shape_err, Result};
use crate::tensor::{add_column_sums, matmul_into, Tensor, View};

#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell {
    /// `inputs × 4H`, gate blocks laid out as `[i | f | g | o]`.
    pub input_weights: Tensor,
    /// `H × 4H`, same block layout.
    pub hidden_weights: Tensor,
    /// `4H`
    pub bias: Tensor,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Per-step activations kept for the backward pass.
pub(crate) struct LstmTape {
    batch: usize,
    /// Activated gates `[i | f | g | o]`, one `batch × 4H` buffer per step.
    gates: Vec<Vec<f64>>,
    cells: Vec<Vec<f64>>,
    cell_tanh: Vec<Vec<f64>>,
    hidden: Vec<Vec<f64>>,
}

impl LstmTape {
    pub fn last_hidden(&self) -> &[f64] {
        self.hidden.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl LstmCell {
    pub fn zeros(inputs: usize, hidden: usize) -> Self {
        Self {
            input_weights: Tensor::zeros(&[inputs, 4 * hidden]),
            hidden_weights: Tensor::zeros(&[hidden, 4 * hidden]),
            bias: Tensor::zeros(&[4 * hidden]),
        }
    }

    pub fn inputs(&self) -> usize {
        self.input_weights.shape()[0]
    }

    pub fn hidden(&self) -> usize {
        self.hidden_weights.shape()[0]
    }

    /// Uniform fan-in initialisation over `inputs + H`, forget-gate bias +1.
    pub(crate) fn init<R: Rng>(&mut self, rng: &mut R) {
        let h = self.hidden();
        let limit = (3.0 / (self.inputs() + h) as f64).sqrt();
        for w in self
            .input_weights
            .as_mut_slice()
            .iter_mut()
            .chain(self.hidden_weights.as_mut_slice())
        {
            *w = rng.gen_range(-limit..limit);
        }
        let bias = self.bias.as_mut_slice();
        bias.fill(0.0);
        bias[h..2 * h].fill(1.0);
    }

    /// One time step for a single sample: returns `(h_t, c_t)`.
    pub fn step(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let h = self.hidden();
        if x.len() != self.inputs() {
            return Err(shape_err("lstm_step input", &[self.inputs()], &[x.len()]));
        }
        if h_prev.len() != h || c_prev.len() != h {
            return Err(shape_err("lstm_step state", &[h, h], &[h_prev.len(), c_prev.len()]));
        }
        let mut gates = self.bias.as_slice().to_vec();
        matmul_into(View::new(x, 1, x.len()), self.input_weights.view(), &mut gates, true);
        matmul_into(View::new(h_prev, 1, h), self.hidden_weights.view(), &mut gates, true);
        let mut c = vec![0.0; h];
        let mut tc = vec![0.0; h];
        let mut out = vec![0.0; h];
        activate(&mut gates, c_prev, &mut c, &mut tc, &mut out, h);
        Ok((out, c))
    }

    /// Runs `steps` time steps over a batch. `inputs` holds `batch` samples,
    /// each `steps × inputs` contiguous values.
    pub(crate) fn forward_sequence(&self, inputs: &[f64], batch: usize, steps: usize) -> LstmTape {
        let (n_in, h) = (self.inputs(), self.hidden());
        let mut tape = LstmTape {
            batch,
            gates: Vec::with_capacity(steps),
            cells: Vec::with_capacity(steps),
            cell_tanh: Vec::with_capacity(steps),
            hidden: Vec::with_capacity(steps),
        };
        let zeros = vec![0.0; batch * h];
        for t in 0..steps {
            let mut gates = Vec::with_capacity(batch * 4 * h);
            for _ in 0..batch {
                gates.extend_from_slice(self.bias.as_slice());
            }
            let x_t = View::strided(&inputs[t * n_in..], batch, n_in, steps * n_in);
            matmul_into(x_t, self.input_weights.view(), &mut gates, true);
            if t > 0 {
                let h_prev = View::new(&tape.hidden[t - 1], batch, h);
                matmul_into(h_prev, self.hidden_weights.view(), &mut gates, true);
            }
            let c_prev = if t > 0 { &tape.cells[t - 1] } else { &zeros };
            let mut c = vec![0.0; batch * h];
            let mut tc = vec![0.0; batch * h];
            let mut out = vec![0.0; batch * h];
            for b in 0..batch {
                activate(
                    &mut gates[b * 4 * h..(b + 1) * 4 * h],
                    &c_prev[b * h..(b + 1) * h],
                    &mut c[b * h..(b + 1) * h],
                    &mut tc[b * h..(b + 1) * h],
                    &mut out[b * h..(b + 1) * h],
                    h,
                );
            }
            tape.gates.push(gates);
            tape.cells.push(c);
            tape.cell_tanh.push(tc);
            tape.hidden.push(out);
        }
        tape
    }

    /// Backpropagation through every step of `tape`, given the gradient of
    /// the loss w.r.t. the final hidden state.
    pub(crate) fn backward_sequence(
        &self,
        tape: &LstmTape,
        inputs: &[f64],
        dh_last: &[f64],
        grads: &mut LstmCell,
    ) {
        let (n_in, h, batch) = (self.inputs(), self.hidden(), tape.batch);
        let steps = tape.gates.len();
        let mut dh = dh_last.to_vec();
        let mut dc = vec![0.0; batch * h];
        let mut dpre = vec![0.0; batch * 4 * h];
        let zeros = vec![0.0; batch * h];
        for t in (0..steps).rev() {
            let gates = &tape.gates[t];
            let tc = &tape.cell_tanh[t];
            let c_prev = if t > 0 { &tape.cells[t - 1] } else { &zeros };
            for b in 0..batch {
                let g = &gates[b * 4 * h..(b + 1) * 4 * h];
                let d = &mut dpre[b * 4 * h..(b + 1) * 4 * h];
                for j in 0..h {
                    let k = b * h + j;
                    let (i_g, f_g, g_g, o_g) = (g[j], g[h + j], g[2 * h + j], g[3 * h + j]);
                    let d_o = dh[k] * tc[k];
                    dc[k] += dh[k] * o_g * (1.0 - tc[k] * tc[k]);
                    let d_i = dc[k] * g_g;
                    let d_g = dc[k] * i_g;
                    let d_f = dc[k] * c_prev[k];
                    d[j] = d_i * i_g * (1.0 - i_g);
                    d[h + j] = d_f * f_g * (1.0 - f_g);
                    d[2 * h + j] = d_g * (1.0 - g_g * g_g);
                    d[3 * h + j] = d_o * o_g * (1.0 - o_g);
                    dc[k] *= f_g;
                }
            }
            let dz = View::new(&dpre, batch, 4 * h);
            let x_t = View::strided(&inputs[t * n_in..], batch, n_in, steps * n_in);
            matmul_into(x_t.t(), dz, grads.input_weights.as_mut_slice(), true);
            add_column_sums(&dpre, 4 * h, grads.bias.as_mut_slice());
            if t > 0 {
                let h_prev = View::new(&tape.hidden[t - 1], batch, h);
                matmul_into(h_prev.t(), dz, grads.hidden_weights.as_mut_slice(), true);
                matmul_into(dz, self.hidden_weights.view().t(), &mut dh, false);
            }
        }
    }
}

/// Turns pre-activations into gates in place and computes `c_t`, `tanh(c_t)`, `h_t`.
fn activate(gates: &mut [f64], c_prev: &[f64], c: &mut [f64], tc: &mut [f64], out: &mut [f64], h: usize) {
    for j in 0..h {
        let i_g = sigmoid(gates[j]);
        let f_g = sigmoid(gates[h + j]);
        let g_g = gates[2 * h + j].tanh();
        let o_g = sigmoid(gates[3 * h + j]);
        gates[j] = i_g;
        gates[h + j] = f_g;
        gates[2 * h + j] = g_g;
        gates[3 * h + j] = o_g;
        c[j] = f_g * c_prev[j] + i_g * g_g;
        tc[j] = c[j].tanh();
        out[j] = o_g * tc[j];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_cell_from_zero_state_stays_zero() {
        let cell = LstmCell::zeros(3, 4);
        let (h, c) = cell.step(&[0.3, -1.0, 2.0], &[0.0; 4], &[0.0; 4]).unwrap();
        assert!(h.iter().chain(&c).all(|&v| v == 0.0));
    }

    #[test]
    fn zero_cell_halves_previous_cell_state() {
        // all gates sit at sigmoid(0) = 0.5 and g = tanh(0) = 0
        let cell = LstmCell::zeros(2, 3);
        let c_prev = [1.0, -4.0, 0.25];
        let (h, c) = cell.step(&[1.0, 1.0], &[0.2, 0.1, 0.0], &c_prev).unwrap();
        for j in 0..3 {
            assert!((c[j] - 0.5 * c_prev[j]).abs() < 1e-15);
            assert!((h[j] - 0.5 * (0.5 * c_prev[j]).tanh()).abs() < 1e-15);
        }
    }

    #[test]
    fn batched_sequence_matches_repeated_steps() {
        let mut cell = LstmCell::zeros(3, 5);
        cell.init(&mut ChaCha8Rng::seed_from_u64(3));
        let steps = 4;
        let inputs: Vec<f64> = (0..2 * steps * 3).map(|v| ((v * 7) % 11) as f64 / 5.0 - 1.0).collect();
        let tape = cell.forward_sequence(&inputs, 2, steps);
        for b in 0..2 {
            let (mut h, mut c) = (vec![0.0; 5], vec![0.0; 5]);
            for t in 0..steps {
                let x = &inputs[b * steps * 3 + t * 3..b * steps * 3 + (t + 1) * 3];
                (h, c) = cell.step(x, &h, &c).unwrap();
            }
            for j in 0..5 {
                assert!((h[j] - tape.last_hidden()[b * 5 + j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn step_rejects_bad_widths() {
        let cell = LstmCell::zeros(2, 3);
        assert!(cell.step(&[0.0; 3], &[0.0; 3], &[0.0; 3]).is_err());
        assert!(cell.step(&[0.0; 2], &[0.0; 2], &[0.0; 3]).is_err());
    }
}
