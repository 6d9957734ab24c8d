//! Bias-corrected Adam.

use crate::error::{shape_err, Result};
use crate::tensor::Tensor;

const FLUSH_BELOW: f64 = 1e-200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment accumulators shaped like the parameters they track.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    first_moment: Vec<Tensor>,
    second_moment: Vec<Tensor>,
    step: u64,
}

impl AdamState {
    pub fn new(params: &[&Tensor], config: AdamConfig) -> Self {
        let zeros: Vec<Tensor> = params.iter().map(|p| Tensor::zeros(p.shape())).collect();
        Self {
            config,
            first_moment: zeros.clone(),
            second_moment: zeros,
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn update(&mut self, mut params: Vec<&mut Tensor>, grads: &[Tensor]) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(shape_err(
                "adam_update",
                &[self.first_moment.len()],
                &[params.len(), grads.len()],
            ));
        }
        for ((p, g), m) in params.iter().zip(grads).zip(&self.first_moment) {
            if p.shape() != g.shape() || p.shape() != m.shape() {
                return Err(shape_err("adam_update", m.shape(), g.shape()));
            }
        }
        self.step += 1;
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let t = self.step as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        for (i, p) in params.iter_mut().enumerate() {
            let m = self.first_moment[i].as_mut_slice();
            let v = self.second_moment[i].as_mut_slice();
            for (((w, &g), m), v) in p.as_mut_slice().iter_mut().zip(grads[i].as_slice()).zip(m).zip(v) {
                *m = beta1 * *m + (1.0 - beta1) * g;
                *v = beta2 * *v + (1.0 - beta2) * g * g;
                // parameters with a persistently zero gradient would otherwise
                // decay into subnormals, which are very slow on most CPUs
                if m.abs() < FLUSH_BELOW {
                    *m = 0.0;
                }
                if *v < FLUSH_BELOW {
                    *v = 0.0;
                }
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *w -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}

pub fn adam_update(params: Vec<&mut Tensor>, grads: &[Tensor], state: &mut AdamState) -> Result<()> {
    state.update(params, grads)
}
