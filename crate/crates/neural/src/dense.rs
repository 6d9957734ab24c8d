//! Fully connected layer: `activation(x · W + b)`.

use rand::Rng;

use crate::error::{shape_err, Result};
use crate::tensor::{add_column_sums, matmul_into, Tensor, View};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, v: &mut [f64]) {
        if self == Activation::Relu {
            v.iter_mut().for_each(|x| *x = x.max(0.0));
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    /// `inputs × outputs`
    pub weights: Tensor,
    pub bias: Tensor,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        Self {
            weights: Tensor::zeros(&[inputs, outputs]),
            bias: Tensor::zeros(&[outputs]),
            activation,
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn outputs(&self) -> usize {
        self.weights.shape()[1]
    }

    /// Uniform fan-in initialisation; biases start at zero.
    pub(crate) fn init<R: Rng>(&mut self, rng: &mut R) {
        let gain = match self.activation {
            Activation::Relu => 6.0,
            Activation::Identity => 3.0,
        };
        let limit = (gain / self.inputs() as f64).sqrt();
        for w in self.weights.as_mut_slice() {
            *w = rng.gen_range(-limit..limit);
        }
        self.bias.fill(0.0);
    }

    /// Applies the layer to a single row (`[in]`) or a batch (`[batch, in]`).
    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        if input.cols() != self.inputs() || input.shape().len() > 2 {
            return Err(shape_err("dense_forward", &[self.inputs()], input.shape()));
        }
        let mut out = Vec::new();
        self.forward_view(input.view(), &mut out);
        let shape = if input.shape().len() == 1 {
            vec![self.outputs()]
        } else {
            vec![input.rows(), self.outputs()]
        };
        Tensor::from_vec(&shape, out)
    }

    pub(crate) fn forward_view(&self, input: View<'_>, out: &mut Vec<f64>) {
        let n = self.outputs();
        out.clear();
        out.reserve(input.rows * n);
        for _ in 0..input.rows {
            out.extend_from_slice(self.bias.as_slice());
        }
        matmul_into(input, self.weights.view(), out, true);
        self.activation.apply(out);
    }

    /// Back-propagates `grad_out` (gradient w.r.t. this layer's output),
    /// accumulating parameter gradients into `grads`. `grad_out` is
    /// overwritten with the pre-activation gradient.
    pub(crate) fn backward_view(
        &self,
        input: View<'_>,
        output: &[f64],
        grad_out: &mut [f64],
        grads: &mut DenseLayer,
        grad_input: Option<&mut Vec<f64>>,
    ) {
        if self.activation == Activation::Relu {
            for (g, &y) in grad_out.iter_mut().zip(output) {
                if y <= 0.0 {
                    *g = 0.0;
                }
            }
        }
        let n = self.outputs();
        let dz = View::new(grad_out, input.rows, n);
        matmul_into(input.t(), dz, grads.weights.as_mut_slice(), true);
        add_column_sums(grad_out, n, grads.bias.as_mut_slice());
        if let Some(dx) = grad_input {
            dx.clear();
            dx.resize(input.rows * self.inputs(), 0.0);
            matmul_into(dz, self.weights.view().t(), dx, false);
        }
    }
}
