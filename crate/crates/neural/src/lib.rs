//! A small neural-network engine: dense and LSTM layers, MSE loss, Adam,
//! hand-written gradients and a finite-difference checker for them.
//!
//! Everything runs in `f64` on the CPU. Batches are laid out as
//! `batch × lookback × features` row-major slices.

pub mod adam;
pub mod checkpoint;
pub mod dense;
pub mod error;
pub mod gradcheck;
pub mod lstm;
pub mod model;
pub mod tensor;

pub use adam::{adam_update, AdamConfig, AdamState};
pub use checkpoint::Checkpoint;
pub use dense::{Activation, DenseLayer};
pub use error::{NeuralError, Result};
pub use gradcheck::{grad_check, grad_check_sampled, relative_error, GradCheck};
pub use lstm::LstmCell;
pub use model::{mse_loss, DnnInput, Gradients, ModelKind, ModelSpec, Network, INPUT_WIDTH, OUTPUT_WIDTH};
pub use tensor::Tensor;
