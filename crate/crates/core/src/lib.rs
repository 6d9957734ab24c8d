//! Opponent-position denoising toolkit.
//!
//! [`simulator`] synthesizes matches and the observer's noisy belief,
//! [`dataset`] turns them into scaled windows, [`predictors`] trains and
//! runs the models and baselines, [`evaluation`] bins their errors, and
//! [`pipeline`] strings the stages together with memoization.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod pipeline;
pub mod predictors;
pub mod simulator;

pub use error::{Error, Result};
