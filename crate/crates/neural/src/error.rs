use thiserror::Error;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("shape mismatch in {op}: expected {expected:?}, got {actual:?}")]
    Shape {
        op: &'static str,
        expected: Vec<usize>,
        actual: Vec<usize>,
    },

    #[error("invalid model spec: {0}")]
    Spec(String),

    #[error("finite-difference step {0} outside [1e-7, 1e-3]")]
    Epsilon(f64),

    #[error("malformed checkpoint at line {line}: {reason}")]
    Checkpoint { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NeuralError>;

pub(crate) fn shape_err(op: &'static str, expected: &[usize], actual: &[usize]) -> NeuralError {
    NeuralError::Shape {
        op,
        expected: expected.to_vec(),
        actual: actual.to_vec(),
    }
}
