//! Central finite-difference check of [`Network::backward`].

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{NeuralError, Result};
use crate::model::Network;

/// Magnitude below which errors are measured absolutely rather than relatively.
pub const RELATIVE_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_relative_error: f64,
    pub checked: usize,
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_FLOOR)
}

/// Worst relative error over every parameter.
pub fn grad_check(net: &Network, window: &[f64], target: &[f64], eps: f64) -> Result<f64> {
    Ok(check(net, window, target, eps, None, 0)?.max_relative_error)
}

/// Like [`grad_check`], but probes at most `per_tensor` randomly chosen
/// entries of each parameter tensor (all of them when the tensor is smaller).
pub fn grad_check_sampled(
    net: &Network,
    window: &[f64],
    target: &[f64],
    eps: f64,
    per_tensor: usize,
    seed: u64,
) -> Result<GradCheck> {
    check(net, window, target, eps, Some(per_tensor), seed)
}

fn check(
    net: &Network,
    window: &[f64],
    target: &[f64],
    eps: f64,
    per_tensor: Option<usize>,
    seed: u64,
) -> Result<GradCheck> {
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(NeuralError::Epsilon(eps));
    }
    let (_, grads) = net.backward(window, target, 1)?;
    let mut probe = net.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (ti, g) in grads.tensors.iter().enumerate() {
        let n = g.len();
        let indices: Vec<usize> = match per_tensor {
            Some(k) if k < n => sample(&mut rng, n, k).into_vec(),
            _ => (0..n).collect(),
        };
        for k in indices {
            let original = probe.params()[ti].as_slice()[k];
            probe.params_mut()[ti].as_mut_slice()[k] = original + eps;
            let plus = probe.loss(window, target, 1)?;
            probe.params_mut()[ti].as_mut_slice()[k] = original - eps;
            let minus = probe.loss(window, target, 1)?;
            probe.params_mut()[ti].as_mut_slice()[k] = original;
            let numeric = (plus - minus) / (2.0 * eps);
            worst = worst.max(relative_error(g.as_slice()[k], numeric));
            checked += 1;
        }
    }
    Ok(GradCheck {
        max_relative_error: worst,
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelKind, ModelSpec};

    #[test]
    fn eps_outside_range_is_rejected() {
        let net = Network::zeros(ModelSpec::custom(ModelKind::Dnn, vec![2], 1, 2, 1).unwrap()).unwrap();
        for eps in [1e-8, 1e-2, 0.0, -1e-5] {
            assert!(matches!(
                grad_check(&net, &[0.1, 0.2], &[0.0], eps),
                Err(NeuralError::Epsilon(_))
            ));
        }
    }

    #[test]
    fn analytic_zero_gradient_checks_to_zero() {
        let net = Network::zeros(ModelSpec::custom(ModelKind::Dnn, vec![3], 1, 2, 2).unwrap()).unwrap();
        // zero params, zero target: loss is flat to first order everywhere we probe
        let err = grad_check(&net, &[0.4, -0.6], &[0.0, 0.0], 1e-5).unwrap();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn small_custom_models_check_exhaustively() {
        for kind in [ModelKind::Dnn, ModelKind::Lstm] {
            let spec = ModelSpec::custom(kind, vec![5, 4], 3, 6, 3).unwrap();
            let net = Network::initialized(spec, 11).unwrap();
            let window: Vec<f64> = (0..18).map(|i| (i as f64 * 0.9).sin()).collect();
            let err = grad_check(&net, &window, &[0.2, -0.5, 0.9], 1e-5).unwrap();
            assert!(err < 1e-6, "{kind:?}: {err}");
        }
    }
}
