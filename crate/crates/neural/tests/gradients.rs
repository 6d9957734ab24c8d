use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssdenoise_neural::{
    grad_check_sampled, AdamConfig, AdamState, ModelKind, ModelSpec, Network, INPUT_WIDTH, OUTPUT_WIDTH,
};

fn random_sample(rng: &mut ChaCha8Rng, lookback: usize) -> (Vec<f64>, Vec<f64>) {
    let window = (0..lookback * INPUT_WIDTH).map(|_| rng.gen_range(-2.0..1.0)).collect();
    let target = (0..OUTPUT_WIDTH).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (window, target)
}

#[test]
fn every_reference_architecture_passes_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for arch in 1..=9u8 {
        let start = std::time::Instant::now();
        let net = Network::initialized(ModelSpec::table(arch, 5).unwrap(), arch as u64).unwrap();
        let (window, target) = random_sample(&mut rng, 5);
        let report = grad_check_sampled(&net, &window, &target, 1e-5, 24, arch as u64).unwrap();
        println!(
            "arch {arch}: max rel err {:.3e} over {} params ({:.1?})",
            report.max_relative_error,
            report.checked,
            start.elapsed()
        );
        assert!(report.max_relative_error < 1e-4, "arch {arch}: {report:?}");
    }
}

#[test]
fn flattened_window_dnn_passes_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = ModelSpec::table(1, 5).unwrap().with_dnn_input(ssdenoise_neural::DnnInput::Window);
    let net = Network::initialized(spec, 3).unwrap();
    let (window, target) = random_sample(&mut rng, 5);
    let report = grad_check_sampled(&net, &window, &target, 1e-5, 64, 3).unwrap();
    assert!(report.max_relative_error < 1e-4, "{report:?}");
}

#[test]
fn outputs_and_gradients_are_finite_at_init() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for arch in 1..=9u8 {
        let lookback = [5, 10, 15][arch as usize % 3];
        let net = Network::initialized(ModelSpec::table(arch, lookback).unwrap(), 100 + arch as u64).unwrap();
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for _ in 0..4 {
            let (w, t) = random_sample(&mut rng, lookback);
            inputs.extend(w);
            targets.extend(t);
        }
        // extremes of the scaled domain
        inputs[0] = -2.0;
        inputs[1] = 1.0;
        let (loss, grads) = net.backward(&inputs, &targets, 4).unwrap();
        assert!(loss.is_finite());
        assert!(grads.tensors.iter().all(|t| t.is_finite()), "arch {arch}");
    }
}

#[test]
fn zero_lstm_layer_emits_zero_hidden_state() {
    let net = Network::zeros(ModelSpec::custom(ModelKind::Lstm, vec![8], 6, 5, 8).unwrap()).unwrap();
    let cell = net.lstm().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut h, mut c) = (vec![0.0; 8], vec![0.0; 8]);
    for _ in 0..6 {
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..1.0)).collect();
        (h, c) = cell.step(&x, &h, &c).unwrap();
        assert!(h.iter().chain(&c).all(|&v| v == 0.0));
    }
}

#[test]
fn initialisation_and_training_are_deterministic() {
    let run = || {
        let mut net = Network::initialized(ModelSpec::table(8, 5).unwrap(), 42).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut state = AdamState::new(&net.params(), AdamConfig::default());
        for _ in 0..5 {
            let mut inputs = Vec::new();
            let mut targets = Vec::new();
            for _ in 0..8 {
                let (w, t) = random_sample(&mut rng, 5);
                inputs.extend(w);
                targets.extend(t);
            }
            let (_, grads) = net.backward(&inputs, &targets, 8).unwrap();
            state.update(net.params_mut(), &grads.tensors).unwrap();
        }
        net
    };
    assert_eq!(run(), run());
}
