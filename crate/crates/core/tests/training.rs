use num_complex::Complex64 as C;
use orbitvqc::ansatz::{AnsatzConfig, Entangler};
use orbitvqc::datasets::{build_synthetic2d, split_even, Dataset, Sample};
use orbitvqc::hybrid::{adam_step, evaluate_accuracy, fit, AdamState, HybridModel, TrainConfig};
use orbitvqc::statevec::StateVector;
use orbitvqc::Error;

#[test]
fn adam_on_quadratic() {
    // f(w) = w^2, so the gradient is 2w.
    let mut w = [1.0];
    let mut state = AdamState::new(1, 0.01);
    let mut trace = vec![w[0]];
    for _ in 0..100 {
        let g = [2.0 * w[0]];
        adam_step(&mut w, &g, &mut state).unwrap();
        trace.push(w[0]);
    }
    assert_eq!(state.t, 100);
    assert!(trace.windows(2).skip(5).all(|p| p[1].abs() < p[0].abs()));
    // Reference: plain scalar Adam written out by hand.
    let (mut x, mut m, mut v) = (1.0f64, 0.0f64, 0.0f64);
    for t in 1..=100 {
        let g = 2.0 * x;
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        x -= 0.01 * (m / (1.0 - 0.9f64.powi(t))) / ((v / (1.0 - 0.999f64.powi(t))).sqrt() + 1e-8);
    }
    assert!((w[0] - x).abs() < 1e-12);
    assert!(w[0].abs() < 0.5, "{}", w[0]);
}

#[test]
fn adam_rejects_shape_mismatch_and_infinity() {
    let mut state = AdamState::new(2, 0.01);
    assert!(matches!(adam_step(&mut [0.0, 0.0], &[1.0], &mut state), Err(Error::Shape(_))));
    assert!(matches!(adam_step(&mut [0.0, 0.0], &[1.0, f64::INFINITY], &mut state), Err(Error::NonFinite(_))));
}

fn one_qubit(amp0: f64, amp1: f64, label: i8) -> Sample {
    Sample::new(StateVector::normalized(1, vec![C::new(amp0, 0.0), C::new(amp1, 0.0)]).unwrap(), label, None)
}

#[test]
fn single_sample_cost_goes_to_zero() {
    let ds = Dataset::new(1, "single", 0, vec![one_qubit(0.6, 0.8, 1)]).unwrap();
    let cfg = AnsatzConfig::new(1, 1, Entangler::RingCnot).unwrap();
    let mut model = HybridModel::init(cfg, Some(&[3]), 1.0, 5).unwrap();
    let tc = TrainConfig { epochs: 400, batch_size: 1, learning_rate: 0.05, seed: 1, early_stop_tol: None, patience: 10 };
    let report = fit(&mut model, &ds, &tc).unwrap();
    assert!(report.final_cost() < 1e-2, "{}", report.final_cost());
    assert!(report.history.iter().all(|r| r.cost.is_finite()));
}

#[test]
fn separable_one_qubit_toy_is_learned() {
    // |0>-like states are -1, |1>-like states are +1.
    let samples: Vec<Sample> = (0..20)
        .map(|i| {
            let t = 0.05 + 0.3 * (i % 10) as f64 / 10.0;
            if i < 10 {
                one_qubit(t.cos(), t.sin(), -1)
            } else {
                one_qubit(t.sin(), t.cos(), 1)
            }
        })
        .collect();
    let ds = Dataset::new(1, "toy", 0, samples).unwrap();
    let cfg = AnsatzConfig::new(1, 1, Entangler::RingCnot).unwrap();
    let mut model = HybridModel::init(cfg, Some(&[2]), 0.5, 3).unwrap();
    let tc = TrainConfig { epochs: 100, batch_size: 5, learning_rate: 0.05, seed: 2, ..TrainConfig::default() };
    fit(&mut model, &ds, &tc).unwrap();
    assert_eq!(evaluate_accuracy(&model, &ds).unwrap(), 1.0);
}

#[test]
fn fit_is_deterministic() {
    let ds = build_synthetic2d(64, 4).unwrap();
    let (train, _) = split_even(&ds, 4).unwrap();
    let cfg = AnsatzConfig::new(2, 2, Entangler::RingCnot).unwrap();
    let tc = TrainConfig { epochs: 5, batch_size: 8, learning_rate: 0.01, seed: 9, ..TrainConfig::default() };
    let run = || {
        let mut m = HybridModel::init(cfg, Some(&[4]), 1.0, 11).unwrap();
        let r = fit(&mut m, &train, &tc).unwrap();
        (m.params_flat(), r)
    };
    assert_eq!(run(), run());
}

#[test]
fn fit_validates_config() {
    let ds = build_synthetic2d(8, 1).unwrap();
    let cfg = AnsatzConfig::new(2, 1, Entangler::RingCnot).unwrap();
    let mut model = HybridModel::init(cfg, Some(&[2]), 1.0, 1).unwrap();
    for bad in [
        TrainConfig { learning_rate: 1.0, ..TrainConfig::default() },
        TrainConfig { learning_rate: 0.0, ..TrainConfig::default() },
        TrainConfig { batch_size: 9, ..TrainConfig::default() },
        TrainConfig { epochs: 0, ..TrainConfig::default() },
    ] {
        assert!(matches!(fit(&mut model, &ds, &bad), Err(Error::Config(_))));
    }
    let wrong = AnsatzConfig::new(3, 1, Entangler::RingCnot).unwrap();
    let mut m3 = HybridModel::init(wrong, Some(&[2]), 1.0, 1).unwrap();
    let tc = TrainConfig { batch_size: 4, ..TrainConfig::default() };
    assert!(matches!(fit(&mut m3, &ds, &tc), Err(Error::Shape(_))));
}
