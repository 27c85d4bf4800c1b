mod common;

use common::{c, close, finite_diff};
use num_complex::Complex64 as C;
use orbitvqc::ansatz::{circuit_forward, circuit_gradient, AnsatzConfig, CircuitParams, Entangler};
use orbitvqc::hybrid::HybridModel;
use orbitvqc::neuralnet::Mlp;
use orbitvqc::statevec::StateVector;
use proptest::prelude::*;

fn features(n: usize) -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-2)
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parameter_shift_matches_finite_differences(
        x in features(3),
        seed in any::<u64>(),
        upstream in prop::collection::vec(-1.0f64..1.0, 3),
        layers in 1usize..3,
    ) {
        let cfg = AnsatzConfig::new(3, layers, Entangler::RingCnot).unwrap();
        let p = CircuitParams::random(&cfg, &mut orbitvqc::rng::seeded(seed));
        let s = StateVector::normalized(3, x).unwrap();
        let shift = circuit_gradient(&cfg, &p, &s, &upstream).unwrap();
        let fd = finite_diff(p.as_slice(), 1e-5, |v| {
            let q = CircuitParams::from_vec(&cfg, v.to_vec()).unwrap();
            circuit_forward(&cfg, &q, &s).unwrap().iter().zip(&upstream).map(|(z, u)| z * u).sum()
        });
        for (i, (a, b)) in shift.as_slice().iter().zip(&fd).enumerate() {
            prop_assert!(close(*a, *b, 1e-5, 1e-8), "param {i}: shift {a} fd {b}");
        }
    }

    #[test]
    fn backprop_matches_finite_differences(
        seed in any::<u64>(),
        input in prop::collection::vec(-1.0f64..1.0, 4),
        hidden in prop::collection::vec(1usize..6, 0..3),
        upstream in -2.0f64..2.0,
    ) {
        let mut sizes = vec![4];
        sizes.extend(&hidden);
        sizes.push(1);
        let mlp = Mlp::init(&sizes, seed).unwrap();
        let (_, cache) = mlp.forward(&input).unwrap();
        let (grads, grad_in) = mlp.backward(&cache, upstream).unwrap();

        let fd = finite_diff(&mlp.params_flat(), 1e-6, |v| {
            let mut m = mlp.clone();
            m.set_params_flat(v).unwrap();
            upstream * m.predict(&input).unwrap()
        });
        for (i, (a, b)) in grads.flatten().iter().zip(&fd).enumerate() {
            prop_assert!(close(*a, *b, 1e-5, 1e-8), "param {i}: backprop {a} fd {b}");
        }
        let fd_in = finite_diff(&input, 1e-6, |v| upstream * mlp.predict(v).unwrap());
        for (a, b) in grad_in.iter().zip(&fd_in) {
            prop_assert!(close(*a, *b, 1e-5, 1e-8));
        }
    }

    #[test]
    fn end_to_end_gradient_matches_finite_differences(x in features(2), seed in any::<u64>(), upstream in -2.0f64..2.0) {
        let cfg = AnsatzConfig::new(2, 2, Entangler::RingCnot).unwrap();
        let model = HybridModel::init(cfg, Some(&[4, 3]), std::f64::consts::PI, seed).unwrap();
        let (_, grad) = model.predict_with_gradient(&x, upstream).unwrap();
        let fd = finite_diff(&model.params_flat(), 1e-5, |v| {
            let mut m = model.clone();
            m.set_params_flat(v).unwrap();
            upstream * m.predict(&x).unwrap()
        });
        prop_assert_eq!(grad.len(), fd.len());
        for (i, (a, b)) in grad.iter().zip(&fd).enumerate() {
            prop_assert!(close(*a, *b, 1e-4, 1e-8), "param {i}: {a} vs {b}");
        }
    }

    #[test]
    fn headless_model_gradient_is_circuit_gradient(x in features(2), seed in any::<u64>()) {
        let cfg = AnsatzConfig::new(2, 1, Entangler::RingCnot).unwrap();
        let model = HybridModel::init(cfg, None, std::f64::consts::PI, seed).unwrap();
        let (y, grad) = model.predict_with_gradient(&x, 1.0).unwrap();
        let s = StateVector::normalized(2, x).unwrap();
        prop_assert!((y - circuit_forward(&cfg, &model.qparams, &s).unwrap()[0]).abs() < 1e-12);
        let want = circuit_gradient(&cfg, &model.qparams, &s, &[1.0, 0.0]).unwrap();
        prop_assert_eq!(grad, want.as_slice().to_vec());
    }
}

#[test]
fn single_qubit_closed_form() {
    // <Z> = cos(a) cos(b) for RX(a) then RY(b) on |0>.
    let cfg = AnsatzConfig::new(1, 1, Entangler::RingCnot).unwrap();
    for &(a, b) in &[(0.3, -1.1), (2.0, 0.7), (-0.4, 2.9)] {
        let p = CircuitParams::from_vec(&cfg, vec![a, b, 0.8]).unwrap();
        let g = circuit_gradient(&cfg, &p, &StateVector::zero(1).unwrap(), &[1.0]).unwrap();
        assert!((g.as_slice()[0] + a.sin() * b.cos()).abs() < 1e-12);
        assert!((g.as_slice()[1] + a.cos() * b.sin()).abs() < 1e-12);
        assert!(g.as_slice()[2].abs() < 1e-12);
    }
}
