use std::fs;

use num_complex::Complex64 as C;
use orbitvqc::datasets::*;
use orbitvqc::stategen::{four_qubit_classes, has_stabilizer_amplitudes, Graph, NamedState};
use orbitvqc::statevec::StateVector;
use orbitvqc::Error;

fn purity(s: &StateVector, q: usize) -> f64 {
    let r = s.reduced_qubit(q).unwrap();
    r.iter().flatten().map(|z| z.norm_sqr()).sum()
}

fn graph_of(sample: &Sample) -> Graph {
    let prov = sample.provenance.as_deref().unwrap();
    let mask = prov.split(' ').find_map(|f| f.strip_prefix("graph=")).unwrap();
    Graph::from_edge_mask(4, mask.parse().unwrap()).unwrap()
}

#[test]
fn stabilizer_samples_have_stabilizer_amplitudes() {
    for class in 1..=6 {
        let ds = build_stabilizer_dataset(class, 400, 17).unwrap();
        for (i, s) in ds.samples().iter().enumerate() {
            assert!(has_stabilizer_amplitudes(&ds.state(i), 1e-9), "class {class} sample {i}");
            assert_eq!(s.label == TARGET_LABEL, four_qubit_classes().class_of(&graph_of(s)).unwrap() == class);
        }
    }
}

#[test]
fn graph_samples_carry_their_class() {
    let table = four_qubit_classes();
    for class in 1..=6 {
        let ds = build_graph_class_dataset(class, 200, 2).unwrap();
        for s in ds.samples() {
            let c = table.class_of(&graph_of(s)).unwrap();
            assert_eq!(c == class, s.label == TARGET_LABEL);
        }
    }
}

#[test]
fn lu_samples_replay_bit_exactly() {
    for opposition in [Opposition::OtherOrbits, Opposition::FullHilbert] {
        let ds = build_lu_orbit_dataset(4, 200, opposition, 8).unwrap();
        for (i, s) in ds.samples().iter().enumerate() {
            match replay_provenance(s) {
                Some(state) => assert_eq!(state.unwrap(), ds.state(i)),
                None => assert_eq!(s.provenance.as_deref(), Some("random-state")),
            }
        }
    }
    let ds = build_stabilizer_dataset(5, 100, 8).unwrap();
    for (i, s) in ds.samples().iter().enumerate() {
        assert_eq!(replay_provenance(s).unwrap().unwrap(), ds.state(i));
    }
}

#[test]
fn lu_orbits_keep_local_purities() {
    // Class 1 is a product state, class 6 is GHZ-like on four qubits.
    for (class, want) in [(1, 1.0), (6, 0.5)] {
        let ds = build_lu_orbit_dataset(class, 100, Opposition::FullHilbert, 4).unwrap();
        for i in (0..ds.len()).filter(|&i| ds.samples()[i].label == TARGET_LABEL) {
            for q in 0..4 {
                assert!((purity(&ds.state(i), q) - want).abs() < 1e-10, "class {class} sample {i} qubit {q}");
            }
        }
    }
}

#[test]
fn three_qubit_orbits_keep_local_purities() {
    let cases = [
        (NamedState::Ghz, [0.5, 0.5, 0.5]),
        (NamedState::Separable, [1.0, 1.0, 1.0]),
        (NamedState::BisepAbC, [0.5, 0.5, 1.0]),
        (NamedState::BisepABc, [1.0, 0.5, 0.5]),
        (NamedState::BisepBAc, [0.5, 1.0, 0.5]),
        (NamedState::W, [5.0 / 9.0, 5.0 / 9.0, 5.0 / 9.0]),
    ];
    for (target, want) in cases {
        let ds = build_three_qubit_dataset(target, ThreeQubitOpposition::FullHilbert, 60, 6).unwrap();
        for i in (0..ds.len()).filter(|&i| ds.samples()[i].label == TARGET_LABEL) {
            for q in 0..3 {
                assert!((purity(&ds.state(i), q) - want[q]).abs() < 1e-10, "{target} qubit {q}");
            }
        }
    }
}

#[test]
fn three_qubit_named_opposition() {
    let ds = build_three_qubit_dataset(NamedState::Ghz, ThreeQubitOpposition::Named(NamedState::W), 40, 1).unwrap();
    for (i, s) in ds.samples().iter().enumerate() {
        let name = if s.label == TARGET_LABEL { "GHZ" } else { "W" };
        assert!(s.provenance.as_deref().unwrap().starts_with(&format!("named={name} ")));
        assert_eq!(replay_provenance(s).unwrap().unwrap(), ds.state(i));
    }
}

#[test]
fn synthetic_task_is_not_linearly_separable() {
    let ds = build_synthetic2d(2000, 3).unwrap();
    let points: Vec<(f64, f64, i8)> =
        ds.samples().iter().map(|s| { let (x, y) = synthetic_point(s).unwrap(); (x, y, s.label) }).collect();
    let mut best = 0.0f64;
    for a in 0..180 {
        let t = (a as f64).to_radians();
        let (nx, ny) = (t.cos(), t.sin());
        for b in -40..=40 {
            let off = b as f64 * 0.035;
            let correct = points.iter().filter(|&&(x, y, l)| ((nx * x + ny * y - off >= 0.0) as i8 * 2 - 1) == l).count();
            let acc = correct as f64 / points.len() as f64;
            best = best.max(acc).max(1.0 - acc);
        }
    }
    assert!(best <= 0.90, "a line classifies {best}");
}

#[test]
fn synthetic_features_encode_the_point() {
    let ds = build_synthetic2d(50, 9).unwrap();
    for s in ds.samples() {
        let (x, y) = synthetic_point(s).unwrap();
        assert_eq!(s.label, synthetic_label(x, y));
        assert_eq!(s.label == TARGET_LABEL, x * x + y * y < SYNTHETIC_RADIUS * SYNTHETIC_RADIUS);
        assert_eq!(encode_point(x, y).unwrap().amps(), &s.features[..]);
    }
}

#[test]
fn save_load_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ds.txt");
    for ds in [
        build_lu_orbit_dataset(3, 40, Opposition::FullHilbert, 5).unwrap(),
        build_synthetic2d(20, 5).unwrap(),
        build_three_qubit_dataset(NamedState::W, ThreeQubitOpposition::FullHilbert, 10, 5).unwrap(),
    ] {
        save_dataset(&ds, &path).unwrap();
        assert_eq!(load_dataset(&path).unwrap(), ds);
        let bytes = fs::read(&path).unwrap();
        save_dataset(&load_dataset(&path).unwrap(), &path).unwrap();
        assert_eq!(fs::read(&path).unwrap(), bytes);
    }
}

#[test]
fn header_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ds.txt");
    save_dataset(&build_graph_class_dataset(6, 8, 7).unwrap(), &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "orbitvqc-dataset v1; n_qubits=4; task=graph:class=6; seed=7; m=8");
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn truncated_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ds.txt");
    save_dataset(&build_graph_class_dataset(2, 10, 1).unwrap(), &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let kept: Vec<&str> = text.lines().take(6).collect();
    fs::write(&path, kept.join("\n")).unwrap();
    assert!(matches!(load_dataset(&path), Err(Error::Parse { .. })));
    // A line cut in the middle of its amplitudes is also rejected.
    let cut = &text[..text.len() - 30];
    fs::write(&path, cut).unwrap();
    assert!(matches!(load_dataset(&path), Err(Error::Parse { .. })));
}

#[test]
fn label_zero_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ds.txt");
    save_dataset(&build_graph_class_dataset(2, 4, 1).unwrap(), &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let broken: String = text.lines().enumerate().map(|(i, l)| {
        if i == 2 { format!("0{}", &l[l.find(';').unwrap()..]) } else { l.to_string() }
    }).collect::<Vec<_>>().join("\n");
    fs::write(&path, broken).unwrap();
    match load_dataset(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let s = Sample { features: vec![C::new(1.0, 0.0), C::new(0.0, 0.0)], label: 0, provenance: None };
    assert!(Dataset::new(1, "t", 0, vec![s]).is_err());
}

#[test]
fn builders_are_deterministic_per_seed() {
    assert_eq!(build_lu_orbit_dataset(2, 30, Opposition::OtherOrbits, 3).unwrap(), build_lu_orbit_dataset(2, 30, Opposition::OtherOrbits, 3).unwrap());
    assert_ne!(build_lu_orbit_dataset(2, 30, Opposition::OtherOrbits, 3).unwrap(), build_lu_orbit_dataset(2, 30, Opposition::OtherOrbits, 4).unwrap());
}
