//! Balanced labeled datasets of quantum states and their text file format.
//!
//! Label `-1` always marks the orbit being learned, `+1` the opposition.
//! Sample `i` of every builder draws from its own random substream, so
//! datasets are identical regardless of generation order or thread count.
//!
//! File layout:
//!
//! ```text
//! orbitvqc-dataset v1; n_qubits=4; task=graph:class=6; seed=7; m=2000
//! -1;0.25,0,0.25,0,...;graph=7
//! ```
//!
//! Each sample line is `label;re0,im0,re1,im1,...` with an optional third
//! field holding provenance (how the state was built).

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::Path;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use rayon::prelude::*;

use crate::ansatz::amplitude_encode;
use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::stategen::{
    four_qubit_classes, graph_state, random_local_clifford, random_local_haar, random_pure_state, Graph, NamedState,
};
use crate::statevec::{Gate1Q, StateVector, C64, NORM_TOL};

pub const FORMAT_MAGIC: &str = "orbitvqc-dataset v1";

/// Label of the orbit a classifier is trained to recognize.
pub const TARGET_LABEL: i8 = -1;
pub const OTHER_LABEL: i8 = 1;

/// Radius of the inner disc of the synthetic 2-D task.
pub const SYNTHETIC_RADIUS: f64 = 0.6;

/// Fixed extra amplitudes appended to a 2-D point before normalization.
pub const SYNTHETIC_PAD: [f64; 2] = [0.0, 0.25];

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<C64>,
    pub label: i8,
    pub provenance: Option<String>,
}

impl Sample {
    pub fn new(state: StateVector, label: i8, provenance: Option<String>) -> Self {
        Self { features: state.into_amps(), label, provenance }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_qubits: usize,
    task: String,
    seed: u64,
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(n_qubits: usize, task: impl Into<String>, seed: u64, samples: Vec<Sample>) -> Result<Self> {
        let task = task.into();
        if task.is_empty() || task.contains([';', '\n', '\r']) || task.contains(char::is_whitespace) {
            return Err(Error::Config(format!("task id {task:?} must be a non-empty token without ';' or spaces")));
        }
        if n_qubits == 0 || n_qubits > 20 {
            return Err(Error::Config(format!("unsupported qubit count {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        for (i, s) in samples.iter().enumerate() {
            validate_sample(s, dim).map_err(|msg| Error::Config(format!("sample {i}: {msg}")))?;
        }
        Ok(Self { n_qubits, task, seed, samples })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn task(&self) -> &str {
        &self.task
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<i8> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn count_label(&self, label: i8) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }

    pub fn state(&self, i: usize) -> StateVector {
        StateVector::from_amplitudes(self.n_qubits, self.samples[i].features.clone())
            .expect("samples are validated on construction")
    }
}

fn validate_sample(s: &Sample, dim: usize) -> std::result::Result<(), String> {
    if s.label != TARGET_LABEL && s.label != OTHER_LABEL {
        return Err(format!("label {} is not -1 or 1", s.label));
    }
    if s.features.len() != dim {
        return Err(format!("{} amplitudes, expected {dim}", s.features.len()));
    }
    if s.features.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err("non-finite amplitude".into());
    }
    let norm_sqr: f64 = s.features.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() >= NORM_TOL {
        return Err(format!("amplitudes not normalized (norm^2 = {norm_sqr})"));
    }
    if let Some(p) = &s.provenance {
        if p.contains(['\n', '\r']) {
            return Err("provenance contains a line break".into());
        }
    }
    Ok(())
}

fn check_even(m: usize) -> Result<()> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::OddSampleCount(m));
    }
    Ok(())
}

fn check_class(class_id: usize) -> Result<()> {
    if !(1..=6).contains(&class_id) {
        return Err(Error::InvalidClass(class_id));
    }
    Ok(())
}

/// Generates `m` samples in parallel: indices below `m/2` are targets.
fn generate(m: usize, seed: u64, label: &str, make: impl Fn(bool, &mut Rng) -> Sample + Sync) -> Vec<Sample> {
    (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(seed, label, i as u64);
            make(i < m / 2, &mut rng)
        })
        .collect()
}

fn format_ops(ops: &[Gate1Q]) -> String {
    let mut out = String::new();
    for (q, op) in ops.iter().enumerate() {
        if q > 0 {
            out.push('|');
        }
        let m = op.matrix();
        let parts: Vec<String> = m.iter().flatten().flat_map(|z| [format!("{:?}", z.re), format!("{:?}", z.im)]).collect();
        out.push_str(&parts.join(","));
    }
    out
}

fn parse_ops(s: &str) -> Result<Vec<Gate1Q>> {
    s.split('|')
        .map(|chunk| {
            let v: Vec<f64> = chunk
                .split(',')
                .map(|x| x.parse::<f64>().map_err(|e| Error::Config(format!("bad operator entry {x:?}: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != 8 {
                return Err(Error::Config(format!("operator needs 8 reals, got {}", v.len())));
            }
            let z = |k: usize| C64::new(v[2 * k], v[2 * k + 1]);
            Gate1Q::unitary([[z(0), z(1)], [z(2), z(3)]])
        })
        .collect()
}

/// Uniform member of a uniformly chosen class other than `class_id`.
fn other_class_graph(class_id: usize, rng: &mut Rng) -> Graph {
    let table = four_qubit_classes();
    let others: Vec<usize> = (1..=6).filter(|&c| c != class_id).collect();
    let cls = table.class(*others.choose(rng).expect("five other classes")).expect("valid id");
    cls.members.choose(rng).expect("classes are non-empty").clone()
}

fn class_graph(class_id: usize, is_target: bool, rng: &mut Rng) -> Graph {
    if is_target {
        let cls = four_qubit_classes().class(class_id).expect("checked by caller");
        cls.members.choose(rng).expect("classes are non-empty").clone()
    } else {
        other_class_graph(class_id, rng)
    }
}

fn label_of(is_target: bool) -> i8 {
    if is_target {
        TARGET_LABEL
    } else {
        OTHER_LABEL
    }
}

/// Graph states of class `class_id` (label -1) against graph states of the
/// other five classes (label +1), drawn with repetition.
pub fn build_graph_class_dataset(class_id: usize, m: usize, seed: u64) -> Result<Dataset> {
    check_class(class_id)?;
    check_even(m)?;
    let samples = generate(m, seed, "graph-class", |is_target, rng| {
        let g = class_graph(class_id, is_target, rng);
        Sample::new(graph_state(&g), label_of(is_target), Some(format!("graph={}", g.edge_mask())))
    });
    Dataset::new(4, format!("graph:class={class_id}"), seed, samples)
}

/// Graph states with a fresh uniformly random local Clifford applied.
pub fn build_stabilizer_dataset(class_id: usize, m: usize, seed: u64) -> Result<Dataset> {
    check_class(class_id)?;
    check_even(m)?;
    let samples = generate(m, seed, "stabilizer", |is_target, rng| {
        let g = class_graph(class_id, is_target, rng);
        let ops = random_local_clifford(4, rng);
        let state = graph_state(&g).apply_local_operator(&ops).expect("four operators");
        let prov = format!("graph={} ops={}", g.edge_mask(), format_ops(&ops));
        Sample::new(state, label_of(is_target), Some(prov))
    });
    Dataset::new(4, format!("stabilizer:class={class_id}"), seed, samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Opposition {
    /// Samples from the LU orbits of the other representatives.
    OtherOrbits,
    /// Gaussian random pure states.
    FullHilbert,
}

impl Opposition {
    pub fn name(&self) -> &'static str {
        match self {
            Opposition::OtherOrbits => "other-orbits",
            Opposition::FullHilbert => "full-hilbert",
        }
    }
}

impl FromStr for Opposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "other-orbits" => Ok(Opposition::OtherOrbits),
            "full-hilbert" => Ok(Opposition::FullHilbert),
            _ => Err(Error::UnknownName { name: s.into(), valid: "other-orbits, full-hilbert".into() }),
        }
    }
}

/// Graph states of class `class_id` moved by Haar-random local unitaries,
/// against either the other classes' LU orbits or random pure states.
pub fn build_lu_orbit_dataset(class_id: usize, m: usize, opposition: Opposition, seed: u64) -> Result<Dataset> {
    check_class(class_id)?;
    check_even(m)?;
    let samples = generate(m, seed, "lu-orbit", |is_target, rng| {
        if !is_target && opposition == Opposition::FullHilbert {
            return Sample::new(random_pure_state(4, rng), OTHER_LABEL, Some("random-state".into()));
        }
        let g = class_graph(class_id, is_target, rng);
        let ops = random_local_haar(4, rng);
        let state = graph_state(&g).apply_local_operator(&ops).expect("four operators");
        let prov = format!("graph={} ops={}", g.edge_mask(), format_ops(&ops));
        Sample::new(state, label_of(is_target), Some(prov))
    });
    Dataset::new(4, format!("lu:class={class_id}:vs={}", opposition.name()), seed, samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeQubitOpposition {
    Named(NamedState),
    FullHilbert,
}

impl ThreeQubitOpposition {
    pub fn name(&self) -> &'static str {
        match self {
            ThreeQubitOpposition::Named(s) => s.name(),
            ThreeQubitOpposition::FullHilbert => "full-hilbert",
        }
    }
}

impl FromStr for ThreeQubitOpposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "full-hilbert" {
            Ok(ThreeQubitOpposition::FullHilbert)
        } else {
            Ok(ThreeQubitOpposition::Named(s.parse()?))
        }
    }
}

/// LU orbit of a named three-qubit state against another named orbit or
/// against random pure states.
pub fn build_three_qubit_dataset(
    target: NamedState,
    opposition: ThreeQubitOpposition,
    m: usize,
    seed: u64,
) -> Result<Dataset> {
    check_even(m)?;
    let samples = generate(m, seed, "three-qubit", |is_target, rng| {
        let rep = match (is_target, opposition) {
            (true, _) => target,
            (false, ThreeQubitOpposition::Named(other)) => other,
            (false, ThreeQubitOpposition::FullHilbert) => {
                return Sample::new(random_pure_state(3, rng), OTHER_LABEL, Some("random-state".into()))
            }
        };
        let ops = random_local_haar(3, rng);
        let state = rep.state().apply_local_operator(&ops).expect("three operators");
        let prov = format!("named={} ops={}", rep.name(), format_ops(&ops));
        Sample::new(state, label_of(is_target), Some(prov))
    });
    Dataset::new(3, format!("three-qubit:{}:vs={}", target.name(), opposition.name()), seed, samples)
}

/// Label of a point of the synthetic task: `-1` strictly inside the disc.
pub fn synthetic_label(x: f64, y: f64) -> i8 {
    if x * x + y * y < SYNTHETIC_RADIUS * SYNTHETIC_RADIUS {
        TARGET_LABEL
    } else {
        OTHER_LABEL
    }
}

/// Two-qubit amplitude encoding of a point: `normalize(x, y, 0, 0.25)`.
pub fn encode_point(x: f64, y: f64) -> Result<StateVector> {
    let pad = SYNTHETIC_PAD.map(|p| C64::new(p, 0.0));
    amplitude_encode(&[C64::new(x, 0.0), C64::new(y, 0.0)], 2, &pad)
}

/// Points uniform on `[-1, 1]²`, rejection-sampled so exactly half fall
/// inside the disc of radius [`SYNTHETIC_RADIUS`]. Features hold the
/// encoded state; the raw point is kept as provenance.
pub fn build_synthetic2d(m: usize, seed: u64) -> Result<Dataset> {
    check_even(m)?;
    let samples = generate(m, seed, "synthetic2d", |is_target, rng| {
        let want = label_of(is_target);
        loop {
            let x: f64 = rng.random_range(-1.0..=1.0);
            let y: f64 = rng.random_range(-1.0..=1.0);
            if synthetic_label(x, y) == want {
                let state = encode_point(x, y).expect("padding keeps the norm positive");
                return Sample::new(state, want, Some(format!("point={x:?},{y:?}")));
            }
        }
    });
    Dataset::new(2, "synthetic2d", seed, samples)
}

/// Raw `(x, y)` of a synthetic sample, from its provenance.
pub fn synthetic_point(sample: &Sample) -> Option<(f64, f64)> {
    let rest = sample.provenance.as_deref()?.strip_prefix("point=")?;
    let (x, y) = rest.split_once(',')?;
    Some((x.parse().ok()?, y.parse().ok()?))
}

/// Rebuilds a sample's state from its provenance (graph or named
/// representative plus the logged local operators). Returns `None` for
/// samples without replayable provenance.
pub fn replay_provenance(sample: &Sample) -> Option<Result<StateVector>> {
    let prov = sample.provenance.as_deref()?;
    let mut base: Option<Result<StateVector>> = None;
    let mut ops: Option<&str> = None;
    for field in prov.split(' ') {
        if let Some(mask) = field.strip_prefix("graph=") {
            base = Some(
                mask.parse::<u64>()
                    .map_err(|e| Error::Config(format!("bad graph id {mask:?}: {e}")))
                    .and_then(|mask| Graph::from_edge_mask(4, mask))
                    .map(|g| graph_state(&g)),
            );
        } else if let Some(name) = field.strip_prefix("named=") {
            base = Some(name.parse::<NamedState>().map(|n| n.state()));
        } else if let Some(o) = field.strip_prefix("ops=") {
            ops = Some(o);
        }
    }
    let base = base?;
    Some(base.and_then(|state| match ops {
        Some(o) => state.apply_local_operator(&parse_ops(o)?),
        None => Ok(state),
    }))
}

/// Stratified 50/50 split: each half receives half of each label.
pub fn split_even(ds: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    if ds.len() % 2 != 0 || ds.is_empty() {
        return Err(Error::OddSampleCount(ds.len()));
    }
    let mut rng = rng::substream(seed, "split", 0);
    let mut neg: Vec<usize> = (0..ds.len()).filter(|&i| ds.samples[i].label == TARGET_LABEL).collect();
    let mut pos: Vec<usize> = (0..ds.len()).filter(|&i| ds.samples[i].label != TARGET_LABEL).collect();
    neg.shuffle(&mut rng);
    pos.shuffle(&mut rng);
    // Odd label counts: the train half takes the extra negative, the test
    // half the extra positive, so both halves keep m/2 samples.
    let neg_train = neg.len().div_ceil(2);
    let pos_train = ds.len() / 2 - neg_train;
    let mut train_idx: Vec<usize> = neg[..neg_train].iter().chain(&pos[..pos_train]).copied().collect();
    let mut test_idx: Vec<usize> = neg[neg_train..].iter().chain(&pos[pos_train..]).copied().collect();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let pick = |idx: &[usize]| idx.iter().map(|&i| ds.samples[i].clone()).collect::<Vec<_>>();
    Ok((
        Dataset { n_qubits: ds.n_qubits, task: ds.task.clone(), seed: ds.seed, samples: pick(&train_idx) },
        Dataset { n_qubits: ds.n_qubits, task: ds.task.clone(), seed: ds.seed, samples: pick(&test_idx) },
    ))
}

pub fn save_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(
        out,
        "{FORMAT_MAGIC}; n_qubits={}; task={}; seed={}; m={}",
        ds.n_qubits,
        ds.task,
        ds.seed,
        ds.len()
    )?;
    let mut line = String::new();
    for s in &ds.samples {
        line.clear();
        write!(line, "{};", s.label).expect("writing to a String");
        for (k, a) in s.features.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            write!(line, "{:?},{:?}", a.re, a.im).expect("writing to a String");
        }
        if let Some(p) = &s.provenance {
            line.push(';');
            line.push_str(p);
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

fn parse_header(line: &str) -> std::result::Result<(usize, String, u64, usize), String> {
    let mut fields = line.split(';').map(str::trim);
    if fields.next() != Some(FORMAT_MAGIC) {
        return Err(format!("expected header starting with {FORMAT_MAGIC:?}"));
    }
    let (mut n, mut task, mut seed, mut m) = (None, None, None, None);
    for f in fields {
        let (key, value) = f.split_once('=').ok_or_else(|| format!("header field {f:?} is not key=value"))?;
        let bad = |e: &dyn std::fmt::Display| format!("header field {key}: {e}");
        match key {
            "n_qubits" => n = Some(value.parse::<usize>().map_err(|e| bad(&e))?),
            "task" => task = Some(value.to_string()),
            "seed" => seed = Some(value.parse::<u64>().map_err(|e| bad(&e))?),
            "m" => m = Some(value.parse::<usize>().map_err(|e| bad(&e))?),
            _ => return Err(format!("unknown header field {key:?}")),
        }
    }
    match (n, task, seed, m) {
        (Some(n), Some(t), Some(s), Some(m)) => Ok((n, t, s, m)),
        _ => Err("header must define n_qubits, task, seed and m".into()),
    }
}

fn parse_sample(line: &str, dim: usize) -> std::result::Result<Sample, String> {
    let mut parts = line.splitn(3, ';');
    let label_str = parts.next().unwrap_or_default();
    let label: i8 = label_str.trim().parse().map_err(|_| format!("label {label_str:?} is not an integer"))?;
    let amps_str = parts.next().ok_or("missing amplitude field")?;
    let provenance = parts.next().map(str::to_string);
    let reals: Vec<f64> = amps_str
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}")))
        .collect::<std::result::Result<_, _>>()?;
    if reals.len() != 2 * dim {
        return Err(format!("{} numbers, expected {} (re,im for {dim} amplitudes)", reals.len(), 2 * dim));
    }
    let features = reals.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
    let sample = Sample { features, label, provenance };
    validate_sample(&sample, dim)?;
    Ok(sample)
}

/// Reads a dataset written by [`save_dataset`]. Any malformed line rejects
/// the whole file.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let (n_qubits, task, seed, m) = parse_header(header).map_err(|e| err(1, e))?;
    if n_qubits == 0 || n_qubits > 20 {
        return Err(err(1, format!("unsupported qubit count {n_qubits}")));
    }
    let dim = 1usize << n_qubits;
    let mut samples = Vec::with_capacity(m);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        samples.push(parse_sample(line, dim).map_err(|e| err(lineno, e))?);
    }
    if samples.len() != m {
        return Err(err(
            samples.len() + 1,
            format!("header declares m={m} samples but the file holds {}", samples.len()),
        ));
    }
    Dataset::new(n_qubits, task, seed, samples)
}
