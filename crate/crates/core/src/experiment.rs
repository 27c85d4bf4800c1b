//! Experiment grid: default specs per table, the row runner, metrics
//! records and model files.
//!
//! A row is one binary task (one class or named state against its
//! opposition). A row runs gen + split + train + eval from a single seed.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::ansatz::{AnsatzConfig, Entangler};
use crate::datasets::{
    build_graph_class_dataset, build_lu_orbit_dataset, build_stabilizer_dataset, build_synthetic2d,
    build_three_qubit_dataset, split_even, Dataset, Opposition, ThreeQubitOpposition,
};
use crate::error::{Error, Result};
use crate::hybrid::{evaluate_accuracy, fit, FitReport, HybridModel, TrainConfig};
use crate::rng;
use crate::stategen::NamedState;

/// Bumped whenever a default in [`Defaults::for_experiment`] changes.
pub const DEFAULTS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Fig2,
    Table1,
    Table2ThreeQubit,
    Table3Graph,
    Table4Stab,
    Table5Lu,
    Table6LuHilbert,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::Fig2,
        ExperimentId::Table1,
        ExperimentId::Table2ThreeQubit,
        ExperimentId::Table3Graph,
        ExperimentId::Table4Stab,
        ExperimentId::Table5Lu,
        ExperimentId::Table6LuHilbert,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentId::Fig2 => "fig2",
            ExperimentId::Table1 => "table1",
            ExperimentId::Table2ThreeQubit => "table2-3q",
            ExperimentId::Table3Graph => "table3-graph",
            ExperimentId::Table4Stab => "table4-stab",
            ExperimentId::Table5Lu => "table5-lu",
            ExperimentId::Table6LuHilbert => "table6-lu-hilbert",
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            ExperimentId::Fig2 => 2,
            ExperimentId::Table1 | ExperimentId::Table2ThreeQubit => 3,
            _ => 4,
        }
    }

    /// Every row of the table, in display order.
    pub fn rows(&self) -> Vec<RowTarget> {
        match self {
            ExperimentId::Fig2 => vec![RowTarget::Synthetic { quantum_only: false }, RowTarget::Synthetic { quantum_only: true }],
            ExperimentId::Table1 => NamedState::ALL
                .into_iter()
                .filter(|&s| s != NamedState::Ghz)
                .map(RowTarget::GhzVersus)
                .collect(),
            ExperimentId::Table2ThreeQubit => NamedState::ALL.into_iter().map(RowTarget::NamedVsHilbert).collect(),
            _ => (1..=6).map(RowTarget::Class).collect(),
        }
    }

    /// Resolves the `--class` / `--target` flags to a row of this table.
    pub fn row(&self, class: Option<usize>, target: Option<&str>) -> Result<RowTarget> {
        let row = match self {
            ExperimentId::Fig2 => match target.unwrap_or("hybrid") {
                "hybrid" => RowTarget::Synthetic { quantum_only: false },
                "quantum-only" => RowTarget::Synthetic { quantum_only: true },
                other => {
                    return Err(Error::UnknownName { name: other.into(), valid: "hybrid, quantum-only".into() })
                }
            },
            ExperimentId::Table1 => {
                let t = target.ok_or_else(|| Error::Config("table1 needs --target <named state>".into()))?;
                RowTarget::GhzVersus(t.parse()?)
            }
            ExperimentId::Table2ThreeQubit => {
                let t = target.ok_or_else(|| Error::Config("table2-3q needs --target <named state>".into()))?;
                RowTarget::NamedVsHilbert(t.parse()?)
            }
            _ => RowTarget::Class(class.ok_or_else(|| Error::Config(format!("{} needs --class 1..6", self.name())))?),
        };
        row.validate()?;
        Ok(row)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| Error::UnknownName {
            name: s.to_string(),
            valid: ExperimentId::ALL.map(|e| e.name()).join(", "),
        })
    }
}

/// One binary task within a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowTarget {
    /// The 2-D disc task, with or without the classical head.
    Synthetic { quantum_only: bool },
    /// GHZ orbit against another named orbit.
    GhzVersus(NamedState),
    /// A named three-qubit orbit against random pure states.
    NamedVsHilbert(NamedState),
    /// A four-qubit graph class `1..=6`.
    Class(usize),
}

impl RowTarget {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RowTarget::Class(c) if !(1..=6).contains(&c) => Err(Error::InvalidClass(c)),
            RowTarget::GhzVersus(NamedState::Ghz) => Err(Error::Config("GHZ cannot be its own opposition".into())),
            _ => Ok(()),
        }
    }

    /// Short label used in tables and metrics records.
    pub fn label(&self) -> String {
        match self {
            RowTarget::Synthetic { quantum_only: false } => "hybrid".into(),
            RowTarget::Synthetic { quantum_only: true } => "quantum-only".into(),
            RowTarget::GhzVersus(s) => format!("GHZ-vs-{s}"),
            RowTarget::NamedVsHilbert(s) => s.name().into(),
            RowTarget::Class(c) => c.to_string(),
        }
    }
}

/// Per-table defaults. Versioned by [`DEFAULTS_VERSION`].
#[derive(Debug, Clone, PartialEq)]
pub struct Defaults {
    pub n_layers: usize,
    pub entangler: Entangler,
    pub hidden: Vec<usize>,
    /// Circuit angles start uniform in `[-angle_width, angle_width]`.
    pub angle_width: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub m: usize,
}

impl Defaults {
    pub fn for_experiment(id: ExperimentId) -> Defaults {
        let base = Defaults {
            n_layers: 2,
            entangler: Entangler::RingCz,
            hidden: vec![32, 32],
            angle_width: 0.1,
            learning_rate: 0.01,
            epochs: 300,
            batch_size: 32,
            m: 2000,
        };
        match id {
            // Discrete inputs and a nonlinear boundary: deeper CNOT ring, small head.
            ExperimentId::Fig2 | ExperimentId::Table3Graph => Defaults {
                n_layers: 4,
                entangler: Entangler::RingCnot,
                hidden: vec![8],
                angle_width: std::f64::consts::PI,
                learning_rate: 0.005,
                epochs: 150,
                ..base
            },
            _ => base,
        }
    }
}

/// Everything needed to run one row.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: ExperimentId,
    pub target: RowTarget,
    pub ansatz: AnsatzConfig,
    /// `None` means no classical head.
    pub hidden: Option<Vec<usize>>,
    pub angle_width: f64,
    pub train: TrainConfig,
    pub m: usize,
    pub seed: u64,
}

impl ExperimentSpec {
    /// The documented default spec for a row.
    pub fn default_for(experiment: ExperimentId, target: RowTarget, seed: u64) -> Result<Self> {
        let d = Defaults::for_experiment(experiment);
        let hidden = match target {
            RowTarget::Synthetic { quantum_only: true } => None,
            _ => Some(d.hidden.clone()),
        };
        let spec = ExperimentSpec {
            experiment,
            target,
            ansatz: AnsatzConfig::new(experiment.n_qubits(), d.n_layers, d.entangler)?,
            hidden,
            angle_width: d.angle_width,
            train: TrainConfig {
                epochs: d.epochs,
                batch_size: d.batch_size,
                learning_rate: d.learning_rate,
                seed,
                ..TrainConfig::default()
            },
            m: d.m,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.target.validate()?;
        let fits = match self.target {
            RowTarget::Synthetic { .. } => self.experiment == ExperimentId::Fig2,
            RowTarget::GhzVersus(_) => self.experiment == ExperimentId::Table1,
            RowTarget::NamedVsHilbert(_) => self.experiment == ExperimentId::Table2ThreeQubit,
            RowTarget::Class(_) => self.experiment.n_qubits() == 4,
        };
        if !fits {
            return Err(Error::Config(format!("row {} does not belong to {}", self.target.label(), self.experiment)));
        }
        self.ansatz.validate()?;
        if self.ansatz.n_qubits != self.experiment.n_qubits() {
            return Err(Error::Config(format!(
                "{} runs on {} qubits, not {}",
                self.experiment,
                self.experiment.n_qubits(),
                self.ansatz.n_qubits
            )));
        }
        if let Some(h) = &self.hidden {
            if h.contains(&0) {
                return Err(Error::Config("hidden layer sizes must be positive".into()));
            }
        }
        if self.m < 4 || self.m % 2 != 0 {
            return Err(Error::OddSampleCount(self.m));
        }
        self.train.validate(self.m / 2)
    }

    /// Task id that [`ExperimentSpec::build_dataset`] writes into the dataset.
    pub fn task_id(&self) -> String {
        match (self.experiment, self.target) {
            (_, RowTarget::Synthetic { .. }) => "synthetic2d".into(),
            (_, RowTarget::GhzVersus(o)) => format!("three-qubit:GHZ:vs={}", o.name()),
            (_, RowTarget::NamedVsHilbert(t)) => format!("three-qubit:{}:vs=full-hilbert", t.name()),
            (ExperimentId::Table3Graph, RowTarget::Class(c)) => format!("graph:class={c}"),
            (ExperimentId::Table4Stab, RowTarget::Class(c)) => format!("stabilizer:class={c}"),
            (ExperimentId::Table5Lu, RowTarget::Class(c)) => format!("lu:class={c}:vs=other-orbits"),
            (_, RowTarget::Class(c)) => format!("lu:class={c}:vs=full-hilbert"),
        }
    }

    pub fn build_dataset(&self) -> Result<Dataset> {
        self.validate()?;
        let (m, seed) = (self.m, self.seed);
        match (self.experiment, self.target) {
            (_, RowTarget::Synthetic { .. }) => build_synthetic2d(m, seed),
            (_, RowTarget::GhzVersus(o)) => build_three_qubit_dataset(NamedState::Ghz, ThreeQubitOpposition::Named(o), m, seed),
            (_, RowTarget::NamedVsHilbert(t)) => build_three_qubit_dataset(t, ThreeQubitOpposition::FullHilbert, m, seed),
            (ExperimentId::Table3Graph, RowTarget::Class(c)) => build_graph_class_dataset(c, m, seed),
            (ExperimentId::Table4Stab, RowTarget::Class(c)) => build_stabilizer_dataset(c, m, seed),
            (ExperimentId::Table5Lu, RowTarget::Class(c)) => build_lu_orbit_dataset(c, m, Opposition::OtherOrbits, seed),
            (_, RowTarget::Class(c)) => build_lu_orbit_dataset(c, m, Opposition::FullHilbert, seed),
        }
    }

    pub fn init_model(&self) -> Result<HybridModel> {
        HybridModel::init(self.ansatz, self.hidden.as_deref(), self.angle_width, rng::derive_seed(self.seed, "model", 0))
    }

    /// Rejects datasets generated for another row.
    pub fn check_dataset(&self, ds: &Dataset) -> Result<()> {
        if ds.n_qubits() != self.ansatz.n_qubits || ds.task() != self.task_id() {
            return Err(Error::Config(format!(
                "dataset task {} on {} qubits does not match {} row {} ({} on {} qubits)",
                ds.task(),
                ds.n_qubits(),
                self.experiment,
                self.target.label(),
                self.task_id(),
                self.ansatz.n_qubits
            )));
        }
        Ok(())
    }

    /// Split, train and evaluate on an existing dataset.
    pub fn train_on(&self, ds: &Dataset) -> Result<RowOutcome> {
        self.validate()?;
        self.check_dataset(ds)?;
        let start = Instant::now();
        let (train, test) = split_even(ds, rng::derive_seed(self.seed, "split", 0))?;
        let mut model = self.init_model()?;
        let report = fit(&mut model, &train, &self.train)?;
        let record = MetricsRecord {
            experiment: self.experiment.name().into(),
            class: self.target.label(),
            seed: self.seed,
            train_accuracy: evaluate_accuracy(&model, &train)?,
            test_accuracy: evaluate_accuracy(&model, &test)?,
            initial_cost: report.initial_cost,
            final_cost: report.final_cost(),
            epochs: report.epochs_run(),
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        Ok(RowOutcome { model, report, record })
    }

    /// gen + split + train + eval.
    pub fn run(&self) -> Result<RowOutcome> {
        let ds = self.build_dataset()?;
        self.train_on(&ds)
    }

    /// One-line description for `--dry-run`.
    pub fn describe(&self) -> String {
        let hidden = match &self.hidden {
            Some(h) => h.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            None => "none".into(),
        };
        format!(
            "{} row={} seed={} m={} qubits={} layers={} entangler={} hidden={} angle_width={} lr={} epochs={} batch={}",
            self.experiment,
            self.target.label(),
            self.seed,
            self.m,
            self.ansatz.n_qubits,
            self.ansatz.n_layers,
            self.ansatz.entangler.name(),
            hidden,
            self.angle_width,
            self.train.learning_rate,
            self.train.epochs,
            self.train.batch_size
        )
    }
}

/// Result of running a row.
#[derive(Debug, Clone)]
pub struct RowOutcome {
    pub model: HybridModel,
    pub report: FitReport,
    pub record: MetricsRecord,
}

/// Overrides applied on top of the defaults of every row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub m: Option<usize>,
    pub layers: Option<usize>,
    pub hidden: Option<Vec<usize>>,
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut ExperimentSpec) -> Result<()> {
        if let Some(m) = self.m {
            spec.m = m;
            spec.train.batch_size = spec.train.batch_size.min(m / 2).max(1);
        }
        if let Some(l) = self.layers {
            spec.ansatz = AnsatzConfig::new(spec.ansatz.n_qubits, l, spec.ansatz.entangler)?;
        }
        if let (Some(h), Some(_)) = (&self.hidden, &spec.hidden) {
            spec.hidden = Some(h.clone());
        }
        if let Some(lr) = self.learning_rate {
            spec.train.learning_rate = lr;
        }
        if let Some(e) = self.epochs {
            spec.train.epochs = e;
        }
        spec.validate()
    }
}

/// Seed of row `index` of a grid run from `master`.
pub fn row_seed(master: u64, experiment: ExperimentId, index: usize) -> u64 {
    rng::derive_seed(master, experiment.name(), index as u64)
}

/// The full grid of a table, with seeds derived from `master`.
pub fn grid(experiment: ExperimentId, master: u64, overrides: &Overrides) -> Result<Vec<ExperimentSpec>> {
    experiment
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut spec = ExperimentSpec::default_for(experiment, row, row_seed(master, experiment, i))?;
            overrides.apply(&mut spec)?;
            Ok(spec)
        })
        .collect()
}

/// Runs every row. Rows run in parallel; results keep grid order.
pub fn run_grid(specs: &[ExperimentSpec]) -> Result<Vec<MetricsRecord>> {
    specs.par_iter().map(|s| s.run().map(|o| o.record)).collect()
}

/// One row of results.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub experiment: String,
    pub class: String,
    pub seed: u64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub epochs: usize,
    pub wall_seconds: f64,
}

impl MetricsRecord {
    pub const CSV_HEADER: &'static str =
        "experiment,class,seed,train_accuracy,test_accuracy,initial_cost,final_cost,epochs,wall_seconds";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:?},{:?},{:?},{:?},{},{:.3}",
            self.experiment,
            self.class,
            self.seed,
            self.train_accuracy,
            self.test_accuracy,
            self.initial_cost,
            self.final_cost,
            self.epochs,
            self.wall_seconds
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 9 {
            return Err(Error::Config(format!("metrics line needs 9 fields, got {}", f.len())));
        }
        let num = |i: usize| f[i].parse::<f64>().map_err(|e| Error::Config(format!("field {i} {:?}: {e}", f[i])));
        let int = |i: usize| f[i].parse::<u64>().map_err(|e| Error::Config(format!("field {i} {:?}: {e}", f[i])));
        Ok(MetricsRecord {
            experiment: f[0].into(),
            class: f[1].into(),
            seed: int(2)?,
            train_accuracy: num(3)?,
            test_accuracy: num(4)?,
            initial_cost: num(5)?,
            final_cost: num(6)?,
            epochs: int(7)? as usize,
            wall_seconds: num(8)?,
        })
    }

    /// Equality on everything except wall-clock time.
    pub fn same_result(&self, other: &MetricsRecord) -> bool {
        MetricsRecord { wall_seconds: 0.0, ..self.clone() } == MetricsRecord { wall_seconds: 0.0, ..other.clone() }
    }
}

/// Aligned text table of a set of records.
pub fn format_table(records: &[MetricsRecord]) -> String {
    let mut out = format!(
        "{:<18} {:<16} {:>20} {:>8} {:>8} {:>10} {:>7} {:>8}\n",
        "experiment", "class", "seed", "train", "test", "cost", "epochs", "seconds"
    );
    for r in records {
        out.push_str(&format!(
            "{:<18} {:<16} {:>20} {:>8.3} {:>8.3} {:>10.4} {:>7} {:>8.1}\n",
            r.experiment, r.class, r.seed, r.train_accuracy, r.test_accuracy, r.final_cost, r.epochs, r.wall_seconds
        ));
    }
    out
}

/// Appends records to a CSV file, writing the header only when the file
/// is new or empty.
pub fn append_metrics(path: &Path, records: &[MetricsRecord]) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = fs::OpenOptions::new().create(true).append(true).open(path)?;
    let mut out = BufWriter::new(file);
    if fresh {
        writeln!(out, "{}", MetricsRecord::CSV_HEADER)?;
    }
    for r in records {
        writeln!(out, "{}", r.to_csv())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRecord>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && *l != MetricsRecord::CSV_HEADER)
        .map(|(i, l)| {
            MetricsRecord::from_csv(l).map_err(|e| Error::Parse { path: path.to_path_buf(), line: i + 1, msg: e.to_string() })
        })
        .collect()
}

/// Acceptance thresholds of a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Minimum test accuracy of every row with a classical head.
    pub row_min: f64,
    /// Minimum mean test accuracy over the rows, when the table has one.
    pub mean_min: Option<f64>,
    /// Maximum test accuracy of the head-less row (FIG. 2 only).
    pub quantum_only_max: Option<f64>,
}

impl Thresholds {
    pub fn for_experiment(id: ExperimentId) -> Thresholds {
        let t = |row_min, mean_min| Thresholds { row_min, mean_min, quantum_only_max: None };
        match id {
            ExperimentId::Fig2 => Thresholds { row_min: 0.98, mean_min: None, quantum_only_max: Some(0.90) },
            ExperimentId::Table1 => t(0.95, None),
            ExperimentId::Table2ThreeQubit => t(0.78, Some(0.85)),
            ExperimentId::Table3Graph => t(0.95, None),
            ExperimentId::Table4Stab => t(0.85, None),
            ExperimentId::Table5Lu => t(0.82, None),
            ExperimentId::Table6LuHilbert => t(0.85, None),
        }
    }

    /// Failure messages; empty when every check passes. Every row must
    /// also end with a lower training cost than it started with.
    pub fn check(&self, records: &[MetricsRecord]) -> Vec<String> {
        let mut failures = Vec::new();
        let mut headed = Vec::new();
        for r in records {
            if !(r.final_cost < r.initial_cost) {
                failures.push(format!("{} {}: cost rose from {:.4} to {:.4}", r.experiment, r.class, r.initial_cost, r.final_cost));
            }
            if r.class == "quantum-only" {
                if let Some(max) = self.quantum_only_max {
                    if r.test_accuracy > max {
                        failures.push(format!("{} {}: test {:.3} > {max}", r.experiment, r.class, r.test_accuracy));
                    }
                }
                continue;
            }
            headed.push(r.test_accuracy);
            if r.test_accuracy < self.row_min {
                failures.push(format!("{} {}: test {:.3} < {}", r.experiment, r.class, r.test_accuracy, self.row_min));
            }
        }
        if let (Some(min), false) = (self.mean_min, headed.is_empty()) {
            let mean = headed.iter().sum::<f64>() / headed.len() as f64;
            if mean < min {
                failures.push(format!("mean test {mean:.3} < {min}"));
            }
        }
        failures
    }
}

pub const MODEL_MAGIC: &str = "orbitvqc-model v1";

/// Writes the architecture header and the flat parameter list.
pub fn save_model(model: &HybridModel, path: &Path) -> Result<()> {
    let hidden = match &model.head {
        Some(h) => {
            let sizes = h.sizes();
            sizes[1..sizes.len() - 1].iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        }
        None => "none".into(),
    };
    let params: Vec<String> = model.params_flat().iter().map(|p| format!("{p:?}")).collect();
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(
        out,
        "{MODEL_MAGIC}; n_qubits={}; n_layers={}; entangler={}; hidden={}; n_params={}",
        model.cfg.n_qubits,
        model.cfg.n_layers,
        model.cfg.entangler.name(),
        hidden,
        params.len()
    )?;
    writeln!(out, "{}", params.join(","))?;
    out.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<HybridModel> {
    let text = fs::read_to_string(path)?;
    let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let mut fields = header.split("; ");
    if fields.next() != Some(MODEL_MAGIC) {
        return Err(err(1, format!("expected header starting with {MODEL_MAGIC:?}")));
    }
    let mut get = |key: &str| -> Result<String> {
        let f = fields.next().ok_or_else(|| err(1, format!("missing {key}")))?;
        f.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .map(str::to_string)
            .ok_or_else(|| err(1, format!("expected {key}=..., got {f:?}")))
    };
    let parse_usize = |s: String| s.parse::<usize>().map_err(|e| err(1, e.to_string()));
    let n_qubits = parse_usize(get("n_qubits")?)?;
    let n_layers = parse_usize(get("n_layers")?)?;
    let entangler: Entangler = get("entangler")?.parse()?;
    let hidden_s = get("hidden")?;
    let n_params = parse_usize(get("n_params")?)?;
    let hidden = match hidden_s.as_str() {
        "none" => None,
        s => Some(s.split(',').map(|x| x.parse::<usize>().map_err(|e| err(1, e.to_string()))).collect::<Result<Vec<_>>>()?),
    };
    let params = lines
        .next()
        .ok_or_else(|| err(2, "missing parameter line".into()))?
        .split(',')
        .map(|x| x.parse::<f64>().map_err(|e| err(2, format!("{x:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if params.len() != n_params {
        return Err(err(2, format!("header promises {n_params} parameters, found {}", params.len())));
    }
    let cfg = AnsatzConfig::new(n_qubits, n_layers, entangler)?;
    let mut model = HybridModel::init(cfg, hidden.as_deref(), 0.0, 0)?;
    model.set_params_flat(&params)?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(experiment: ExperimentId, target: RowTarget) -> ExperimentSpec {
        let mut s = ExperimentSpec::default_for(experiment, target, 3).unwrap();
        s.m = 8;
        s.train.epochs = 2;
        s.train.batch_size = 4;
        s
    }

    #[test]
    fn ids_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.name().parse::<ExperimentId>().unwrap(), id);
        }
        match "table9".parse::<ExperimentId>() {
            Err(Error::UnknownName { valid, .. }) => assert!(valid.contains("table3-graph") && valid.contains("fig2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn row_counts() {
        let counts: Vec<usize> = ExperimentId::ALL.iter().map(|e| e.rows().len()).collect();
        assert_eq!(counts, vec![2, 5, 6, 6, 6, 6, 6]);
    }

    #[test]
    fn class_out_of_range() {
        assert!(matches!(ExperimentId::Table3Graph.row(Some(7), None), Err(Error::InvalidClass(7))));
        assert!(matches!(ExperimentId::Table3Graph.row(Some(0), None), Err(Error::InvalidClass(0))));
        assert!(ExperimentId::Table1.row(None, Some("GHZ")).is_err());
        assert!(ExperimentId::Table1.row(None, Some("cluster")).is_err());
    }

    #[test]
    fn task_ids_match_builders() {
        for id in ExperimentId::ALL {
            for row in id.rows() {
                let spec = small(id, row);
                assert_eq!(spec.build_dataset().unwrap().task(), spec.task_id(), "{id} {}", row.label());
            }
        }
    }

    #[test]
    fn grid_seeds_are_distinct() {
        let g = grid(ExperimentId::Table5Lu, 7, &Overrides::default()).unwrap();
        let mut seeds: Vec<u64> = g.iter().map(|s| s.seed).collect();
        seeds.dedup();
        assert_eq!(seeds.len(), 6);
    }

    #[test]
    fn overrides_reject_bad_lr() {
        let mut s = ExperimentSpec::default_for(ExperimentId::Table3Graph, RowTarget::Class(1), 1).unwrap();
        let o = Overrides { learning_rate: Some(1.5), ..Default::default() };
        assert!(matches!(o.apply(&mut s), Err(Error::Config(_))));
    }

    #[test]
    fn mismatched_dataset_rejected() {
        let a = small(ExperimentId::Table3Graph, RowTarget::Class(1));
        let b = small(ExperimentId::Table3Graph, RowTarget::Class(2));
        let ds = a.build_dataset().unwrap();
        assert!(matches!(b.train_on(&ds), Err(Error::Config(_))));
    }

    #[test]
    fn csv_round_trip() {
        let r = MetricsRecord {
            experiment: "table3-graph".into(),
            class: "4".into(),
            seed: 99,
            train_accuracy: 0.1 + 0.2,
            test_accuracy: 1.0,
            initial_cost: 1.0000001,
            final_cost: 1e-7,
            epochs: 12,
            wall_seconds: 1.5,
        };
        assert_eq!(MetricsRecord::from_csv(&r.to_csv()).unwrap(), r);
    }

    #[test]
    fn metrics_file_is_append_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let spec = small(ExperimentId::Table3Graph, RowTarget::Class(2));
        let a = spec.run().unwrap().record;
        append_metrics(&path, std::slice::from_ref(&a)).unwrap();
        let before = fs::read_to_string(&path).unwrap();
        append_metrics(&path, std::slice::from_ref(&a)).unwrap();
        let after = fs::read_to_string(&path).unwrap();
        assert!(after.starts_with(&before));
        assert_eq!(read_metrics(&path).unwrap().len(), 2);
        assert_eq!(after.matches(MetricsRecord::CSV_HEADER).count(), 1);
    }

    #[test]
    fn model_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for target in [RowTarget::Synthetic { quantum_only: false }, RowTarget::Synthetic { quantum_only: true }] {
            let spec = small(ExperimentId::Fig2, target);
            let model = spec.init_model().unwrap();
            let path = dir.path().join("model.txt");
            save_model(&model, &path).unwrap();
            assert_eq!(load_model(&path).unwrap().params_flat(), model.params_flat());
        }
    }

    #[test]
    fn thresholds_flag_failures() {
        let rec = |class: &str, test: f64| MetricsRecord {
            experiment: "fig2".into(),
            class: class.into(),
            seed: 0,
            train_accuracy: test,
            test_accuracy: test,
            initial_cost: 1.0,
            final_cost: 0.5,
            epochs: 1,
            wall_seconds: 0.0,
        };
        let t = Thresholds::for_experiment(ExperimentId::Fig2);
        assert!(t.check(&[rec("hybrid", 0.99), rec("quantum-only", 0.7)]).is_empty());
        assert_eq!(t.check(&[rec("hybrid", 0.97), rec("quantum-only", 0.95)]).len(), 2);
        let t2 = Thresholds::for_experiment(ExperimentId::Table2ThreeQubit);
        assert_eq!(t2.check(&[rec("W", 0.80), rec("GHZ", 0.80)]), vec!["mean test 0.800 < 0.85".to_string()]);
    }
}
