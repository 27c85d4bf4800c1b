use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use orbitvqc::datasets::{load_dataset, save_dataset};
use orbitvqc::experiment::{
    append_metrics, format_table, grid, load_model, run_grid, save_model, ExperimentId, ExperimentSpec, MetricsRecord,
    Overrides, Thresholds, DEFAULTS_VERSION,
};
use orbitvqc::hybrid::evaluate_accuracy;
use orbitvqc::Error;

#[derive(Parser)]
#[command(name = "orbitvqc", version, about = "Hybrid variational classifiers for entanglement orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset file for one row of a table.
    Gen {
        #[command(flatten)]
        row: RowArgs,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on a dataset file; writes a model file and appends metrics.
    Train {
        #[command(flatten)]
        row: RowArgs,
        /// Dataset produced by `gen`.
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        hyper: HyperArgs,
        /// Model output path.
        #[arg(long)]
        out: PathBuf,
        /// Metrics file (CSV, appended).
        #[arg(long, default_value = "results.csv")]
        metrics: PathBuf,
    },
    /// Accuracy of a saved model on a dataset file.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Run every row of a table with the default specs.
    Reproduce {
        /// Table id.
        table: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        hyper: HyperArgs,
        /// Also append the records to this CSV file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the spec grid without running it.
        #[arg(long)]
        dry_run: bool,
        /// Exit with status 3 when a row misses its acceptance threshold.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args)]
struct RowArgs {
    #[arg(long)]
    experiment: String,
    /// Graph class 1..6 (tables 3 to 6).
    #[arg(long)]
    class: Option<usize>,
    /// Named state (table1, table2-3q) or hybrid / quantum-only (fig2).
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct HyperArgs {
    #[arg(long)]
    layers: Option<usize>,
    /// Hidden layer sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
}

impl HyperArgs {
    fn overrides(&self, m: Option<usize>) -> Overrides {
        Overrides { m, layers: self.layers, hidden: self.hidden.clone(), learning_rate: self.lr, epochs: self.epochs }
    }
}

enum Failure {
    Usage(Error),
    Run(Error),
    Check(Vec<String>),
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e)
}

fn run(e: Error) -> Failure {
    Failure::Run(e)
}

fn row_spec(row: &RowArgs, overrides: &Overrides) -> Result<ExperimentSpec, Failure> {
    let experiment: ExperimentId = row.experiment.parse().map_err(usage)?;
    let target = experiment.row(row.class, row.target.as_deref()).map_err(usage)?;
    let mut spec = ExperimentSpec::default_for(experiment, target, row.seed).map_err(usage)?;
    overrides.apply(&mut spec).map_err(usage)?;
    Ok(spec)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { row, m, out } => {
            let spec = row_spec(&row, &Overrides { m, ..Default::default() })?;
            let ds = spec.build_dataset().map_err(run)?;
            save_dataset(&ds, &out).map_err(run)?;
            println!("wrote {} samples ({}) to {}", ds.len(), ds.task(), out.display());
        }
        Command::Train { row, data, hyper, out, metrics } => {
            let ds = load_dataset(&data).map_err(run)?;
            let spec = row_spec(&row, &hyper.overrides(Some(ds.len())))?;
            spec.check_dataset(&ds).map_err(usage)?;
            let outcome = spec.train_on(&ds).map_err(run)?;
            save_model(&outcome.model, &out).map_err(run)?;
            append_metrics(&metrics, std::slice::from_ref(&outcome.record)).map_err(run)?;
            print!("{}", format_table(std::slice::from_ref(&outcome.record)));
        }
        Command::Evaluate { model, data } => {
            let model = load_model(&model).map_err(run)?;
            let ds = load_dataset(&data).map_err(run)?;
            if ds.n_qubits() != model.cfg.n_qubits {
                return Err(usage(Error::DimensionMismatch { expected: model.cfg.n_qubits, got: ds.n_qubits() }));
            }
            println!("accuracy {:.4} on {} samples", evaluate_accuracy(&model, &ds).map_err(run)?, ds.len());
        }
        Command::Reproduce { table, seed, m, hyper, out, dry_run, check } => {
            let experiment: ExperimentId = table.parse().map_err(usage)?;
            let specs = grid(experiment, seed, &hyper.overrides(m)).map_err(usage)?;
            if dry_run {
                println!("# defaults v{DEFAULTS_VERSION}");
                for s in &specs {
                    println!("{}", s.describe());
                }
                return Ok(());
            }
            let records = run_grid(&specs).map_err(run)?;
            print!("{}", format_table(&records));
            println!();
            println!("{}", MetricsRecord::CSV_HEADER);
            for r in &records {
                println!("{}", r.to_csv());
            }
            if let Some(path) = out {
                append_metrics(&path, &records).map_err(run)?;
            }
            if check {
                let failures = Thresholds::for_experiment(experiment).check(&records);
                if !failures.is_empty() {
                    return Err(Failure::Check(failures));
                }
                println!("check passed");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Check(failures)) => {
            for f in failures {
                eprintln!("threshold: {f}");
            }
            ExitCode::from(3)
        }
    }
}
