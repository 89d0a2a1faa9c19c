//! `mkclab`: command-line front end for the correlation, valuation and
//! rational-direction tools and the seeded experiment harness.
//!
//! JSON goes to stdout unless `--format csv` is given. Exit codes: 0 on
//! success, 2 for invalid input, 1 when an internal check fails.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mkclab_core::harness::{self, ExperimentConfig, ModelKind};
use mkclab_core::{ghz, hvm, mkc, DetectorTriplet, Error};

#[derive(Parser)]
#[command(
    name = "mkclab",
    version,
    about = "GHZ correlations, valuations and dense-set models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Quantum,
    ProductHv,
    CorrelatedHv,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Quantum => ModelKind::Quantum,
            ModelArg::ProductHv => ModelKind::ProductHv,
            ModelArg::CorrelatedHv => ModelKind::CorrelatedHv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Three-detector correlation by matrix product and by closed form.
    Correlations {
        /// "t1,p1;t2,p2;t3,p3" in radians.
        #[arg(long, allow_hyphen_values = true)]
        triplet: String,
    },
    /// Worst deviation over misaligned sextets for a grid of misalignments.
    EpsilonSweep {
        #[arg(long)]
        delta_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Valuations of the six near-x/near-y observables.
    Hvm {
        #[command(subcommand)]
        command: HvmCommand,
    },
    /// Rational directions.
    Mkc {
        #[command(subcommand)]
        command: MkcCommand,
    },
    /// Rational-alignment contradiction chain.
    Section2 {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 100)]
        bound: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Commuting non-local observables chain.
    Section3 {
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo rounds under one model family.
    Simulate {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        rounds: u64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest denominator for rational alignments.
        #[arg(long, default_value_t = harness::DEFAULT_DENOMINATOR_BOUND)]
        bound: i64,
        /// Write every round as newline-delimited JSON.
        #[arg(long)]
        records: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HvmCommand {
    /// Exhaustive parity check over all 64 valuations.
    Parity,
    /// Exact max-min value and witness distribution.
    Maxmin,
}

#[derive(Subcommand)]
enum MkcCommand {
    /// All rational unit vectors with denominator up to `bound`.
    Rationals {
        #[arg(long)]
        bound: i64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

enum Failure {
    Core(Error),
    Io(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct CorrelationOutput {
    matrix_value: f64,
    closed_form_value: f64,
}

#[derive(Serialize)]
struct RationalsOutput {
    bound: i64,
    count: usize,
    directions: Vec<mkc::RationalDirection>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Correlations { triplet } => {
            let t: DetectorTriplet = triplet.parse()?;
            print_json(&CorrelationOutput {
                matrix_value: ghz::correlation(&t),
                closed_form_value: ghz::correlation_closed_form(&t),
            })
        }
        Command::EpsilonSweep {
            delta_max,
            steps,
            seed,
            format,
        } => {
            let points = ghz::epsilon_sweep(delta_max, steps, seed)?;
            match format {
                Format::Json => print_json(&points),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(io::stdout());
                    for p in &points {
                        w.serialize(p)?;
                    }
                    w.flush()?;
                    Ok(())
                }
            }
        }
        Command::Hvm { command } => match command {
            HvmCommand::Parity => {
                let report = hvm::parity_exhaustive();
                if !report.identity_holds() {
                    return Err(Failure::Internal("parity identity failed".into()));
                }
                print_json(&report)
            }
            HvmCommand::Maxmin => print_json(hvm::max_min_solution()),
        },
        Command::Mkc {
            command: MkcCommand::Rationals { bound, format },
        } => {
            let directions = mkc::rational_directions(bound)?;
            if let Some(bad) = directions.iter().find(|d| !d.identity_holds()) {
                return Err(Failure::Internal(format!("{bad} is not a unit vector")));
            }
            match format {
                Format::Json => print_json(&RationalsOutput {
                    bound,
                    count: directions.len(),
                    directions,
                }),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(io::stdout());
                    w.write_record(["x", "y", "z"])?;
                    for d in &directions {
                        let q = d.denominator();
                        w.write_record(d.numerators().map(|p| format!("{p}/{q}")))?;
                    }
                    w.flush()?;
                    Ok(())
                }
            }
        }
        Command::Section2 { delta, bound, seed } => {
            print_json(&harness::pipeline_section2(delta, bound, seed)?)
        }
        Command::Section3 { eta, seed } => print_json(&harness::pipeline_section3(eta, seed)?),
        Command::Simulate {
            model,
            rounds,
            delta,
            seed,
            bound,
            records,
        } => {
            let mut cfg = ExperimentConfig::new(model.into(), rounds, delta, seed);
            cfg.denominator_bound = bound;
            let (summary, rows) = harness::run_experiment(&cfg)?;
            if let Some(bad) = rows
                .iter()
                .find(|r| r.product != r.outcomes.iter().product::<i8>())
            {
                return Err(Failure::Internal(format!(
                    "round {} has an inconsistent product",
                    bad.round
                )));
            }
            if let Some(path) = records {
                let mut w = BufWriter::new(File::create(&path)?);
                for r in &rows {
                    serde_json::to_writer(&mut w, r)?;
                    w.write_all(b"\n")?;
                }
                w.flush()?;
            }
            print_json(&summary)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal check failed: {msg}");
            ExitCode::from(1)
        }
    }
}
