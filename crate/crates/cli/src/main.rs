//! Command-line front end for the light-cone XEB spoofer.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration or file
//! error, 3 resource cap exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xebspoof::bounds::{BoundInputs, BoundsReport};
use xebspoof::experiment::{self, Architecture, ExperimentConfig, Format, Render};
use xebspoof::seed::task_rng;
use xebspoof::statevector::{simulate_with, SimOptions, DEFAULT_MAX_QUBITS};
use xebspoof::{spoofer, Circuit, Skeleton, Unitary2Q, XebError};

#[derive(Parser)]
#[command(
    name = "xebspoof",
    version,
    about = "Light-cone XEB spoofing for shallow random circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a skeleton or a Haar-random circuit as JSON.
    Gen(GenArgs),
    /// Spoofing campaign: closed-form and empirical XEB per circuit.
    Spoof(SpoofArgs),
    /// Monte Carlo check of E[q0^2 + q1^2] against the exact Pauli chain.
    ValidateSingle(RunArgs),
    /// Scaled collision probability 2^n CP over random circuits.
    Collision(CollisionArgs),
    /// Closed-form bounds for one parameter set.
    Bounds(BoundsArgs),
    /// Per-layer Pauli-chain mass for one output.
    PauliExact(PauliArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ArchArg {
    #[value(name = "1d")]
    OneD,
    #[value(name = "2d")]
    TwoD,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct ArchArgs {
    #[arg(long, value_enum, default_value = "1d")]
    arch: ArchArg,
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    cols: usize,
    /// Skeleton JSON for --arch custom.
    #[arg(long)]
    skeleton: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    arch: ArchArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_QUBITS)]
    max_qubits: usize,
    /// Use identity gates instead of Haar-random ones.
    #[arg(long)]
    identity: bool,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    arch: ArchArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit only the wiring, without gates.
    #[arg(long)]
    skeleton_only: bool,
    #[arg(long)]
    identity: bool,
    /// Emit the output distribution q_C as `bitstring,probability` CSV instead.
    #[arg(long)]
    distribution: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_QUBITS)]
    max_qubits: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpoofArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Spoof a fixed circuit file instead: prints its plan and `--samples` bitstrings.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

#[derive(Args)]
struct CollisionArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated depths; defaults to ceil(log n / log 1.25).
    #[arg(long, value_delimiter = ',')]
    depths: Vec<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: usize,
    /// Light-cone size; defaults to min(n, 2d) for 1D brickwork.
    #[arg(long)]
    light_cone: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Collision probability of the ideal output; defaults to 2^-n.
    #[arg(long)]
    cp: Option<f64>,
    /// Variance to feed the Chebyshev sample count instead of 2^(m+n) CP.
    #[arg(long)]
    var: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PauliArgs {
    #[command(flatten)]
    arch: ArchArgs,
    /// 1-based output qubit.
    #[arg(long, default_value_t = 1)]
    output: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> XebError {
    XebError::InvalidArgument(msg.into())
}

impl ArchArgs {
    fn base_config(&self) -> Result<ExperimentConfig, XebError> {
        let arch = match self.arch {
            ArchArg::OneD => Architecture::OneD,
            ArchArg::TwoD => Architecture::TwoD,
            ArchArg::Custom => Architecture::Custom,
        };
        let skeleton = match (&self.arch, &self.skeleton) {
            (ArchArg::Custom, Some(p)) => Some(Skeleton::from_json(&fs::read_to_string(p)?)?),
            (ArchArg::Custom, None) => return Err(config_err("--arch custom needs --skeleton")),
            (_, Some(_)) => return Err(config_err("--skeleton is only valid with --arch custom")),
            _ => None,
        };
        let (n, d) = match &skeleton {
            Some(s) => (s.n(), s.depth()),
            None if matches!(self.arch, ArchArg::TwoD) => (self.rows * self.cols, self.d),
            None => (self.n, self.d),
        };
        Ok(ExperimentConfig {
            arch,
            n,
            d,
            rows: self.rows,
            cols: self.cols,
            skeleton,
            ..Default::default()
        })
    }
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig, XebError> {
        Ok(ExperimentConfig {
            trials: self.trials,
            seed: self.seed,
            identity_gates: self.identity,
            max_qubits: self.max_qubits,
            ..self.arch.base_config()?
        })
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), XebError> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), XebError> {
    match cli.command {
        Command::Gen(a) => {
            let cfg = a.arch.base_config()?;
            let s = cfg.skeleton()?;
            if a.skeleton_only {
                return emit(&a.out, &(s.to_json() + "\n"));
            }
            let c = if a.identity {
                Circuit::uniform(s, Unitary2Q::identity())
            } else {
                Circuit::haar(s, &mut task_rng(a.seed, 0))
            };
            if a.distribution {
                let psi = simulate_with(
                    &c,
                    SimOptions {
                        max_qubits: a.max_qubits,
                    },
                )?;
                return emit(&a.out, &psi.to_distribution().to_csv());
            }
            emit(&a.out, &(c.to_json() + "\n"))
        }
        Command::Spoof(a) => {
            if let Some(path) = &a.circuit {
                let c = Circuit::from_json(&fs::read_to_string(path)?)?;
                let p = spoofer::plan(&c, a.m)?;
                let mut rng = task_rng(a.run.seed, 0);
                let samples: Vec<u64> = (0..a.samples)
                    .map(|_| spoofer::sample(&p, &mut rng))
                    .collect();
                let doc = serde_json::json!({
                    "plan": p.dump(),
                    "closed_form_fidelity": spoofer::closed_form_fidelity(&p),
                    "samples": samples,
                });
                let mut s = serde_json::to_string_pretty(&doc)?;
                s.push('\n');
                return emit(&a.run.out, &s);
            }
            let cfg = ExperimentConfig {
                m: a.m,
                samples: a.samples,
                ..a.run.config()?
            };
            let r = experiment::run_spoof(&cfg, a.run.workers)?;
            emit(&a.run.out, &r.render(a.run.format()))
        }
        Command::ValidateSingle(a) => {
            let r = experiment::run_single_qubit_validation(&a.config()?, a.workers)?;
            emit(&a.out, &r.render(a.format()))
        }
        Command::Collision(a) => {
            let cfg = ExperimentConfig {
                depths: a.depths.clone(),
                ..a.run.config()?
            };
            let r = experiment::run_collision_study(&cfg, a.run.workers)?;
            emit(&a.run.out, &r.render(a.run.format()))
        }
        Command::Bounds(a) => {
            if a.n > 1023 {
                return Err(config_err("n must be at most 1023"));
            }
            let inputs = BoundInputs {
                n: a.n,
                d: a.d,
                light_cone: a.light_cone.unwrap_or_else(|| a.n.min(2 * a.d).max(2)),
                m: a.m,
                epsilon: a.epsilon,
                delta: a.delta,
                cp: a.cp.unwrap_or_else(|| 2f64.powi(-(a.n as i32))),
                var: a.var,
            };
            let mut s = serde_json::to_string_pretty(&BoundsReport::compute(inputs)?)?;
            s.push('\n');
            emit(&a.out, &s)
        }
        Command::PauliExact(a) => {
            let s = a.arch.base_config()?.skeleton()?;
            if a.output == 0 || a.output > s.n() {
                return Err(XebError::IndexOutOfRange {
                    index: a.output,
                    len: s.n(),
                });
            }
            emit(&a.out, &experiment::pauli_exact_csv(&s, a.output - 1)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                XebError::ResourceCap { .. } => 3,
                XebError::Numerical(_) => 1,
                _ => 2,
            })
        }
    }
}
