//! `manymatch`: generate, solve, verify, render and benchmark edge-cover instances.

mod bench;
mod io;
mod render;
mod solve;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use manymatch_core::gen::random_instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::io::{emit, read_instance, read_json, to_json, InstanceFile, ResultRecord};
use crate::solve::{Mode, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments or unreadable input; exit code 2.
    #[error("{0}")]
    Input(String),
    /// A check failed; exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl From<manymatch_core::Error> for CliError {
    fn from(e: manymatch_core::Error) -> Self {
        use manymatch_core::Error as E;
        match e {
            E::InvalidInstance(_) | E::InvalidInput(_) | E::TooLarge { .. } => CliError::Input(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "manymatch", version, about = "Minimum-cost red/blue edge covers on the integer grid")]
struct Cli {
    /// More log output (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random instance: distinct uniform grid points, fair-coin colors.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance file and print a result record.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Additive error bound for approx mode.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Bits of precision in the reported cost.
        #[arg(long, default_value_t = 212)]
        precision: u32,
        /// Final scaling exponent override.
        #[arg(long, allow_hyphen_values = true)]
        theta_exp: Option<i64>,
        /// Echoed into the record.
        #[arg(long)]
        seed: Option<u64>,
        /// Verify 1-feasibility after each scaling phase.
        #[arg(long)]
        check_phases: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a result record against its instance.
    Verify {
        instance: PathBuf,
        result: PathBuf,
    },
    /// SVG figure of an instance and optionally a result.
    Render {
        instance: PathBuf,
        #[arg(long)]
        result: Option<PathBuf>,
        /// Overlay the eligible-segment decomposition.
        #[arg(long)]
        decomposition: bool,
        /// Mark the top-level planar separator of the skeleton.
        #[arg(long)]
        separator: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Median timings over a grid of sizes.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1000, 10000])]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1024i64])]
        deltas: Vec<i64>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Mode::Exact])]
        modes: Vec<Mode>,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-run budget in seconds.
        #[arg(long, default_value_t = 600.0)]
        budget: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Markdown,
    Json,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { n, delta, seed, out } => {
            let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), n, delta)?;
            emit(out.as_ref(), &to_json(&InstanceFile::from_instance(&inst)))
        }
        Command::Solve { instance, mode, eps, precision, theta_exp, seed, check_phases, out } => {
            if precision == 0 {
                return Err(CliError::Input("precision must be positive".into()));
            }
            let inst = read_instance(&instance)?;
            let cfg = RunConfig {
                mode,
                seed,
                precision,
                theta_exp,
                eps,
                check_phases: check_phases || manymatch_core::debug::enabled(),
            };
            let rec = solve::run(&inst, &cfg)?;
            log::info!("{} cost {} in {:.3}s", mode.name(), rec.cost, rec.timings.total);
            emit(out.as_ref(), &to_json(&rec))
        }
        Command::Verify { instance, result } => {
            let inst = read_instance(&instance)?;
            let rec: ResultRecord = read_json(&result)?;
            let rep = verify::verify(&inst, &rec);
            for line in &rep.lines {
                println!("{line}");
            }
            if rep.passed() {
                println!("PASS");
                Ok(())
            } else {
                Err(CliError::Failure(format!("{} check(s) failed", rep.failures)))
            }
        }
        Command::Render { instance, result, decomposition, separator, out } => {
            let inst = read_instance(&instance)?;
            let rec: Option<ResultRecord> = result.as_deref().map(read_json).transpose()?;
            let svg = render::render(&inst, rec.as_ref(), render::Layers { decomposition, separator })?;
            emit(out.as_ref(), &svg)
        }
        Command::Bench { sizes, deltas, modes, seeds, seed, budget, eps, format, out } => {
            if seeds == 0 || !budget.is_finite() || budget <= 0.0 {
                return Err(CliError::Input("need at least one seed and a positive budget".into()));
            }
            let rows = bench::bench(&bench::BenchConfig { sizes, deltas, modes, seeds, base_seed: seed, budget, eps })?;
            let text = match format {
                Format::Markdown => bench::markdown(&rows),
                Format::Json => to_json(&rows),
            };
            emit(out.as_ref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Failure(_) => ExitCode::from(1),
                CliError::Input(_) => ExitCode::from(2),
            }
        }
    }
}
