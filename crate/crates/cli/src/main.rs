//! `calogero`: sample states, compute spectral coordinates, run the
//! verification suites, evolve and scatter states.
//!
//! Exit codes: 0 when every check passes, 1 for a failed check or a
//! dynamics/spectral failure, 2 for usage and input errors.

mod commands;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use calogero::Coupling;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "calogero",
    version,
    about = "Spectral coordinates for the rational Calogero-Moser system"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed of the single random generator used by every command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of particles for generated states.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,
    /// Coupling of generated states: real or imaginary.
    #[arg(long, global = true, default_value = "imaginary")]
    pub coupling: Coupling,
    /// Relative finite-difference step.
    #[arg(long, global = true)]
    pub tol_fd: Option<f64>,
    /// Pass/fail tolerance of the checks (each command has its own default).
    #[arg(long, global = true)]
    pub tol_check: Option<f64>,
    /// Local error tolerance of the integrator.
    #[arg(long, global = true)]
    pub tol_ode: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; csv only applies to `evolve`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Commutation,
    Canonicity,
    Bracket1,
    Table,
    Lenard,
    Superintegrability,
    Euler,
    DeltaGenerator,
    Lift,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Rk,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a random state.
    Generate,
    /// Spectral coordinates of a state, by both routes.
    Coords {
        /// State JSON file, `-` for stdin.
        state: PathBuf,
    },
    /// Run verification suites on a state or on random states.
    Verify {
        /// State JSON file; random states are drawn when omitted.
        state: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Number of random states.
        #[arg(long)]
        random: Option<usize>,
        /// Probe point for the delta-generator suite (default: outside the spectrum).
        #[arg(long)]
        lambda_probe: Option<f64>,
        /// Include every relation in the report, not only the worst case.
        #[arg(long)]
        full: bool,
    },
    /// Evolve a state and write the trajectory.
    Evolve {
        state: PathBuf,
        #[arg(long)]
        t_end: f64,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        /// Number of output samples including t = 0.
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Asymptotic momenta and intercepts of a state.
    Scatter {
        state: PathBuf,
        #[arg(long, default_value_t = 1000.0)]
        t_max: f64,
    },
    /// Test E - G = 1/2 Delta'' on random states.
    Conjecture {
        /// Inclusive range `a..b` of particle numbers.
        #[arg(long, default_value = "1..8")]
        n_range: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Jacobi, hierarchy and Nijenhuis checks of the lifted pencil.
    LiftVerify {
        /// Lifted point JSON; a random point of size `--n` when omitted.
        point: Option<PathBuf>,
        #[arg(long)]
        full: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let outcome = commands::validate(&g).and_then(|_| match cli.command {
        Command::Generate => commands::generate(&g),
        Command::Coords { state } => commands::coords(&g, &state),
        Command::Verify {
            state,
            suite,
            random,
            lambda_probe,
            full,
        } => commands::verify(&g, state.as_deref(), suite, random, lambda_probe, full),
        Command::Evolve {
            state,
            t_end,
            method,
            samples,
        } => commands::evolve(&g, &state, t_end, method, samples),
        Command::Scatter { state, t_max } => commands::scatter(&g, &state, t_max),
        Command::Conjecture { n_range, trials } => commands::conjecture(&g, &n_range, trials),
        Command::LiftVerify { point, full } => commands::lift_verify(&g, point.as_deref(), full),
    });
    match outcome {
        Ok(commands::Status::Pass) => ExitCode::SUCCESS,
        Ok(commands::Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
