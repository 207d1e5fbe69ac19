//! `chanbound`: lower bounds on channel discrimination errors from the
//! command line.

mod bound;
mod figures;
mod output;
mod spec_file;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bound::{BoundArgs, TheoremArg};
use figures::{CpfArgs, CpfMode, GroverArgs, TwoAdcNArgs, TwoAdcR0Args};
use verify::{Suite, VerifyArgs};

/// Errors split by exit code: bad input exits with 2, everything else with 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Runtime(String),
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) | CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
            CliError::Failed(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<chanbound::Error> for CliError {
    fn from(e: chanbound::Error) -> Self {
        match e {
            chanbound::Error::Solver(_) => CliError::Runtime(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "chanbound", version, about = "Certified lower bounds on quantum channel discrimination errors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance: α search tolerance for optimized bounds, gap tolerance for
    /// `grover`, comparison tolerance for `verify`.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Two damping channels, sweeping r0 with r1 = r0 + delta at fixed n.
    FigTwoAdcR0 {
        #[arg(long, default_value_t = 0.01)]
        r0_start: f64,
        #[arg(long, default_value_t = 0.85)]
        r0_end: f64,
        #[arg(long, default_value_t = 0.01)]
        r0_step: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 90)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p0: f64,
        /// Search every k at every point instead of starting at the previous optimum.
        #[arg(long)]
        full_k: bool,
    },
    /// Two damping channels, sweeping the number of queries.
    FigTwoAdcN {
        #[arg(long, default_value_t = 1)]
        n_start: usize,
        #[arg(long, default_value_t = 90)]
        n_end: usize,
        #[arg(long, default_value_t = 0.10)]
        r0: f64,
        #[arg(long, default_value_t = 0.11)]
        r1: f64,
        #[arg(long, default_value_t = 0.5)]
        p0: f64,
        #[arg(long)]
        full_k: bool,
    },
    /// Channel position finding over damping channels.
    FigCpf {
        #[arg(long, value_enum)]
        mode: CpfMode,
        #[arg(long, default_value_t = 3)]
        ell: usize,
        /// Queries in sweep_r0 mode.
        #[arg(long, default_value_t = 15)]
        n: usize,
        #[arg(long, default_value_t = 0.01)]
        r0_start: f64,
        #[arg(long, default_value_t = 0.85)]
        r0_end: f64,
        #[arg(long, default_value_t = 0.01)]
        r0_step: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Rates in sweep_n mode.
        #[arg(long, default_value_t = 0.10)]
        r0: f64,
        #[arg(long, default_value_t = 0.11)]
        r1: f64,
        #[arg(long, default_value_t = 0)]
        n_start: usize,
        #[arg(long, default_value_t = 90)]
        n_end: usize,
        #[arg(long)]
        full_k: bool,
    },
    /// Search lower bound against the success probability of the search algorithm.
    Grover {
        /// Number of items N.
        #[arg(short = 'N', long = "items")]
        items: usize,
        /// Number of marked items k.
        #[arg(short = 'k', long)]
        marked: usize,
        #[arg(long, default_value_t = 0)]
        n_start: usize,
        /// Last query count (defaults to the end of the optimal region).
        #[arg(long)]
        n_end: Option<usize>,
    },
    /// Evaluate one bound on a problem file and print it as JSON.
    Bound {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        #[arg(long)]
        n: usize,
        /// Split point for t2/t4 (optimized when omitted).
        #[arg(long)]
        k: Option<usize>,
        /// Free weight for t2/t4 (optimized when omitted).
        #[arg(long)]
        alpha0: Option<f64>,
    },
    /// Cross-check solver values against brute-force search and closed forms.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Random instances per suite.
        #[arg(long)]
        instances: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Input("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Input(format!("--tol {t} must be a non-negative number")));
        }
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::FigTwoAdcR0 { r0_start, r0_end, r0_step, delta, n, p0, full_k } => figures::fig_two_adc_r0(
            &TwoAdcR0Args { r0_start, r0_end, r0_step, delta, n, p0, full_k },
            cli.tol,
            out,
        ),
        Command::FigTwoAdcN { n_start, n_end, r0, r1, p0, full_k } => {
            figures::fig_two_adc_n(&TwoAdcNArgs { n_start, n_end, r0, r1, p0, full_k }, cli.tol, out)
        }
        Command::FigCpf {
            mode,
            ell,
            n,
            r0_start,
            r0_end,
            r0_step,
            delta,
            r0,
            r1,
            n_start,
            n_end,
            full_k,
        } => figures::fig_cpf(
            &CpfArgs { mode, ell, n, r0_start, r0_end, r0_step, delta, r0, r1, n_start, n_end, full_k },
            cli.tol,
            out,
        ),
        Command::Grover { items, marked, n_start, n_end } => {
            figures::grover(&GroverArgs { items, marked, n_start, n_end }, cli.tol, out)
        }
        Command::Bound { spec, theorem, n, k, alpha0 } => {
            bound::bound(&BoundArgs { spec, theorem, n, k, alpha0 }, cli.tol, out)
        }
        Command::Verify { suite, instances } => verify::verify(&VerifyArgs { suite, instances }, cli.seed, cli.tol, out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
