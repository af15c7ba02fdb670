//! `sbd`: compress qubit Hamiltonians, solve for ground-state energies and run
//! the ranking and timing experiments.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sbd_core::bench::{Eigensolver, RunSettings};
use sbd_core::hammat::DEFAULT_QUBIT_CAP;
use sbd_core::sbd::BranchPolicy;
use sbd_core::SbdError;

#[derive(Debug, Parser)]
#[command(name = "sbd", version, about = "Block-diagonal compression and eigensolvers for qubit Hamiltonians")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Seed for Krylov start vectors and VQE initial angles.
    #[arg(long, global = true, env = "SBD_SEED", default_value_t = 0)]
    seed: u64,
    /// Krylov convergence tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Worker threads for parallel sections (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Literal pipeline: all-lower branch path and no square-root fallback.
    #[arg(long, global = true)]
    strict_paper_mode: bool,
    /// Sign of the targeted eigenvalue (-1 ground state, +1 top of the spectrum).
    #[arg(long, global = true, default_value_t = -1, allow_hyphen_values = true,
          value_parser = clap::value_parser!(i8).range(-1..=1))]
    sign: i8,
    /// Largest accepted qubit count for raw inputs.
    #[arg(long, global = true, default_value_t = DEFAULT_QUBIT_CAP)]
    qubit_cap: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Branch {
    Lower,
    Magnitude,
    BestOfBoth,
}

impl From<Branch> for BranchPolicy {
    fn from(b: Branch) -> Self {
        match b {
            Branch::Lower => BranchPolicy::Lower,
            Branch::Magnitude => BranchPolicy::Magnitude,
            Branch::BestOfBoth => BranchPolicy::BestOfBoth,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Dense,
    Krylov,
    Vqe,
}

impl From<Method> for Eigensolver {
    fn from(m: Method) -> Self {
        match m {
            Method::Dense => Eigensolver::Dense,
            Method::Krylov => Eigensolver::Krylov,
            Method::Vqe => Eigensolver::Vqe,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Model {
    Tfim,
    Randherm,
    Commuting,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a Pauli-term JSON or Matrix Market input into an sbd-v1 artifact.
    Compress {
        input: PathBuf,
        #[arg(long, required_unless_present = "target_percent", conflicts_with = "target_percent")]
        depth: Option<usize>,
        /// Smallest depth reaching this compression percentage.
        #[arg(long)]
        target_percent: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Explicit branch per level, outermost first, e.g. `0110`.
        #[arg(long)]
        path: Option<String>,
        #[arg(long, value_enum)]
        branch: Option<Branch>,
    },
    /// Extreme eigenvalue of a raw input or a compressed artifact.
    Eig {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "krylov")]
        method: Method,
        /// Compress a raw input this many times before solving.
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[arg(long, value_enum)]
        branch: Option<Branch>,
    },
    /// Run a model manifest and compare energy orderings.
    Rank {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `dense` (uncompressed dense), `vqe` (uncompressed VQE) or a model name.
        #[arg(long, default_value = "dense")]
        reference: String,
    },
    /// Time every model in a manifest and fit speed against depth.
    Bench {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Model whose median time normalizes the speeds.
        #[arg(long, default_value = "vqe-d0")]
        reference: String,
    },
    /// Write a synthetic input file.
    Gen {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        out: PathBuf,
        /// Qubit count (tfim).
        #[arg(long, default_value_t = 4)]
        qubits: usize,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        coupling: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        field: f64,
        /// Matrix dimension (randherm, commuting).
        #[arg(long, default_value_t = 16)]
        dim: usize,
    },
    /// Matrix square-root diagnostics on the input's leading split.
    SqrtCheck {
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        iterations: usize,
    },
}

/// Failure carrying its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn pipeline(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<SbdError> for Failure {
    fn from(e: SbdError) -> Self {
        let code = match &e {
            SbdError::IncompleteGrid(_) => 4,
            e if e.is_input_error() => 2,
            SbdError::Csv(_) | SbdError::NotHermitian(_) | SbdError::CapExceeded { .. } => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn settings(g: &GlobalArgs, branch: Option<Branch>) -> RunSettings {
    let mut s = RunSettings::with_seed(g.seed);
    if g.strict_paper_mode {
        s = s.strict();
    }
    if let Some(b) = branch {
        s.sbd.branch = b.into();
    }
    s.krylov.tol = g.tol;
    s.sign = if g.sign == 0 { -1 } else { g.sign };
    s.qubit_cap = g.qubit_cap;
    s
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if cli.global.sign == 0 {
        eprintln!("error: --sign must be -1 or 1");
        return ExitCode::from(2);
    }
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    let branch = match &cli.command {
        Command::Compress { branch, .. } | Command::Eig { branch, .. } => *branch,
        _ => None,
    };
    let s = settings(&cli.global, branch);
    log::info!(
        "config: seed={} tol={:e} threads={} strict_paper_mode={} settings={}",
        cli.global.seed,
        cli.global.tol,
        cli.global.threads,
        cli.global.strict_paper_mode,
        serde_json::to_string(&s).unwrap_or_default()
    );

    let result = match cli.command {
        Command::Compress {
            input,
            depth,
            target_percent,
            out,
            path,
            ..
        } => commands::compress(&input, depth, target_percent, &out, path.as_deref(), &s),
        Command::Eig {
            input, method, depth, ..
        } => commands::eig(&input, method.into(), depth, &s),
        Command::Rank {
            manifest,
            out,
            reference,
        } => commands::rank(&manifest, &out, &reference, &s),
        Command::Bench {
            manifest,
            out,
            reference,
        } => commands::bench(&manifest, &out, &reference, &s),
        Command::Gen {
            model,
            out,
            qubits,
            coupling,
            field,
            dim,
        } => commands::gen(model, &out, qubits, coupling, field, dim, cli.global.seed),
        Command::SqrtCheck { input, iterations } => commands::sqrt_check(&input, iterations, &s),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
