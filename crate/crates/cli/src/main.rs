mod commands;
mod outcome;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use outcome::{CommandOutcome, Status};

/// Exact LP certificates, Chernoff rates and a dense oracle for discriminating
/// the extremal Werner states.
#[derive(Debug, Parser)]
#[command(name = "werner-lp", version)]
struct Cli {
    /// Compact single-line JSON.
    #[arg(long, global = true)]
    compact: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct InstanceArgs {
    /// Local dimension, at least 2.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub d: u32,
    /// Number of copies, at least 1.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Prior of the symmetric state, as "num/den" or a decimal.
    #[arg(long)]
    pub p: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the integer constraint matrix Q.
    Qmatrix {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        d: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Closed-form optimal error probability.
    Perr(InstanceArgs),
    /// Build the primal point and dual certificate and check the gap is zero.
    Certify {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Zero out the last entry of u* to exercise the failure path.
        #[arg(long, hide = true)]
        corrupt_certificate: bool,
    },
    /// Solve the primal program with the exact simplex method.
    LpSolve(InstanceArgs),
    /// Chernoff distances.
    Chernoff {
        /// Werner dimension for the closed form.
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..), conflicts_with = "dist_file")]
        d: Option<u32>,
        /// Two JSON probability vectors (numbers or "num/den" strings).
        #[arg(long = "dist-file", num_args = 1, action = clap::ArgAction::Append)]
        dist_file: Vec<PathBuf>,
        /// Also emit the finite-n rate sequence up to this n (requires --d).
        #[arg(long, requires = "d")]
        rates: Option<u32>,
        /// Prior used for the rate sequence.
        #[arg(long, default_value = "1/2")]
        p: String,
    },
    /// Monte Carlo run of the one-way protocol.
    Simulate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = werner_lp::protocol::DEFAULT_CHUNK_SIZE)]
        chunk_size: u64,
    },
    /// Separable-ball measurement versus the Helstrom optimum.
    BiasBound {
        /// Two density-matrix JSON files.
        #[arg(long = "state-file", num_args = 1, action = clap::ArgAction::Append, conflicts_with = "random")]
        state_file: Vec<PathBuf>,
        #[arg(long, default_value = "1/2")]
        p: String,
        /// Sample random state pairs instead of reading files.
        #[arg(long, requires = "dim")]
        random: bool,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the dense matrices with the exact combinatorics.
    OracleVerify {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        d: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Qmatrix { d, n, format } => match format {
            Format::Csv => return commands::qmatrix_csv(*d, *n),
            Format::Json => commands::qmatrix(*d, *n),
        },
        Command::Perr(a) => commands::perr(a),
        Command::Certify {
            inst,
            corrupt_certificate,
        } => commands::certify(inst, *corrupt_certificate),
        Command::LpSolve(a) => commands::lp_solve(a),
        Command::Chernoff { d, dist_file, rates, p } => commands::chernoff(*d, dist_file, *rates, p),
        Command::Simulate {
            inst,
            trials,
            seed,
            chunk_size,
        } => commands::simulate(inst, *trials, *seed, *chunk_size),
        Command::BiasBound {
            state_file,
            p,
            random,
            dim,
            samples,
            seed,
        } => {
            if *random {
                commands::bias_bound_random(dim.unwrap_or(0), *samples, *seed, p)
            } else {
                commands::bias_bound_files(state_file, p)
            }
        }
        Command::OracleVerify { d, n } => commands::oracle_verify(*d, *n),
    };
    emit(&out, cli.compact)
}

fn emit(out: &CommandOutcome, compact: bool) -> ExitCode {
    let text = if compact {
        serde_json::to_string(out)
    } else {
        serde_json::to_string_pretty(out)
    };
    match text {
        Ok(t) => {
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{t}");
        }
        Err(e) => {
            eprintln!("error: cannot serialize output: {e}");
            return ExitCode::from(2);
        }
    }
    eprintln!("{}", out.summary);
    match out.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::CheckFailed => ExitCode::from(1),
        Status::Error => ExitCode::from(2),
    }
}
