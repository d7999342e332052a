// SPDX-License-Identifier: MIT OR Apache-2.0
//! `ramicon`: exact computations with generic ramified irregular connections.

mod commands;
mod document;
mod failure;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::failure::{CliError, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "ramicon", version, about = "Exact computations with generic ramified irregular connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a document and the invariants of its kind.
    Validate {
        /// Document to check.
        file: PathBuf,
    },
    /// Reduce a connection to the normal form of an exponent.
    Normalize {
        /// Exponent document.
        #[arg(long)]
        nu: PathBuf,
        /// Connection document.
        #[arg(long)]
        conn: PathBuf,
        /// Reduce modulo z^ORDER; must be at least the pole order.
        #[arg(long)]
        order: i64,
        /// Directory receiving connection.json and gauge.json.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Shear a connection to a diagonal one on the ramified cover.
    Shear {
        /// Exponent document.
        #[arg(long)]
        nu: PathBuf,
        /// Connection document; the normal matrix of the exponent when absent.
        #[arg(long)]
        conn: Option<PathBuf>,
        /// Working precision for the normal matrix.
        #[arg(long)]
        prec: Option<i64>,
        /// Output file.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Compute the horizontal lift along a deformation direction.
    Lift {
        /// Exponent document.
        #[arg(long)]
        nu: PathBuf,
        /// Direction document.
        #[arg(long)]
        dir: PathBuf,
        /// Connection document; the normal matrix of the exponent when absent.
        #[arg(long)]
        conn: Option<PathBuf>,
        /// Working precision.
        #[arg(long)]
        prec: Option<i64>,
        /// Output file.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Print FLAT iff the curvature of a lift vanishes exactly.
    Curvature {
        /// Lift document.
        file: PathBuf,
    },
    /// Check the kernel/cokernel pairing at the standard factorized structure.
    Pair {
        /// Ramification index.
        #[arg(long)]
        r: usize,
        /// Pole order.
        #[arg(long)]
        m: usize,
        /// Exponent document; the simplest admissible exponent when absent.
        #[arg(long)]
        nu: Option<PathBuf>,
        /// Print a one-line verdict instead of the report document.
        #[arg(long)]
        check_perfect: bool,
    },
    /// Print the dimension of the moduli space.
    Dims {
        /// Genus of the curve.
        #[arg(long)]
        g: i64,
        /// Rank of the bundle.
        #[arg(long)]
        r: usize,
        /// Pole order of a ramified point; repeat for several points.
        #[arg(long)]
        ram: Vec<usize>,
        /// Pole order of an unramified point; repeat for several points.
        #[arg(long)]
        un: Vec<usize>,
        /// Number of logarithmic points.
        #[arg(long, default_value_t = 0)]
        log: usize,
    },
    /// Unfold an exponent and report the residue spectra.
    Unfold {
        /// Exponent document.
        #[arg(long)]
        nu: PathBuf,
        /// Unfolding parameter, a rational such as 1/3.
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        /// Ratios q_1 … q_{m-1}, one per occurrence.
        #[arg(long, allow_hyphen_values = true)]
        q: Vec<String>,
        /// Output file.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Build the factorized structure of a connection and check its axioms.
    RamstructVerify {
        /// Exponent document.
        #[arg(long)]
        nu: PathBuf,
        /// Connection document; the normal matrix of the exponent when absent.
        #[arg(long)]
        conn: Option<PathBuf>,
        /// Working precision for the normal matrix.
        #[arg(long)]
        prec: Option<i64>,
    },
    /// Write a seeded random exponent, direction or connection document.
    Sample {
        /// What to generate.
        #[arg(long, value_enum)]
        kind: commands::SampleKind,
        /// Ramification index.
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Pole order.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Seed for the random generator.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exponent document whose normal matrix is scrambled (connections only).
        #[arg(long)]
        nu: Option<PathBuf>,
        /// Precision of a generated connection.
        #[arg(long)]
        prec: Option<i64>,
    },
    /// Run seeded randomized checks of the main identities.
    Selftest {
        /// Seed for the random generator.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random instances.
        #[arg(long, default_value_t = 3)]
        rounds: usize,
    },
}

fn run(command: Command) -> Result<String, CliError> {
    use commands::*;
    match command {
        Command::Validate { file } => validate(&file),
        Command::Normalize { nu, conn, order, out } => normalize_cmd(&nu, &conn, order, out.as_deref()),
        Command::Shear { nu, conn, prec, out } => shear_cmd(&nu, conn.as_deref(), prec, out.as_deref()),
        Command::Lift { nu, dir, conn, prec, out } => lift_cmd(&nu, &dir, conn.as_deref(), prec, out.as_deref()),
        Command::Curvature { file } => curvature_cmd(&file),
        Command::Pair { r, m, nu, check_perfect } => pair_cmd(r, m, nu.as_deref(), check_perfect),
        Command::Dims { g, r, ram, un, log } => dims_cmd(g, r, &ram, &un, log),
        Command::Unfold { nu, h, q, out } => unfold_cmd(&nu, &h, &q, out.as_deref()),
        Command::RamstructVerify { nu, conn, prec } => ramstruct_verify_cmd(&nu, conn.as_deref(), prec),
        Command::Sample { kind, r, m, seed, nu, prec } => sample_cmd(kind, r, m, seed, nu.as_deref(), prec),
        Command::Selftest { seed, rounds } => selftest_cmd(seed, rounds),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::from(EXIT_OK)
        }
        Err(CliError::CheckFailed(text)) => {
            println!("{text}");
            ExitCode::from(failure::EXIT_STRUCTURE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
