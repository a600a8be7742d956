//! `gz`: batch front end for gz-core.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gz_core::Family;

#[derive(Parser, Debug)]
#[command(name = "gz", version, about = "Gelfand-Zeitlin systems on so(n) and gl(n)")]
#[command(after_help = "Set GZ_NUM_THREADS to fix the worker pool size. Output is identical for any thread count.\n\
Exit codes: 0 success, 1 suite or numerical failure, 2 invalid configuration, parse or membership error.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Relative SVD cutoff for rank decisions.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_rank: f64,
    /// Relative spectral disjointness cutoff.
    #[arg(long, default_value_t = 1e-7)]
    pub tol_spec: f64,
    /// Relative residual at which the fibre solver stops.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_solve: f64,
    /// Write JSON here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Algebra {
    /// so or gl.
    #[arg(long, default_value = "so")]
    pub family: Family,
    /// Matrix size.
    #[arg(long)]
    pub n: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Describe an algebra chain, or build one of its elements as matrix JSON.
    Build {
        #[command(flatten)]
        alg: Algebra,
        /// zero, random, cartan, regular-nilpotent, nilfibre or witness.
        #[arg(long)]
        element: Option<String>,
        /// Coordinate scale for random elements.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Even levels to make regular nilpotent (witness only), e.g. 4,6.
        #[arg(long, value_delimiter = ',')]
        nilpotent: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate all GZ functions on a matrix.
    Eval {
        /// Matrix JSON file ("-" for stdin).
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Level spectra, g(0) and g_Theta membership, and the component count.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Strong regularity by both criteria, for one matrix or a seeded batch.
    Sreg {
        /// Matrix JSON file; without it a batch of mixed samples is drawn.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Size for batch mode.
        #[arg(long)]
        n: Option<usize>,
        /// Batch size.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Find x with Phi(x) = c.
    Solve {
        #[command(flatten)]
        alg: Algebra,
        /// GZ values JSON {"index", "re", "im"}.
        #[arg(long)]
        target: PathBuf,
        /// Random restarts.
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Gauss-Newton iterations per start.
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Draw points of the fibre through an element of g_Theta.
    FibreSample {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Standard deviation of the centralizer coordinates.
        #[arg(long, default_value_t = 0.5)]
        scale: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the Hamiltonian flow of one GZ function.
    Flow {
        #[arg(long = "in")]
        input: PathBuf,
        /// GZ index i,j.
        #[arg(long, value_delimiter = ',', required = true)]
        index: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Nilfibre constructions and a seeded partial-nilfibre sweep.
    Nilfibre {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Write the report here (same as --out).
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run acceptance suites.
    Suite {
        /// Run every suite.
        #[arg(long, conflicts_with = "only")]
        all: bool,
        /// Suite name or number; repeatable.
        #[arg(long)]
        only: Vec<String>,
        /// Restrict every suite to these sizes; repeatable.
        #[arg(long)]
        n: Vec<usize>,
        /// Samples per size instead of each suite's default.
        #[arg(long)]
        samples: Option<usize>,
        /// Write the report here (same as --out).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include wall-clock timings in the report (makes it non-reproducible).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = commands::init_threads() {
        eprintln!("gz: {e}");
        return ExitCode::from(2);
    }
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gz: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
