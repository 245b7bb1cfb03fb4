mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ivpcount::Error;

/// Integer-valued polynomials under growth constraints.
#[derive(Parser, Debug)]
#[command(name = "ivpcount", version, about)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "IVPCOUNT_PRECISION", default_value_t = 256)]
    precision: u32,
    /// Truncation tolerance for moment-matrix series.
    #[arg(long, global = true, default_value = "1e-40")]
    eps: String,
    /// Largest lattice dimension the enumerator accepts.
    #[arg(long, global = true, default_value_t = ivpcount::lattice::DIM_CAP)]
    dim_cap: usize,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Logarithmic capacity of the two image disks for bases A and B.
    Capacity {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Also estimate the capacity from orthogonal-polynomial norm ratios.
        #[arg(long)]
        cross_check: bool,
        /// Degree used by the cross-check.
        #[arg(long, default_value_t = 80)]
        kmax: usize,
    },
    /// CSV of the level set gamma(A, B) = 1 over a grid of A.
    CriticalCurve {
        #[arg(long)]
        a_min: String,
        #[arg(long)]
        a_max: String,
        #[arg(long, default_value_t = 25)]
        steps: usize,
        /// Bisection width in B.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate integer-valued polynomials of a given degree satisfying a
    /// growth constraint.
    Search {
        #[command(flatten)]
        spec: SpecArgs,
        /// Largest number of witnesses listed in the report.
        #[arg(long, default_value_t = 1000)]
        witness_cap: usize,
        /// Write witnesses as CSV rows `degree,c_0,...,c_d`.
        #[arg(long)]
        witnesses_out: Option<PathBuf>,
    },
    /// Moment-matrix determinant, orthogonal-polynomial norms and body volume.
    #[command(visible_alias = "volume")]
    Gram {
        #[command(flatten)]
        spec: SpecArgs,
        /// Include the matrix entries.
        #[arg(long)]
        matrix: bool,
    },
    /// Run the acceptance suite.
    Verify {
        /// Smaller degree ranges and sample counts.
        #[arg(long)]
        quick: bool,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Linf,
    L2,
    L2w,
}

#[derive(Args, Debug)]
struct SpecArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Base A, a decimal or `golden`.
    #[arg(long)]
    a: String,
    /// Base B for a two-sided constraint.
    #[arg(long)]
    b: Option<String>,
    #[arg(long, group = "threshold")]
    t: Option<String>,
    #[arg(long, group = "threshold")]
    t_squared: Option<String>,
    /// `t^2 = phi (1 - 10^-6)`.
    #[arg(long, group = "threshold")]
    t_squared_below_phi: bool,
    #[arg(long)]
    degree: usize,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_)
            | Error::InvalidBase(_)
            | Error::Parse(_)
            | Error::NomeOutOfRange(_)
            | Error::DisksOverlap { .. } => 2,
            Error::DimensionCap { .. } | Error::EnclosureTooLoose { .. } => 4,
            _ => 3,
        };
        let mut message = e.to_string();
        if let Error::NotPositiveDefinite { .. } = e {
            message.push_str("; retry with a higher --precision");
        }
        Self { code, message }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
