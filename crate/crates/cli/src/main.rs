use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "tct", version, about = "Deadline time-cost tradeoff solvers for bounded-depth instances")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Reduce an instance to the two-alternative form.
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        /// Where to write the back-translation map.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Solve the covering LP.
    Lp {
        #[arg(long = "in")]
        input: PathBuf,
        /// Exact optimum over the enumerated blocker.
        #[arg(long, conflicts_with = "eps")]
        exact: bool,
        /// Approximation parameter, e.g. 0.05 or 1/20.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Fractional cover followed by rounding, or a baseline.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Exact reference computations.
    Exact {
        #[arg(value_enum)]
        what: ExactWhat,
        #[arg(long = "in")]
        input: PathBuf,
        /// Job (or vertex) limit of the exhaustive search.
        #[arg(long, default_value_t = 25)]
        cap: usize,
        /// Path length for `dvd`, overriding the file.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Check a solution; exit 0 iff it meets the deadline.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Run a benchmark configuration.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Tensor product with the acyclic tournament on `d` vertices.
    Tensor {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    #[command(subcommand)]
    Certify(CertifyCommand),
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// The integrality-gap family.
    Gap {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        /// Also write the fractional cover `j/T` here.
        #[arg(long)]
        cover: Option<PathBuf>,
    },
    /// Random layered instance of exact depth.
    Random(RandomArgs),
    /// Directed path on `n` vertices.
    DvdPath {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Acyclic tournament on `n` vertices.
    DvdTournament {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub jobs: usize,
    #[arg(long, default_value_t = 0.3)]
    pub edge_prob: f64,
    /// Deadline as a fraction of the longest all-slow chain.
    #[arg(long, default_value = "3/5")]
    pub slack: String,
}

#[derive(Subcommand, Debug)]
pub enum ReduceCommand {
    /// Time-cost tradeoff instance with the same optimum as a DVD instance.
    DvdToTct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CertifyCommand {
    /// Disjoint k-paths in the tensor product of a path, with a matching cover.
    Packing {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Det,
    Rand,
    SlackDet,
    SlackRand,
    Naive,
    Bye,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExactWhat {
    Tct,
    Dvd,
    Lp,
    Blocker,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
