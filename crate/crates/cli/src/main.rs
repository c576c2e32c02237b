//! `cive`: validate, transform and query Bayesian networks with causal
//! independence, and benchmark the elimination engines against each other.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cive::engine::Engine;

#[derive(Parser)]
#[command(name = "cive", version, about = "Exact inference for Bayesian networks with causal independence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a network file and report every problem found.
    Validate { network: PathBuf },
    /// Compute a posterior distribution.
    Infer(InferArgs),
    /// Rewrite a network and print the result.
    Transform {
        network: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
    },
    /// Run engines over random queries and print a CSV report.
    Bench(BenchArgs),
    /// Print a seeded random network.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct InferArgs {
    network: PathBuf,
    /// Target variables, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    query: Vec<String>,
    /// Observations as `name=value`, comma separated; values are labels or indices.
    #[arg(long, default_value = "")]
    evidence: String,
    #[arg(long, default_value = "ve1", value_parser = parse_engine)]
    engine: Engine,
    /// `min-deficiency`, `max-cardinality` or `given:<file>`.
    #[arg(long, default_value = "min-deficiency")]
    order: String,
    /// Also print the multiplication and addition counts.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct BenchArgs {
    network: PathBuf,
    /// Observations per query; several values give one batch each.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    n_obs: Vec<usize>,
    /// Queries per batch.
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "ve,ve1,pd,tt", value_parser = parse_engine)]
    engines: Vec<Engine>,
    #[arg(long, default_value = "min-deficiency")]
    order: String,
    /// Per-run time limit in seconds (0 disables it).
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    /// Per-run limit on allocated table cells (0 disables it).
    #[arg(long, default_value_t = 10 * 1024 * 1024 / 8)]
    max_cells: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write `NA` for times so that the output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    nodes: usize,
    #[arg(long, default_value_t = 3)]
    max_parents: usize,
    #[arg(long, default_value_t = 3)]
    max_cardinality: usize,
    #[arg(long, default_value_t = 0.5)]
    convergent_fraction: f64,
    /// Probability that a table entry is zero.
    #[arg(long, default_value_t = 0.125)]
    zero_fraction: f64,
    /// Only use the built-in operators.
    #[arg(long)]
    builtin_only: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Depute,
    Pd,
    Tt,
    Expand,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let mut lines = rendered.lines().skip_while(|l| !l.starts_with("error: "));
            let line = match lines.next() {
                Some(first) => {
                    let first = first.trim_start_matches("error: ");
                    // "the following required arguments were not provided:" lists them below
                    match (first.ends_with(':'), lines.next()) {
                        (true, Some(next)) => format!("{first} {}", next.trim()),
                        _ => first.to_string(),
                    }
                }
                None => "missing subcommand (see `cive --help`)".to_string(),
            };
            eprintln!("error[usage]: {line}");
            return ExitCode::from(1);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match commands::run(cli.command, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e.message().replace('\n', "; "));
            ExitCode::from(e.exit_status())
        }
    }
}
