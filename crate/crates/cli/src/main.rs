//! `mwcau`: multiway evolution, causal graphs, reachability proofs and ZX
//! simplification from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mwcau_core::prover::Strategy;
use tracing_subscriber::EnvFilter;

#[derive(Parser, Debug)]
#[command(
    name = "mwcau",
    version,
    about = "Hypergraph rewriting, multiway causal graphs and causal-guided proofs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the multiway evolution graph of a rule set.
    Evolve(EvolveArgs),
    /// Build the multiway graph and its causal edges.
    Causal(EvolveArgs),
    /// Search for a rewrite path between two hypergraphs.
    Prove(ProveArgs),
    /// ZX-diagram simplification and equality proofs.
    #[command(subcommand)]
    Zx(ZxCommand),
    /// Compare causal best-first search with breadth-first search.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Graphml,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Causal,
    Bfs,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Causal => Strategy::CausalBestFirst,
            StrategyArg::Bfs => Strategy::PlainBfs,
        }
    }
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// Rule file (JSON or one rule per line) or an inline rule.
    #[arg(long)]
    pub rules: String,
    /// Initial hypergraph: a file or inline notation such as `{{0,0},{0,0}}`.
    #[arg(long)]
    pub init: String,
    #[arg(long, default_value_t = 3)]
    pub steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_states: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_events: usize,
    #[arg(long, value_enum, default_value_t = Format::Dot)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 8)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_expansions: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Causal)]
    pub strategy: StrategyArg,
    /// Probe depth for causal scoring.
    #[arg(long, default_value_t = 2)]
    pub probe_depth: usize,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Args, Debug)]
pub struct ProveArgs {
    #[arg(long)]
    pub rules: String,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Add ranked critical-pair lemmas to the rule set.
    #[arg(long)]
    pub lemmas: bool,
    /// Also search forward from the goal and meet in the middle.
    #[arg(long)]
    pub bidirectional: bool,
    /// Proof JSON file; a DOT rendering is written next to it with extension
    /// `.dot` (or `.graphml` with `--format graphml`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Dot)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum ZxCommand {
    /// Rewrite a diagram until no rule applies.
    Simplify {
        /// Diagram JSON file or a built-in name (`cnot`, `cnot2`, `id<n>`).
        diagram: String,
        #[command(flatten)]
        zx: ZxArgs,
    },
    /// Prove two diagrams equal up to a scalar.
    ProveEqual {
        left: String,
        right: String,
        #[command(flatten)]
        zx: ZxArgs,
    },
    /// Prove that a gate composed with itself is the identity.
    ProveUnitary {
        gate: String,
        #[command(flatten)]
        zx: ZxArgs,
    },
}

#[derive(Args, Debug)]
pub struct ZxArgs {
    #[arg(long, default_value_t = 4)]
    pub max_arity: usize,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Result JSON file; proofs also get a `.dot` rendering next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Random,
    Decoy,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Suite::Random)]
    pub suite: Suite,
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    /// Longest random walk used to place a goal.
    #[arg(long, default_value_t = 4)]
    pub max_walk: usize,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Leave wall-clock fields out of the JSON report.
    #[arg(long)]
    pub no_timing: bool,
    /// Report JSON file; the table goes to standard output. Without it the
    /// JSON goes to standard output and the table to standard error.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_logging() {
    let filter = EnvFilter::try_from_env("MWCAU_LOG").unwrap_or_else(|_| EnvFilter::new("warn"));
    let _ = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
