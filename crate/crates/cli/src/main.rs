use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "nbimmune", version, about = "Non-backtracking spectra and targeted node immunization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Leading NB-eigenvalue and NB-centralities of a graph.
    Spectral(SpectralArgs),
    /// True vs predicted eigen-drops on degree-sampled nodes.
    Predict(PredictArgs),
    /// Greedy node removal with one strategy.
    Immunize(ImmunizeArgs),
    /// Runtime of X-degree immunization on configuration-model graphs.
    Scaling(ScalingArgs),
    /// Write a random graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Eigenvalue convergence tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
}

#[derive(Args, Debug)]
struct SpectralArgs {
    /// Whitespace separated edge list.
    #[arg(long)]
    input: PathBuf,
    /// Only report the k most central nodes.
    #[arg(long)]
    top: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    input: PathBuf,
    /// Number of degree-proportional draws as a fraction of n.
    #[arg(long, default_value_t = 0.1)]
    sample_fraction: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TraceArg {
    Full,
    Final,
    None,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("amount").required(true).args(["p", "percent"]))]
struct ImmunizeArgs {
    #[arg(long)]
    input: PathBuf,
    /// degree, core, ci, nb, xnb, xnb-naive or xdeg.
    #[arg(long)]
    strategy: String,
    /// Number of nodes to remove.
    #[arg(long = "p")]
    p: Option<usize>,
    /// Percentage of nodes to remove (rounded down, at least one).
    #[arg(long)]
    percent: Option<f64>,
    #[arg(long, default_value = "ipq")]
    backend: String,
    /// Which eigenvalues to record.
    #[arg(long, value_enum, default_value_t = TraceArg::Full)]
    trace: TraceArg,
    /// Include selection time in the report.
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    /// Comma separated graph sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [10_000usize, 20_000])]
    n: Vec<usize>,
    #[arg(long = "p", default_value_t = 100)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    /// map, ipq or both.
    #[arg(long, default_value = "both")]
    backend: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GeneratorArg {
    Er,
    Ba,
    Sbm,
    ConfigPowerlaw,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    generator: GeneratorArg,
    #[arg(long)]
    n: usize,
    /// Edge probability (er).
    #[arg(long = "edge-prob", default_value_t = 0.01)]
    edge_prob: f64,
    /// Edges per new node (ba).
    #[arg(long, default_value_t = 6)]
    attach: usize,
    /// Expected within-block degree (sbm).
    #[arg(long, default_value_t = 9.0)]
    within: f64,
    /// Expected between-block degree (sbm).
    #[arg(long, default_value_t = 3.0)]
    between: f64,
    /// Power-law exponent (config-powerlaw).
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    /// Smallest sampled degree (config-powerlaw).
    #[arg(long, default_value_t = 1)]
    d_min: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    /// Bad arguments, unreadable or malformed input: exit 2.
    Usage(anyhow::Error),
    /// The computation itself failed: exit 1.
    Runtime(anyhow::Error),
}

type CmdResult<T> = Result<T, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn read_graph(path: &PathBuf) -> CmdResult<nbimmune::graph::LoadedGraph> {
    let file = File::open(path).map_err(|e| usage(anyhow::anyhow!("cannot open {}: {e}", path.display())))?;
    nbimmune::graph::load_edge_list(BufReader::new(file))
        .map_err(|e| usage(anyhow::anyhow!("{}: {e}", path.display())))
}

fn write_output(path: Option<&PathBuf>, bytes: &[u8]) -> CmdResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| runtime(anyhow::anyhow!("cannot write {}: {e}", p.display()))),
        None => io::stdout().write_all(bytes).map_err(runtime),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Spectral(a) => commands::spectral(a),
        Command::Predict(a) => commands::predict(a),
        Command::Immunize(a) => commands::immunize(a),
        Command::Scaling(a) => commands::scaling(a),
        Command::Generate(a) => commands::generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
