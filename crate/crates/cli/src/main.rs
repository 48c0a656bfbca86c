//! Command-line interface over the guessmetrics library.
//!
//! Reports go to stdout (or `--out`) as JSON by default; progress goes to
//! stderr so stdout stays machine-parseable. Exit codes: 0 success, 1 usage
//! error, 2 data error.

mod commands;
mod manifest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use commands::*;
use report::EmitFormat;

#[derive(Parser)]
#[command(
    name = "guessmetrics",
    version,
    about = "Password dataset and guess-list analytics: similarity metrics, \
             success rates, salted-hash matching, and combination attacks"
)]
struct Cli {
    /// Report destination (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format; CSV is a lossy flattening for tabular payloads.
    #[arg(long, global = true, value_enum, default_value_t = EmitFormat::Json)]
    emit: EmitFormat,
    /// Worker threads for parallel kernels (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and count a corpus, optionally saving the counted form.
    Ingest(IngestArgs),
    /// Total/unique counts and their ratio.
    Summary(SummaryArgs),
    /// Structural feature distribution of a corpus.
    Features(FeaturesArgs),
    /// Pairwise similarity between two corpora.
    Sim(SimArgs),
    /// Train the Identity guesser and emit its guess list.
    Identity(IdentityArgs),
    /// Import an external guesser's output as a guess list.
    Import(ImportArgs),
    /// Success rate of a guess list against a plaintext target.
    Evaluate(EvaluateArgs),
    /// Cumulative success curve at checkpoints (plaintext or hashed target).
    Curve(CurveArgs),
    /// Build a combination attack from staged guess lists.
    Combine(CombineArgs),
    /// Run every grid statistic from a manifest in one pass.
    Grid(GridArgs),
    /// Generalized Jaccard between a plaintext corpus and a hash dump.
    HashedSim(HashedSimArgs),
    /// Success rate of a guess list against a hash dump.
    HashedEvaluate(HashedEvaluateArgs),
    /// Draw a uniform sample (without replacement) from a corpus.
    Sample(SampleArgs),
    /// Merge corpora by keywise count addition.
    Merge(MergeArgs),
}

#[derive(Debug, clap::Args, serde::Serialize)]
struct GridArgs {
    /// JSON manifest mapping datasets and guessers to files.
    #[arg(long)]
    manifest: PathBuf,
}

fn config_echo(cli: &Cli, subcommand: &str, args: Value) -> Value {
    json!({
        "subcommand": subcommand,
        "args": args,
        "emit": cli.emit,
        "out": cli.out,
        "threads": cli.threads,
    })
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        guessmetrics::configure_threads(threads)?;
    }
    let report = match &cli.command {
        Command::Ingest(a) => commands::ingest(a, config_echo(cli, "ingest", json!(a)))?,
        Command::Summary(a) => commands::summary(a, config_echo(cli, "summary", json!(a)))?,
        Command::Features(a) => commands::features(a, config_echo(cli, "features", json!(a)))?,
        Command::Sim(a) => commands::sim(a, config_echo(cli, "sim", json!(a)))?,
        Command::Identity(a) => commands::identity(a, config_echo(cli, "identity", json!(a)))?,
        Command::Import(a) => commands::import(a, config_echo(cli, "import", json!(a)))?,
        Command::Evaluate(a) => commands::evaluate(a, config_echo(cli, "evaluate", json!(a)))?,
        Command::Curve(a) => commands::curve(a, config_echo(cli, "curve", json!(a)))?,
        Command::Combine(a) => commands::combine(a, config_echo(cli, "combine", json!(a)))?,
        Command::Grid(a) => manifest::run_grid(&a.manifest, config_echo(cli, "grid", json!(a)))?,
        Command::HashedSim(a) => {
            commands::hashed_sim(a, config_echo(cli, "hashed-sim", json!(a)))?
        }
        Command::HashedEvaluate(a) => {
            commands::hashed_evaluate(a, config_echo(cli, "hashed-evaluate", json!(a)))?
        }
        Command::Sample(a) => commands::sample(a, config_echo(cli, "sample", json!(a)))?,
        Command::Merge(a) => commands::merge(a, config_echo(cli, "merge", json!(a)))?,
    };
    report::emit(&report, cli.emit, cli.out.as_deref())
}

fn exit_code_for(err: &anyhow::Error) -> ExitCode {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<guessmetrics::Error>() {
            return ExitCode::from(if core.is_usage() { 1 } else { 2 });
        }
    }
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code_for(&e)
        }
    }
}
