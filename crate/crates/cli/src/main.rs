mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

/// Build, split and evaluate paragraph / short-description corpora.
#[derive(Debug, Parser)]
#[command(name = "shortdesc", version)]
struct Cli {
    /// Log more (repeat for debug output). RUST_LOG overrides this.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample random entities and write validated samples as JSONL.
    Collect(CollectArgs),
    /// Split a dataset into train, validation and test files plus a manifest.
    Split(SplitArgs),
    /// Print corpus statistics.
    Stats(StatsArgs),
    /// ROUGE precision of descriptions against paragraph prefixes.
    PrefixOverlap(PrefixOverlapArgs),
    /// Score every candidate of every candidate set.
    Score(ScoreArgs),
    /// Rerank candidates and write the best first.
    Rerank(ScoreArgs),
    /// Train the projection of the embedding scorer.
    TrainRanker(TrainArgs),
    /// Corpus-level ROUGE and BLEU between two fields of a JSONL file.
    Eval(EvalArgs),
    /// Two-sample Kolmogorov-Smirnov tests on polarity scores.
    KsTest(KsArgs),
    /// Inter-annotator agreement coefficients for a ratings CSV.
    Agreement(AgreementArgs),
    /// Flag texts containing a consecutively repeated n-gram.
    FlagRepetition(RepetitionArgs),
}

#[derive(Debug, Args)]
struct CollectArgs {
    /// Number of samples to collect.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Read entities.jsonl and intros.jsonl from this directory instead of the network.
    #[arg(long)]
    fixture_dir: Option<PathBuf>,
    /// Maximum concurrent requests.
    #[arg(long, default_value_t = 8)]
    max_in_flight: usize,
    #[arg(long, default_value_t = 10.0)]
    requests_per_second: f64,
    #[arg(long, default_value_t = 3)]
    max_attempts: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SplitModeArg {
    TopicExclusive,
    TopicIndependent,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long, value_enum)]
    mode: SplitModeArg,
    /// Train, validation and test fractions.
    #[arg(long, num_args = 3, value_names = ["TRAIN", "VAL", "TEST"], default_values_t = [0.8, 0.1, 0.1])]
    ratios: Vec<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Print one JSON object instead of a table.
    #[arg(long)]
    json: bool,
    /// Number of topics listed in the table.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Debug, Args)]
struct PrefixOverlapArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Prefix lengths in tokens, ascending.
    #[arg(long, num_args = 1.., default_values_t = [32, 64, 128, 256, 512, 1024])]
    lengths: Vec<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Cosine,
    Rouge1,
    Fused,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReferenceArg {
    Paragraph,
    Gold,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Candidate sets, one per line.
    #[arg(long)]
    candidates: PathBuf,
    /// Embedding table; required for cosine and fused modes.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Trained scorer parameters.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "paragraph")]
    reference: ReferenceArg,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TrainModeArg {
    Cosine,
    Fused,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitArg {
    /// Identity plus small Gaussian noise drawn from the seed.
    Random,
    Identity,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Pairwise,
    Positional,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    validation: PathBuf,
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long, value_enum, default_value = "cosine")]
    mode: TrainModeArg,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "random")]
    init: InitArg,
    #[arg(long, default_value_t = 0.01)]
    lambda_gold: f64,
    #[arg(long, default_value_t = 0.01)]
    lambda_candidate: f64,
    #[arg(long, value_enum, default_value = "pairwise")]
    margin_schedule: ScheduleArg,
    /// Where to write the best parameters.
    #[arg(long)]
    out: PathBuf,
    /// Optional per-epoch loss log (JSONL).
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Field holding the system output.
    #[arg(long, default_value = "candidate")]
    candidate_field: String,
    /// Field holding the reference text.
    #[arg(long, default_value = "reference")]
    reference_field: String,
    /// Highest BLEU n-gram order.
    #[arg(long, default_value_t = 4)]
    bleu_order: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolarityArg {
    Negative,
    Neutral,
    Positive,
    All,
}

#[derive(Debug, Args)]
struct KsArgs {
    #[arg(long, value_enum, default_value = "all")]
    polarity: PolarityArg,
    /// First polarity file.
    #[arg(long)]
    a: PathBuf,
    /// Second polarity file.
    #[arg(long)]
    b: PathBuf,
    #[arg(long, num_args = 1.., default_values_t = [0.20, 0.15, 0.10, 0.05, 0.01])]
    alphas: Vec<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct AgreementArgs {
    /// CSV with a header row of rater ids; empty cells are missing ratings.
    #[arg(long)]
    ratings: PathBuf,
    /// Number of categories on the rating scale (defaults to those observed).
    #[arg(long)]
    categories: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct RepetitionArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Field holding the text to check.
    #[arg(long, default_value = "text")]
    field: String,
    /// N-gram order.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Consecutive repeats needed to flag a text.
    #[arg(long, default_value_t = 3)]
    threshold: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Collect(a) => commands::collect(a),
        Command::Split(a) => commands::split(a),
        Command::Stats(a) => commands::stats(a),
        Command::PrefixOverlap(a) => commands::prefix_overlap(a),
        Command::Score(a) => commands::score(a),
        Command::Rerank(a) => commands::rerank(a),
        Command::TrainRanker(a) => commands::train_ranker(a),
        Command::Eval(a) => commands::eval(a),
        Command::KsTest(a) => commands::ks_test(a),
        Command::Agreement(a) => commands::agreement(a),
        Command::FlagRepetition(a) => commands::flag_repetition(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shortdesc: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
