//! Pipeline driver: synth -> dist -> rerank -> mine -> fuse -> eval.
//!
//! Every stage reads and writes the text formats from `chainrank::io`, so
//! each intermediate is inspectable and any stage can be rerun in
//! isolation. Subcommands print their primary output to stdout when `--out`
//! is not given. All failures exit non-zero with a single diagnostic line
//! `error: <code>: <message>` on stderr.

use std::io::{stdout, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chainrank::chain::{direct_ranking, mine_chains, Aggregation, ChainConfig, Variant};
use chainrank::distance::{cosine_distances, euclidean_distances};
use chainrank::error::{Error, Result};
use chainrank::eval::{evaluate, render_human, render_machine};
use chainrank::fusion::{fuse, FusionInput, FusionOptions};
use chainrank::io;
use chainrank::rerank::{k_reciprocal_rerank, RerankParams};
use chainrank::synth::{generate, SynthConfig};

#[derive(Parser)]
#[command(
    name = "chainrank",
    version,
    about = "Chain retrieval, rank fusion, re-ranking and evaluation over distance matrices",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic drifting-identity embeddings and ground truth
    Synth(SynthArgs),
    /// Compute a distance matrix between two embedding files
    Dist(DistArgs),
    /// Refine a query-gallery matrix with k-reciprocal re-ranking
    Rerank(RerankArgs),
    /// Rank the gallery per query, by direct sort or chain retrieval
    Mine(MineArgs),
    /// Fuse several models' rankings by positionwise voting
    Fuse(FuseArgs),
    /// Score a ranking file against ground truth
    Eval(EvalArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Number of identities (one query each)
    #[arg(long, default_value_t = 10)]
    ids: usize,
    /// Frames per identity, including the query frame
    #[arg(long, default_value_t = 10)]
    frames: usize,
    /// Embedding dimension
    #[arg(long, default_value_t = 32)]
    dim: usize,
    /// Scale of the per-frame random-walk step
    #[arg(long, default_value_t = 0.5)]
    step_sigma: f64,
    /// Scale of the identity-center spread
    #[arg(long, default_value_t = 10.0)]
    center_sigma: f64,
    /// Scale of the per-vector observation noise
    #[arg(long, default_value_t = 0.1)]
    noise_sigma: f64,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV for the query embeddings
    #[arg(long)]
    queries_out: Option<PathBuf>,
    /// Output CSV for the gallery embeddings
    #[arg(long)]
    gallery_out: Option<PathBuf>,
    /// Output CSV for the ground truth
    #[arg(long)]
    truth_out: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    /// Embedding CSV providing the matrix rows
    #[arg(long)]
    rows: Option<PathBuf>,
    /// Embedding CSV providing the matrix columns
    #[arg(long)]
    cols: Option<PathBuf>,
    /// Distance metric
    #[arg(long, value_enum, default_value_t = Metric::Euclidean)]
    metric: Metric,
    /// Output matrix file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Euclidean,
    Cosine,
}

#[derive(Args)]
struct RerankArgs {
    /// Query-gallery distance matrix
    #[arg(long)]
    qg: Option<PathBuf>,
    /// Query-query distance matrix
    #[arg(long)]
    qq: Option<PathBuf>,
    /// Gallery-gallery distance matrix
    #[arg(long)]
    gg: Option<PathBuf>,
    /// Reciprocal-neighborhood size
    #[arg(long, default_value_t = 20)]
    k1: usize,
    /// Local-expansion neighborhood size
    #[arg(long, default_value_t = 6)]
    k2: usize,
    /// Weight of the original distance in the blend
    #[arg(long, default_value_t = 0.3)]
    lambda: f64,
    /// Output matrix file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    /// Query-gallery distance matrix
    #[arg(long)]
    qg: Option<PathBuf>,
    /// Gallery-gallery distance matrix (unused with --variant direct)
    #[arg(long)]
    gg: Option<PathBuf>,
    /// Ranking method
    #[arg(long, value_enum, default_value_t = VariantArg::Local)]
    variant: VariantArg,
    /// Window size N for the local variant
    #[arg(long, default_value_t = 1)]
    window: usize,
    /// Keep the query as a permanent extra window member
    #[arg(long)]
    with_ref: bool,
    /// Aggregation of window-member distances
    #[arg(long, value_enum, default_value_t = AggArg::Min)]
    agg: AggArg,
    /// Output ranking file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum VariantArg {
    /// Sort each row of the query-gallery matrix
    Direct,
    /// Chain retrieval with a sliding window
    Local,
    /// Chain retrieval over all retrieved items
    Global,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggArg {
    Min,
    Mean,
}

#[derive(Args)]
struct FuseArgs {
    /// Ranking file of one model; repeat per model
    #[arg(long = "ranking")]
    rankings: Vec<PathBuf>,
    /// Query-gallery matrix of one model, in the same order; repeat per model
    #[arg(long = "matrix")]
    matrices: Vec<PathBuf>,
    /// Min-max normalize distances per query before tie-breaking
    #[arg(long)]
    normalize: bool,
    /// Output ranking file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Ranking file to score
    #[arg(long)]
    ranking: Option<PathBuf>,
    /// Ground-truth CSV with identities and optional frame indices
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Write the key=value report to this file as well
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => return handle_parse_error(e),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let message = err.to_string().replace('\n', " ");
            eprintln!("error: {}: {}", err.code(), message);
            ExitCode::FAILURE
        }
    }
}

fn handle_parse_error(e: clap::Error) -> ExitCode {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = e.print();
            ExitCode::SUCCESS
        }
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            ExitCode::FAILURE
        }
        _ => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let message = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error: usage: {message}");
            ExitCode::FAILURE
        }
    }
}

/// Unwraps an argument the subcommand cannot run without. Required files are
/// checked after the numeric configuration so that configuration mistakes
/// surface first.
fn require(value: Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    value.ok_or_else(|| Error::BadConfig(format!("{flag} is required")))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(args) => run_synth(args),
        Command::Dist(args) => run_dist(args),
        Command::Rerank(args) => run_rerank(args),
        Command::Mine(args) => run_mine(args),
        Command::Fuse(args) => run_fuse(args),
        Command::Eval(args) => run_eval(args),
    }
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let cfg = SynthConfig {
        num_identities: args.ids,
        frames_per_identity: args.frames,
        dim: args.dim,
        step_sigma: args.step_sigma,
        center_sigma: args.center_sigma,
        noise_sigma: args.noise_sigma,
        seed: args.seed,
    };
    cfg.validate()?;
    let queries_out = require(args.queries_out, "--queries-out")?;
    let gallery_out = require(args.gallery_out, "--gallery-out")?;
    let truth_out = require(args.truth_out, "--truth-out")?;
    let (queries, gallery, truth) = generate(&cfg)?;
    io::write_embeddings_file(queries_out, &queries)?;
    io::write_embeddings_file(gallery_out, &gallery)?;
    io::write_truth_file(truth_out, &truth)?;
    Ok(())
}

fn run_dist(args: DistArgs) -> Result<()> {
    let rows_path = require(args.rows, "--rows")?;
    let cols_path = require(args.cols, "--cols")?;
    let rows = io::read_embeddings(rows_path)?;
    let cols = io::read_embeddings(cols_path)?;
    let matrix = match args.metric {
        Metric::Euclidean => euclidean_distances(&rows, &cols)?,
        Metric::Cosine => cosine_distances(&rows, &cols)?,
    };
    match args.out {
        Some(path) => io::write_matrix_file(path, &matrix),
        None => io::write_matrix(BufWriter::new(stdout().lock()), &matrix),
    }
}

fn run_rerank(args: RerankArgs) -> Result<()> {
    let params = RerankParams {
        k1: args.k1,
        k2: args.k2,
        lambda: args.lambda,
    };
    params.validate()?;
    let qg_path = require(args.qg, "--qg")?;
    let qq_path = require(args.qq, "--qq")?;
    let gg_path = require(args.gg, "--gg")?;
    let qg = io::read_matrix(qg_path)?;
    let qq = io::read_matrix(qq_path)?;
    let gg = io::read_matrix(gg_path)?;
    let refined = k_reciprocal_rerank(&qg, &qq, &gg, &params)?;
    match args.out {
        Some(path) => io::write_matrix_file(path, &refined),
        None => io::write_matrix(BufWriter::new(stdout().lock()), &refined),
    }
}

fn run_mine(args: MineArgs) -> Result<()> {
    let cfg = ChainConfig {
        variant: match args.variant {
            VariantArg::Global => Variant::Global,
            _ => Variant::Local,
        },
        window: args.window,
        with_ref: args.with_ref,
        aggregation: match args.agg {
            AggArg::Min => Aggregation::Min,
            AggArg::Mean => Aggregation::Mean,
        },
    };
    if args.variant != VariantArg::Direct {
        cfg.validate()?;
    }
    let qg_path = require(args.qg, "--qg")?;
    let qg = io::read_matrix(qg_path)?;
    let result = if args.variant == VariantArg::Direct {
        direct_ranking(&qg)?
    } else {
        let gg_path = require(args.gg, "--gg")?;
        let gg = io::read_matrix(gg_path)?;
        mine_chains(&qg, &gg, &cfg)?
    };
    match args.out {
        Some(path) => io::write_ranking_file(path, &result),
        None => io::write_ranking(BufWriter::new(stdout().lock()), &result),
    }
}

fn run_fuse(args: FuseArgs) -> Result<()> {
    if args.rankings.is_empty() {
        return Err(Error::BadConfig("at least one --ranking is required".into()));
    }
    if args.rankings.len() != args.matrices.len() {
        return Err(Error::BadConfig(format!(
            "{} --ranking files but {} --matrix files",
            args.rankings.len(),
            args.matrices.len()
        )));
    }
    let matrices = args
        .matrices
        .iter()
        .map(io::read_matrix)
        .collect::<Result<Vec<_>>>()?;
    let results = args
        .rankings
        .iter()
        .zip(&matrices)
        .map(|(path, matrix)| io::read_ranking_against(path, matrix.col_ids()))
        .collect::<Result<Vec<_>>>()?;
    let input = FusionInput::new(&results, &matrices)?;
    let options = FusionOptions {
        normalize: args.normalize,
    };
    let fused = fuse(&input, &options)?;
    match args.out {
        Some(path) => io::write_ranking_file(path, &fused),
        None => io::write_ranking(BufWriter::new(stdout().lock()), &fused),
    }
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let ranking_path = require(args.ranking, "--ranking")?;
    let truth_path = require(args.truth, "--truth")?;
    let result = io::read_ranking(ranking_path)?;
    let truth = io::read_truth(truth_path)?;
    let report = evaluate(&result, &truth)?;
    print!("{}", render_human(&report, result.query_ids()));
    if let Some(path) = args.out {
        write_text(&path, &render_machine(&report, result.query_ids()))?;
    }
    Ok(())
}
