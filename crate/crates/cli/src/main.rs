use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use spmm_roofline::bench::default_threads;
use spmm_roofline::model::{HubSource, ZMode};
use spmm_roofline::{KernelId, Pattern};

mod commands;
mod stats;

#[derive(Parser)]
#[command(
    name = "spmm-roofline",
    version,
    about = "Roofline models and benchmarks for sparse x dense matrix multiplication"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic matrix in Matrix Market format.
    Generate(GenerateArgs),
    /// Download a SuiteSparse matrix into the local cache.
    Fetch(FetchArgs),
    /// Print structural statistics of a matrix.
    Stats(StatsArgs),
    /// Measure STREAM-triad bandwidth and store it in the machine profile.
    Calibrate(CalibrateArgs),
    /// Time SpMM kernels on a matrix and append the results.
    Bench(BenchArgs),
    /// Evaluate the arithmetic-intensity model for a matrix.
    Model(ModelArgs),
    /// Join bench results with model rows into a CSV table and an SVG roofline.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Pattern,
    Real,
    Integer,
}

#[derive(Clone, Copy, ValueEnum)]
enum ZSource {
    Exact,
    Poisson,
    Measured,
}

impl ZSource {
    fn mode(self) -> Option<ZMode> {
        match self {
            ZSource::Exact => Some(ZMode::Exact),
            ZSource::Poisson => Some(ZMode::Poisson),
            ZSource::Measured => None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HubSourceArg {
    Analytic,
    Empirical,
}

impl From<HubSourceArg> for HubSource {
    fn from(h: HubSourceArg) -> Self {
        match h {
            HubSourceArg::Analytic => HubSource::Analytic,
            HubSourceArg::Empirical => HubSource::Empirical,
        }
    }
}

/// A worker count, or `max` for hardware concurrency.
#[derive(Clone, Copy, Debug)]
struct Threads(usize);

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("max") {
            return Ok(Threads(default_threads()));
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("'{s}' is not a positive thread count or 'max'")),
            Ok(n) => Ok(Threads(n)),
        }
    }
}

fn parse_pattern(s: &str) -> std::result::Result<Pattern, String> {
    s.parse().map_err(|e: spmm_roofline::Error| e.to_string())
}

fn parse_kernel(s: &str) -> std::result::Result<KernelId, String> {
    s.parse().map_err(|e: spmm_roofline::Error| e.to_string())
}

fn parse_positive(s: &str) -> std::result::Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("'{s}' is not a positive integer")),
        Ok(n) => Ok(n),
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_pattern)]
    pattern: Pattern,
    #[arg(long)]
    n: usize,
    /// Average entries per row (random, blocked) or expected degree (scale-free).
    #[arg(long, default_value_t = 10.0)]
    avg_nnz: f64,
    /// Power-law exponent for scale-free matrices.
    #[arg(long)]
    alpha: Option<f64>,
    /// Tile size for blocked matrices.
    #[arg(long)]
    block_dim: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "pattern")]
    field: FieldArg,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct FetchArgs {
    /// Collection name, e.g. `com-LiveJournal`.
    #[arg(long)]
    name: String,
    /// Collection group; looked up from the built-in list when omitted.
    #[arg(long)]
    group: Option<String>,
    #[arg(long, env = "SPMM_ROOFLINE_CACHE", default_value = "suitesparse-cache")]
    cache_dir: PathBuf,
    /// Machine profile supplying the download URL template.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// URL template with `{group}` and `{name}` placeholders.
    #[arg(long)]
    url_template: Option<String>,
}

#[derive(Args)]
struct StatsArgs {
    matrix: PathBuf,
    /// Name used in the output; defaults to the file stem.
    #[arg(long)]
    id: Option<String>,
    #[arg(long, value_parser = parse_positive)]
    block_dim: Option<usize>,
    #[arg(long, default_value_t = spmm_roofline::model::DEFAULT_HUB_FRACTION)]
    hub_fraction: f64,
    /// Lower degree cutoff for the exponent fit.
    #[arg(long)]
    k_min: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, default_value = "profile.json")]
    profile: PathBuf,
    /// Triad array length; defaults to the profile value or 8x the last-level cache.
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long, default_value_t = 10, value_parser = parse_positive)]
    reps: usize,
    #[arg(long, env = "SPMM_ROOFLINE_THREADS")]
    threads: Option<Threads>,
}

#[derive(Args)]
struct BenchArgs {
    matrix: PathBuf,
    #[arg(long, default_value = "profile.json")]
    profile: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csr,csb", value_parser = parse_kernel)]
    kernels: Vec<KernelId>,
    #[arg(long, value_delimiter = ',', default_value = "1,4,16,64", value_parser = parse_positive)]
    d: Vec<usize>,
    /// Worker counts, e.g. `1,2,max`.
    #[arg(long, value_delimiter = ',', env = "SPMM_ROOFLINE_THREADS")]
    threads: Vec<Threads>,
    /// Declared sparsity pattern; looked up from the built-in list when omitted.
    #[arg(long, value_parser = parse_pattern)]
    pattern: Option<Pattern>,
    #[arg(long)]
    id: Option<String>,
    /// Results CSV to append to; written to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long)]
    timed: Option<usize>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, value_parser = parse_positive)]
    block_dim: Option<usize>,
}

#[derive(Args)]
struct ModelArgs {
    /// Matrix Market file; alternatively pass `--stats`.
    #[arg(required_unless_present = "stats", conflicts_with = "stats")]
    matrix: Option<PathBuf>,
    /// JSON written by `stats --json`.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, value_parser = parse_pattern)]
    pattern: Option<Pattern>,
    #[arg(long, value_delimiter = ',', default_value = "1,4,16,64", value_parser = parse_positive)]
    d: Vec<usize>,
    /// Machine profile; the reference profile is used when omitted.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    id: Option<String>,
    #[arg(long, value_parser = parse_positive)]
    block_dim: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    z_source: ZSource,
    #[arg(long, value_enum, default_value = "analytic")]
    hub_source: HubSourceArg,
    /// Power-law exponent; defaults to the fitted value.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    hub_fraction: Option<f64>,
    #[arg(long)]
    k_min: Option<u64>,
    #[arg(long)]
    traffic_a_bytes: Option<f64>,
    #[arg(long)]
    reuse_factor: Option<f64>,
    /// Model CSV; written to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    models: PathBuf,
    /// Machine profile; the reference profile is used when omitted.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_meta: Option<PathBuf>,
    /// Timestamp recorded in the metadata CSV; defaults to now (RFC 3339, UTC).
    #[arg(long)]
    timestamp: Option<String>,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Fetch(a) => commands::fetch(a),
        Command::Stats(a) => commands::stats(a),
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Bench(a) => commands::bench(a),
        Command::Model(a) => commands::model(a),
        Command::Report(a) => {
            if a.out_svg.is_none() && a.out_csv.is_none() && a.out_meta.is_none() {
                bail!("report needs at least one of --out-svg, --out-csv, --out-meta");
            }
            commands::report(a)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
