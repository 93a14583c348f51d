//! `wiener-lab`: scripted access to the grids, norms, criteria and
//! experiments of `wiener-core`.
//!
//! Exit codes: 0 success, 1 domain error (including `NOT_COVERED` under
//! `--strict`), 2 usage error.

mod commands;
mod defaults;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use commands::CliError;
use std::process::ExitCode;
use wiener_core::criteria::{CriterionId, Num};

const AFTER_HELP: &str = concat!(
    "Output schema version: 1\n",
    "Exit codes: 0 ok, 1 domain error (NOT_COVERED counts under --strict), 2 usage error.\n",
    "Environment: WIENER_LAB_THREADS sets the worker count; output does not depend on it."
);

#[derive(Parser, Debug)]
#[command(name = "wiener-lab", version, about = "Weighted Besov and Wiener-algebra numerics", after_help = AFTER_HELP)]
pub struct Cli {
    /// Treat NOT_COVERED verdicts as failures (exit 1).
    #[arg(long, global = true)]
    pub strict: bool,
    /// Suppress progress messages on stderr; data is still written.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Seed for subcommands that sample at random.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Sample a model, transform it and optionally compare with its closed form.
    #[command(after_help = AFTER_HELP)]
    Transform(TransformArgs),
    /// Besov norms of a model over a lattice of (s, p, q-sum).
    #[command(after_help = AFTER_HELP)]
    Norm(NormArgs),
    /// Evaluate a membership criterion with exact arithmetic.
    #[command(after_help = AFTER_HELP)]
    Classify(ClassifyArgs),
    /// Wiener profiles and tail verdicts of chirps m_{α,β}.
    #[command(after_help = AFTER_HELP)]
    Chirp(ChirpArgs),
    /// Run an experiment config and write `<output>.csv` and `<output>.json`.
    #[command(after_help = AFTER_HELP)]
    Sweep(SweepArgs),
    /// Log-log decay fit of a radial spectrum profile.
    #[command(name = "fit-rate", after_help = AFTER_HELP)]
    FitRate(FitRateArgs),
    /// Product-inequality ratios over a fixed ensemble and its dilations.
    #[command(name = "gn-check", after_help = AFTER_HELP)]
    GnCheck(GnArgs),
    /// Counterexample for a sharpness statement.
    #[command(after_help = AFTER_HELP)]
    Demo(DemoArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelName {
    Gaussian,
    ModulatedGaussian,
    Chirp,
    ChirpLog,
    Nu,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Model family.
    #[arg(long, value_enum, conflicts_with = "model_json")]
    pub model: Option<ModelName>,
    /// Full model descriptor as JSON, e.g. '{"kind":"gaussian","a":0.5}'.
    #[arg(long)]
    pub model_json: Option<String>,
    /// Gaussian rate a in e^{-a|x|²}.
    #[arg(long, default_value = defaults::GAUSSIAN_A)]
    pub a: f64,
    /// Gaussian centre, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub shift: Vec<f64>,
    /// Modulation frequency, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub omega: Vec<f64>,
    /// Chirp phase exponent α.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Chirp amplitude exponent β.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Cutoff transition `inner:outer` (default 1:2).
    #[arg(long, value_parser = parse_pair)]
    pub cutoff: Option<(f64, f64)>,
    /// Spatial dilation f(x/scale).
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct GridArgs {
    /// Dimension.
    #[arg(long, default_value = defaults::N_DIM)]
    pub n: usize,
    /// Half-width of the box [-L, L)^n.
    #[arg(long = "L", default_value = defaults::HALF_WIDTH)]
    pub half_width: f64,
    /// Points per axis (even, at least 8).
    #[arg(long = "N", default_value = defaults::POINTS)]
    pub points: usize,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SamplingArgs {
    /// Largest chirp phase advance per cell, in radians (default π/2).
    #[arg(long)]
    pub max_phase: Option<f64>,
    /// Skip the chirp phase check entirely.
    #[arg(long)]
    pub allow_undersampled: bool,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Compare with the closed-form transform and report the error.
    #[arg(long)]
    pub check_oracle: bool,
    /// Write the spectrum as a WLF1 binary dump.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NormArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Smoothness s, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub s: Vec<f64>,
    /// Integrability p, comma separated (`inf` allowed).
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_exponent)]
    pub p: Vec<f64>,
    /// Summation exponent over dyadic blocks, comma separated.
    #[arg(long, value_delimiter = ',', default_value = defaults::Q_SUM, value_parser = parse_exponent)]
    pub q_sum: Vec<f64>,
    /// Homogeneous norm over the resolvable band.
    #[arg(long)]
    pub homogeneous: bool,
    /// Power weight (1+|x|²)^{ε/2}.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "weight_json")]
    pub weight_epsilon: Option<f64>,
    /// Weight descriptor as JSON.
    #[arg(long)]
    pub weight_json: Option<String>,
    /// Output stem for `<out>.csv` and `<out>.json`; stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Criterion id, e.g. thm-c, th31, prop64b.
    #[arg(long, value_parser = parse_criterion)]
    pub criterion: CriterionId,
    #[arg(long, default_value = defaults::N_DIM)]
    pub n: u32,
    /// Exponents accept integers, decimals, fractions `a/b` and `inf`.
    #[arg(long, value_parser = parse_num)]
    pub p: Option<Num>,
    #[arg(long, value_parser = parse_num)]
    pub q: Option<Num>,
    #[arg(long, value_parser = parse_num)]
    pub r: Option<Num>,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    pub s: Option<Num>,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    pub sigma: Option<Num>,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    pub tau: Option<Num>,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    pub epsilon: Option<Num>,
    #[arg(long, value_parser = parse_num)]
    pub alpha: Option<Num>,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    pub beta: Option<Num>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ChirpArgs {
    #[arg(long)]
    pub alpha: f64,
    /// β values, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub beta: Vec<f64>,
    #[arg(long, default_value = defaults::N_DIM)]
    pub n: usize,
    /// Profile radii 2^lo ..= 2^hi.
    #[arg(long, default_value = defaults::SWEEP_RADII, value_parser = parse_radii, allow_hyphen_values = true)]
    pub sweep_radii: (i32, i32),
    /// Half-width; chosen automatically unless given together with --N.
    #[arg(long = "L", requires = "points")]
    pub half_width: Option<f64>,
    #[arg(long = "N", requires = "half_width")]
    pub points: Option<usize>,
    #[arg(long, value_parser = parse_pair)]
    pub cutoff: Option<(f64, f64)>,
    /// Output stem for `<out>.csv` and `<out>.json`; stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output stem.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Correction {
    None,
    Large,
    Small,
}

#[derive(Args, Debug)]
pub struct FitRateArgs {
    /// CSV with `radius,magnitude` columns; a model is sampled otherwise.
    #[arg(long, conflicts_with_all = ["model", "model_json"])]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Fit window `lo:hi` in |ξ|; defaults to the grid's fit band.
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<(f64, f64)>,
    #[arg(long, value_enum, default_value = "none")]
    pub log_correction: Correction,
    /// Shell bins for a sampled model.
    #[arg(long, default_value = defaults::BINS)]
    pub bins: usize,
}

#[derive(Args, Debug)]
pub struct GnArgs {
    /// Manifest ensemble name.
    #[arg(long, default_value = defaults::ENSEMBLE)]
    pub ensemble: String,
    #[arg(long, default_value = defaults::N_DIM)]
    pub n: usize,
    #[arg(long, value_parser = parse_exponent, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, value_parser = parse_exponent, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, value_parser = parse_exponent, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, value_parser = parse_exponent)]
    pub p: f64,
    #[arg(long, value_parser = parse_exponent)]
    pub q: f64,
    #[arg(long, value_parser = parse_exponent)]
    pub r: f64,
    /// Override the derived interpolation exponent.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Power weight exponent of u.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub u_epsilon: f64,
    /// Power weight exponent of v.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub v_epsilon: f64,
    /// Dilation exponents m, comma separated.
    #[arg(long, value_delimiter = ',', default_value = defaults::DILATIONS, allow_hyphen_values = true)]
    pub dilations: Vec<i32>,
    /// Output stem for `<out>.csv` and `<out>.json`; stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    /// prop63, prop64a or prop64b.
    #[arg(long, value_parser = parse_criterion)]
    pub criterion: CriterionId,
    #[arg(long, default_value = defaults::N_DIM)]
    pub n: u32,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    pub epsilon: Num,
    #[arg(long, value_parser = parse_num)]
    pub q: Option<Num>,
    #[arg(long, value_parser = parse_num)]
    pub r: Option<Num>,
    #[arg(long, value_parser = parse_num)]
    pub s: Option<Num>,
    #[arg(long = "L", requires = "points")]
    pub half_width: Option<f64>,
    #[arg(long = "N", requires = "half_width")]
    pub points: Option<usize>,
    /// Output stem for `<out>.csv` and `<out>.json`; stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_num(s: &str) -> Result<Num, String> {
    s.parse::<Num>().map_err(|e| e.to_string())
}

fn parse_criterion(s: &str) -> Result<CriterionId, String> {
    s.parse::<CriterionId>().map_err(|e| e.to_string())
}

fn parse_exponent(s: &str) -> Result<f64, String> {
    wiener_core::exponent::parse(s).ok_or_else(|| format!("not a number: {s:?}"))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    Ok((parse_exponent(a)?, parse_exponent(b)?))
}

fn parse_radii(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo = a.trim().parse().map_err(|_| format!("bad exponent {a:?}"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad exponent {b:?}"))?;
    if lo > hi {
        return Err(format!("empty radius range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn configure_threads() -> Result<(), String> {
    let Ok(text) = std::env::var(defaults::THREADS_ENV) else {
        return Ok(());
    };
    let count: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&c| c > 0)
        .ok_or_else(|| format!("{} must be a positive integer, got {text:?}", defaults::THREADS_ENV))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(count)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
