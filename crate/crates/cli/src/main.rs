//! `epoint`: resonance poles, exceptional points and level-crossing
//! sections for layered radial potentials.
//!
//! Every subcommand writes its outputs plus a `manifest.json` into `--out`.
//! Exit codes: 0 success, 2 config error, 3 nothing found, 4 range or
//! validity error, 5 numerical failure, 1 anything else.

mod commands;
mod failure;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use epoint_core::ParamGrid;

#[derive(Debug, Parser)]
#[command(name = "epoint", version, about)]
struct Cli {
    /// Worker threads for grid scans (default: number of cores).
    #[arg(long, global = true, env = "EPOINT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count and refine the resonance zeros in a search window.
    Poles(PolesArgs),
    /// Scan a parameter grid, locate an exceptional point and calibrate its
    /// unfolding.
    FindEp(FindEpArgs),
    /// Sample energy and width differences along a line ξ₂ = const.
    Section(SectionArgs),
    /// Follow the exact doublet along a line ξ₂ = const.
    Trace(TraceArgs),
    /// Carry the doublet around a closed loop and report the permutation.
    Loop(LoopArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Potential definition file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ZeroTols {
    /// Newton stops once |f| < tol·max(1, |f′|·|k|).
    #[arg(long, default_value_t = 1e-12)]
    pub tol_refine: f64,
    /// Cells smaller than this holding two zeros certify a double zero.
    #[arg(long, default_value_t = 1e-6)]
    pub tol_min_cell: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PolesArgs {
    #[command(flatten)]
    pub common: Common,
    /// Search window re0,re1,im0,im1 in the k plane (default: from config,
    /// else derived from the tallest barrier).
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    pub region: Option<[f64; 4]>,
    /// Parameter point x1,x2 (default: the config's base values).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub at: Option<(f64, f64)>,
    #[command(flatten)]
    pub tols: ZeroTols,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FindEpArgs {
    #[command(flatten)]
    pub common: Common,
    /// Scan grid n1,n2,x1lo,x1hi,x2lo,x2hi (default: from config).
    #[arg(long, value_parser = ParamGrid::parse)]
    pub grid: Option<ParamGrid>,
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    pub region: Option<[f64; 4]>,
    /// Grid minima with a larger doublet gap are not seeds.
    #[arg(long, default_value_t = 0.05)]
    pub tol_gap: f64,
    /// Newton iteration stops below this residual.
    #[arg(long, default_value_t = 1e-12)]
    pub tol_newton: f64,
    /// Residual the located point must reach.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_accept: f64,
    /// |f_kk| below this is a higher-order degeneracy.
    #[arg(long, default_value_t = 1e-6)]
    pub tol_fkk: f64,
    /// Validity radius criterion: model error as a fraction of the gap.
    #[arg(long, default_value_t = 1e-2)]
    pub tol_validity: f64,
    #[command(flatten)]
    pub tols: ZeroTols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Crosses the line where the real parts meet.
    CrossLr,
    /// Passes through the exceptional point.
    ThroughEp,
    /// Crosses the line where the imaginary parts meet.
    CrossLi,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LineArgs {
    /// Calibrated model written by `find-ep`.
    #[arg(long)]
    pub model: PathBuf,
    /// Fixed ξ₂ of the line.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "preset")]
    pub xi2: Option<f64>,
    /// ξ₁ range lo,hi.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, required_unless_present = "preset")]
    pub range: Option<(f64, f64)>,
    /// One of the model's canonical lines instead of --xi2/--range.
    #[arg(long, value_enum, conflicts_with_all = ["xi2", "range"])]
    pub preset: Option<Preset>,
    /// Number of samples.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SectionArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub line: LineArgs,
    /// Use continued exact zeros instead of the model.
    #[arg(long)]
    pub exact: bool,
    /// Joint-degeneracy tolerance relative to the section's scale
    /// (default: 1e-8 for the model, 1e-3 for exact zeros).
    #[arg(long)]
    pub tol_joint: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrackTols {
    /// Tracking window half-side as a multiple of the previous gap.
    #[arg(long, default_value_t = 10.0)]
    pub tol_region: f64,
    /// Motion above this multiple of the median step triggers the guard.
    #[arg(long, default_value_t = 5.0)]
    pub tol_guard: f64,
    #[command(flatten)]
    pub zeros: ZeroTols,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub line: LineArgs,
    #[command(flatten)]
    pub track: TrackTols,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LoopArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub model: PathBuf,
    /// Loop radius in parameter space.
    #[arg(long, default_value_t = 1e-3)]
    pub radius: f64,
    /// Loop centre as an offset ξ1,ξ2 from the exceptional point.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0,0")]
    pub center: (f64, f64),
    /// Steps per turn.
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub turns: usize,
    #[command(flatten)]
    pub track: TrackTols,
}

fn numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!(
            "expected {n} comma-separated numbers, got {}",
            v.len()
        ));
    }
    Ok(v)
}

fn parse_region(s: &str) -> Result<[f64; 4], String> {
    let v = numbers(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = numbers(s, 2)?;
    Ok((v[0], v[1]))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("thread pool: {e}");
        }
    }
    let result = match &cli.command {
        Command::Poles(a) => commands::poles(a),
        Command::FindEp(a) => commands::find_ep(a),
        Command::Section(a) => commands::section(a),
        Command::Trace(a) => commands::trace(a),
        Command::Loop(a) => commands::run_loop(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            f.exit_code()
        }
    }
}
