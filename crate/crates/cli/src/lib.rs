//! Batch harness over the core library: generate datasets, synthesize golden
//! videos, inject perturbations, evaluate candidate frame directories, sweep
//! frame budgets, and aggregate reports.

pub mod config;
pub mod dataset;
pub mod evaluate;
pub mod perturb;
pub mod report_cmd;
pub mod svg;
pub mod sweep;
pub mod synthesize;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use fpb_core::video_io::{read_manifest, InstanceManifest, VideoIoError};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, inapplicable modes, malformed config. Exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The run could not complete. Exit code 1.
    #[error("{0}")]
    Run(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    VideoIo(#[from] VideoIoError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn runtime(msg: impl Into<String>) -> CliError {
    CliError::Run(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "fpb",
    version,
    about = "Synthesizes and scores visual-planning benchmark videos"
)]
pub struct Cli {
    /// Master seed; every derived stream is keyed off it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; falls back to FPB_WORKERS, then the CPU count.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Flat key=value file overriding evaluator defaults.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write instance manifests and initial frames.
    Generate(dataset::GenerateArgs),
    /// Render golden solution videos for every manifest under a dataset.
    Synthesize(synthesize::SynthesizeArgs),
    /// Score candidate frame directories against their manifests.
    Evaluate(evaluate::EvaluateArgs),
    /// Write deliberately broken variants of the golden videos.
    Perturb(perturb::PerturbArgs),
    /// Re-synthesize and evaluate across a frame-budget axis.
    Sweep(sweep::SweepArgs),
    /// Merge reports into aggregate tables, histograms, and plots.
    Report(report_cmd::ReportArgs),
}

/// Shared flags resolved once at startup.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub seed: u64,
    pub workers: usize,
    pub config: config::RunConfig,
}

pub fn resolve_workers(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(w) = flag {
        if w == 0 {
            return Err(usage("--workers must be at least 1"));
        }
        return Ok(w);
    }
    if let Ok(env) = std::env::var("FPB_WORKERS") {
        let w: usize = env
            .parse()
            .map_err(|_| usage(format!("FPB_WORKERS must be an integer, got {env:?}")))?;
        if w == 0 {
            return Err(usage("FPB_WORKERS must be at least 1"));
        }
        return Ok(w);
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = RunContext {
        seed: cli.seed,
        workers: resolve_workers(cli.workers)?,
        config: config::RunConfig::load(cli.config.as_deref())?,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.workers)
        .build()
        .map_err(|e| runtime(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Generate(args) => dataset::cmd_generate(&ctx, &args),
        Command::Synthesize(args) => synthesize::cmd_synthesize(&ctx, &args),
        Command::Evaluate(args) => evaluate::cmd_evaluate(&ctx, &args),
        Command::Perturb(args) => perturb::cmd_perturb(&ctx, &args),
        Command::Sweep(args) => sweep::cmd_sweep(&ctx, &args),
        Command::Report(args) => report_cmd::cmd_report(&ctx, &args),
    })
}

/// Directories directly under `dataset` that contain a manifest.json, with
/// the parsed manifests, sorted by instance id.
pub fn load_dataset(dataset: &Path) -> Result<Vec<(PathBuf, InstanceManifest)>, CliError> {
    let mut found = Vec::new();
    let entries = fs::read_dir(dataset)
        .map_err(|e| runtime(format!("dataset dir {}: {e}", dataset.display())))?;
    for entry in entries {
        let dir = entry?.path();
        let manifest_path = dir.join("manifest.json");
        if manifest_path.is_file() {
            let manifest = read_manifest(&manifest_path).map_err(|e| {
                runtime(format!("manifest {}: {e}", manifest_path.display()))
            })?;
            found.push((dir, manifest));
        }
    }
    if found.is_empty() {
        return Err(runtime(format!(
            "no instance directories with manifest.json under {}",
            dataset.display()
        )));
    }
    found.sort_by(|a, b| a.1.instance_id.cmp(&b.1.instance_id));
    Ok(found)
}

/// Golden frame directory for an instance directory.
pub fn golden_dir(instance_dir: &Path) -> PathBuf {
    instance_dir.join("golden")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtStep {
    Step(usize),
    Fraction(f64),
}

impl AtStep {
    /// "12" is an absolute index; "0.5" is a fraction of the range.
    pub fn parse(s: &str) -> Result<AtStep, CliError> {
        if let Ok(n) = s.parse::<usize>() {
            return Ok(AtStep::Step(n));
        }
        let f: f64 = s
            .parse()
            .map_err(|_| usage(format!("--at-step must be an integer or fraction, got {s:?}")))?;
        if !(0.0..=1.0).contains(&f) {
            return Err(usage(format!("--at-step fraction must be in [0,1], got {f}")));
        }
        Ok(AtStep::Fraction(f))
    }

    pub fn resolve(self, len: usize) -> usize {
        match self {
            AtStep::Step(n) => n.min(len),
            AtStep::Fraction(f) => (f * len as f64).round() as usize,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_step_parses_indices_and_fractions() {
        assert_eq!(AtStep::parse("12").unwrap(), AtStep::Step(12));
        assert_eq!(AtStep::parse("0.5").unwrap(), AtStep::Fraction(0.5));
        assert!(AtStep::parse("1.5").is_err());
        assert!(AtStep::parse("x").is_err());
        assert_eq!(AtStep::Fraction(0.5).resolve(18), 9);
        assert_eq!(AtStep::Step(40).resolve(18), 18);
    }

    #[test]
    fn usage_errors_exit_with_code_two() {
        assert_eq!(usage("x").exit_code(), 2);
        assert_eq!(runtime("x").exit_code(), 1);
    }
}
