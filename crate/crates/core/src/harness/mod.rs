//! Experiment runner behind the `ngt` binary.
//!
//! One experiment per invocation. Every run writes its CSV artifacts and then
//! `report.json`, each atomically, into the output directory.

pub mod config;
pub mod experiments;
pub mod report;

use std::fs;
use std::io;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use thiserror::Error;

pub use config::{ConfigError, Experiment, ResolvedConfig};
pub use report::{Check, Report, RunInfo};

use crate::io::write_atomic;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Module(#[from] crate::Error),
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Runs the experiment in memory and assembles its report.
pub fn run(cfg: &ResolvedConfig) -> Result<(Report, Vec<experiments::Artifact>), HarnessError> {
    let start = Instant::now();
    let outcome = experiments::execute(cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut timing = Vec::new();
    if let Some(limit) = experiments::time_limit(cfg.experiment) {
        timing.push(Check::less("elapsed_secs", elapsed, limit));
    }
    let timestamp_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let report = Report {
        schema_version: report::SCHEMA_VERSION,
        experiment: cfg.experiment.to_string(),
        claim: cfg.experiment.claim().to_string(),
        config: cfg.clone(),
        passed: outcome.checks.iter().all(|c| c.passed),
        checks: outcome.checks,
        results: outcome.results,
        artifacts: outcome.artifacts.iter().map(|a| a.name.clone()).collect(),
        run: RunInfo {
            timestamp_unix,
            elapsed_secs: elapsed,
            passed: timing.iter().all(|c| c.passed),
            checks: timing,
        },
    };
    Ok((report, outcome.artifacts))
}

/// Runs the experiment and writes everything under `out_dir`.
pub fn run_to_dir(cfg: &ResolvedConfig, out_dir: &Path) -> Result<Report, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let (report, artifacts) = run(cfg)?;
    for a in &artifacts {
        write_atomic(&out_dir.join(&a.name), &a.bytes)?;
    }
    let json = serde_json::to_vec_pretty(&report).map_err(io::Error::other)?;
    write_atomic(&out_dir.join("report.json"), &json)?;
    Ok(report)
}

pub fn exit_code(result: &Result<Report, HarnessError>) -> i32 {
    match result {
        Ok(r) if r.all_passed() => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(_) => EXIT_ERROR,
    }
}
