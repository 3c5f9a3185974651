mod beta;
mod calibrate;
mod gen_data;
mod sample;
mod train;

use std::path::{Path, PathBuf};

use dqa_core::beta::BetaMethod;
use dqa_core::sampling::{DqaSampler, ExactSampler, NoisyMockSampler, PcdSampler, RemoteSampler};
use dqa_core::thermometry::{estimate_beta_single_spin, fit_beta_regression, LineFit};
use dqa_core::{BetaEstimate, IsingProblem, SampleSet, Sampler, Schedule};
use serde::Serialize;

pub use beta::cmd_beta;
pub use calibrate::cmd_calibrate;
pub use gen_data::cmd_gen_data;
pub use sample::cmd_sample;
pub use train::cmd_train;

use crate::config::RunConfig;
use crate::error::{usage, CliResult, OrUsage};

pub const BACKENDS: [&str; 5] = ["dqa", "exact", "mock", "pcd", "remote"];

pub fn check_backend(cfg: &RunConfig) -> CliResult<()> {
    if BACKENDS.contains(&cfg.backend.name.as_str()) {
        Ok(())
    } else {
        Err(usage(format!("unknown backend '{}' (expected one of {})", cfg.backend.name, BACKENDS.join(", "))))
    }
}

/// Whether the configured backend anneals under a schedule.
pub fn needs_schedule(cfg: &RunConfig) -> bool {
    matches!(cfg.backend.name.as_str(), "dqa" | "mock" | "remote")
}

pub fn build_sampler(cfg: &RunConfig, schedule: Option<&Schedule>, rescale_alpha: f64) -> CliResult<Box<dyn Sampler>> {
    check_backend(cfg)?;
    let b = &cfg.backend;
    let schedule = || schedule.cloned().ok_or_else(|| usage(format!("backend '{}' needs a schedule", b.name)));
    Ok(match b.name.as_str() {
        "dqa" => Box::new(DqaSampler { schedule: schedule()?, steps_per_unit_time: b.steps_per_unit_time }),
        "exact" => Box::new(ExactSampler { beta: b.beta }),
        "mock" => Box::new(NoisyMockSampler { schedule: schedule()?, alpha_true: b.alpha_true }),
        "pcd" => Box::new(PcdSampler::new(b.k)),
        _ => Box::new(RemoteSampler { endpoint: b.endpoint.clone(), anneal_time: schedule()?.tau(), rescale_alpha }),
    })
}

pub fn load_problem(path: Option<&Path>) -> CliResult<IsingProblem> {
    let path = path.ok_or_else(|| usage("an Ising problem file is required (--problem)"))?;
    let text = std::fs::read_to_string(path).or_usage(&format!("problem file {}", path.display()))?;
    serde_json::from_str(&text).or_usage(&format!("problem file {}", path.display()))
}

/// Thermometry result as written to report files.
#[derive(Debug, Clone, Serialize)]
pub struct BetaReport {
    pub estimate: BetaEstimate,
    /// Normal 95% interval.
    pub ci95: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl From<LineFit> for FitSummary {
    fn from(f: LineFit) -> Self {
        Self { slope: f.slope, intercept: f.intercept, r_squared: f.r_squared, points: f.points }
    }
}

/// Two-level estimate for one spin, regression otherwise. A problem whose
/// energy is constant has no temperature to measure and reports zero.
pub fn measure_beta(samples: &SampleSet, problem: &IsingProblem, min_count: u64) -> dqa_core::Result<BetaReport> {
    let flat = problem.couplings().iter().all(|c| c.value == 0.0) && problem.fields().iter().all(|f| f.h == 0.0);
    if flat {
        return Ok(BetaReport {
            estimate: BetaEstimate::exact(0.0, BetaMethod::Empirical),
            ci95: [0.0, 0.0],
            fit: None,
            note: Some("every configuration has the same energy; beta is reported as 0".into()),
        });
    }
    let (estimate, fit) = if problem.n() == 1 {
        (estimate_beta_single_spin(samples, problem)?, None)
    } else {
        let report = fit_beta_regression(samples, problem, min_count)?;
        (report.estimate, Some(report.fit.into()))
    };
    let half = 1.96 * estimate.stderr;
    Ok(BetaReport { estimate, ci95: [estimate.beta - half, estimate.beta + half], fit, note: None })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(dqa_core::Error::from)?;
    write_text(path, &(text + "\n"))
}

/// `samples.json` → `samples.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn io_error(path: &Path, source: std::io::Error) -> crate::error::CliError {
    dqa_core::Error::Io { path: path.into(), source }.into()
}
