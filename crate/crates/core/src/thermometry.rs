//! Effective inverse temperature from sample counts, and the calibration
//! factor `α = β_empirical / β_reference` that realigns a sampler running at
//! the wrong temperature.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::beta::{BetaEstimate, BetaMethod};
use crate::dynamics::IsingProblem;
use crate::error::{Error, Result};
use crate::sampling::SampleSet;

/// Smallest count a configuration needs to enter the regression.
pub const DEFAULT_MIN_COUNT: u64 = 20;

/// Weighted least-squares line `y ≈ intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// `Σ w (x − x̄)²`.
    pub sxx: f64,
    /// `Σ w r² / (N − 2)`; zero when `N = 2`.
    pub residual_variance: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl LineFit {
    /// Slope standard error with the weights read as inverse variances,
    /// inflated by the residual variance when that exceeds one.
    pub fn slope_stderr(&self) -> f64 {
        (self.residual_variance.max(1.0) / self.sxx).sqrt()
    }
}

pub fn weighted_line_fit(xs: &[f64], ys: &[f64], ws: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() != ws.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len().min(ws.len()) });
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} point(s); a line needs at least 2", xs.len())));
    }
    let w_sum: f64 = ws.iter().sum();
    if !(w_sum > 0.0) {
        return Err(Error::DegenerateFit("weights sum to zero".into()));
    }
    let x_bar = xs.iter().zip(ws).map(|(x, w)| w * x).sum::<f64>() / w_sum;
    let y_bar = ys.iter().zip(ws).map(|(y, w)| w * y).sum::<f64>() / w_sum;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for ((x, y), w) in xs.iter().zip(ys).zip(ws) {
        let (dx, dy) = (x - x_bar, y - y_bar);
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    // relative to the spread of x, so rounding noise in equal energies is caught
    let x_scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    if sxx <= 1e-24 * w_sum * x_scale * x_scale {
        return Err(Error::DegenerateFit("all points share one x value".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .zip(ws)
        .map(|((x, y), w)| {
            let r = y - intercept - slope * x;
            w * r * r
        })
        .sum();
    let points = xs.len();
    let residual_variance = if points > 2 { ss_res / (points - 2) as f64 } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LineFit { slope, intercept, sxx, residual_variance, r_squared, points })
}

/// `β = ln(c₀/c₁)/(e1 − e0)` from the counts of the ground configuration
/// `ground` and its flip, with delta-method standard error
/// `sqrt(1/c₀ + 1/c₁)/(e1 − e0)`.
pub fn estimate_beta_two_level(samples: &SampleSet, ground: i8, e0: f64, e1: f64) -> Result<BetaEstimate> {
    if samples.n() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: samples.n() });
    }
    if ground != 1 && ground != -1 {
        return Err(Error::InvalidArgument("ground spin must be +1 or -1".into()));
    }
    let gap = e1 - e0;
    if !(gap > 0.0) {
        return Err(Error::InvalidArgument(format!("excited energy {e1} must exceed ground energy {e0}")));
    }
    let c0 = samples.count_of(&[ground]);
    let c1 = samples.count_of(&[-ground]);
    if c0 == 0 || c1 == 0 {
        return Err(Error::ZeroCount { ground: c0, excited: c1 });
    }
    let (c0, c1) = (c0 as f64, c1 as f64);
    Ok(BetaEstimate {
        beta: (c0 / c1).ln() / gap,
        method: BetaMethod::Empirical,
        stderr: (1.0 / c0 + 1.0 / c1).sqrt() / gap,
    })
}

/// Two-level estimate for a single spin in a field, with the ground state
/// and gap read from the problem.
pub fn estimate_beta_single_spin(samples: &SampleSet, problem: &IsingProblem) -> Result<BetaEstimate> {
    if problem.n() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: problem.n() });
    }
    let (e_up, e_down) = (problem.energy(&[1])?, problem.energy(&[-1])?);
    if e_up == e_down {
        return Err(Error::DegenerateFit("both spin states have the same energy".into()));
    }
    if e_up < e_down {
        estimate_beta_two_level(samples, 1, e_up, e_down)
    } else {
        estimate_beta_two_level(samples, -1, e_down, e_up)
    }
}

/// Regression estimate together with its fit diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionReport {
    pub estimate: BetaEstimate,
    pub fit: LineFit,
}

/// Weighted least squares of `ln(count/total)` against `E(s)` over every
/// configuration seen at least `min_count` times; `β = −slope`.
pub fn fit_beta_regression(samples: &SampleSet, problem: &IsingProblem, min_count: u64) -> Result<RegressionReport> {
    if samples.n() != problem.n() {
        return Err(Error::DimensionMismatch { expected: problem.n(), found: samples.n() });
    }
    if samples.is_empty() {
        return Err(Error::EmptyBatch("samples"));
    }
    let total = samples.total() as f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for r in samples.records().iter().filter(|r| r.count >= min_count.max(1)) {
        xs.push(problem.energy(&r.spins)?);
        ys.push((r.count as f64 / total).ln());
        ws.push(r.count as f64);
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "{} configuration(s) reach the minimum count of {min_count}; at least 2 are needed",
            xs.len()
        )));
    }
    let fit = weighted_line_fit(&xs, &ys, &ws).map_err(|e| match e {
        Error::DegenerateFit(_) => Error::DegenerateFit("all retained configurations share one energy".into()),
        other => other,
    })?;
    let estimate = BetaEstimate { beta: -fit.slope, method: BetaMethod::Empirical, stderr: fit.slope_stderr() };
    Ok(RegressionReport { estimate, fit })
}

pub fn estimate_beta_regression(samples: &SampleSet, problem: &IsingProblem, min_count: u64) -> Result<BetaEstimate> {
    fit_beta_regression(samples, problem, min_count).map(|r| r.estimate)
}

/// Stored outcome of one calibration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub alpha: f64,
    pub beta_empirical: BetaEstimate,
    pub beta_reference: BetaEstimate,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl CalibrationRecord {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let record: Self = serde_json::from_str(&text)?;
        let expected = record.beta_empirical.beta / record.beta_reference.beta;
        if !(record.alpha > 0.0) || (record.alpha - expected).abs() > 1e-12 * expected.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "{}: alpha {} does not equal the beta ratio {expected}",
                path.display(),
                record.alpha
            )));
        }
        Ok(record)
    }
}

pub fn compute_alpha(beta_empirical: BetaEstimate, beta_reference: BetaEstimate) -> Result<CalibrationRecord> {
    if !(beta_reference.beta > 0.0) {
        return Err(Error::NonPositiveReference(beta_reference.beta));
    }
    let alpha = beta_empirical.beta / beta_reference.beta;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(CalibrationRecord { alpha, beta_empirical, beta_reference, timestamp })
}

/// Every coupling and field divided by `alpha`.
pub fn rescale_couplings(problem: &IsingProblem, alpha: f64) -> Result<IsingProblem> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    Ok(problem.divide_values(alpha))
}
