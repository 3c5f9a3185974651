//! Phenomenological stand-in for annealing hardware whose outcome
//! distribution is Boltzmann at `alpha_true` times the intended inverse
//! temperature.

use super::exact::{exact_boltzmann, sample_distribution, ExactDistribution};
use super::sample_set::SampleSet;
use crate::beta::beta_integral;
use crate::dynamics::IsingProblem;
use crate::error::{Error, Result};
use crate::schedule::Schedule;

fn check_alpha(alpha_true: f64) -> Result<()> {
    if alpha_true > 0.0 && alpha_true.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveAlpha(alpha_true))
    }
}

/// Exact outcome distribution of the mock: Boltzmann at `alpha_true · β_integral(schedule)`.
pub fn noisy_mock_distribution(
    problem: &IsingProblem,
    schedule: &Schedule,
    alpha_true: f64,
) -> Result<ExactDistribution> {
    check_alpha(alpha_true)?;
    let beta_sim = beta_integral(schedule)?.beta;
    exact_boltzmann(problem, alpha_true * beta_sim)
}

pub fn noisy_mock_sample(
    problem: &IsingProblem,
    schedule: &Schedule,
    alpha_true: f64,
    count: usize,
    seed: u64,
) -> Result<SampleSet> {
    let dist = noisy_mock_distribution(problem, schedule, alpha_true)?;
    sample_distribution(&dist, count, seed)
}
