use rand::Rng as _;

use super::sample_set::SampleSet;
use crate::dynamics::{IsingProblem, StateVector};
use crate::error::{Error, Result};
use crate::rng;

/// Largest spin count accepted by the enumeration routines.
pub const MAX_ENUMERATION_SPINS: usize = 20;

/// Boltzmann distribution of an Ising problem by full enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub n: usize,
    pub beta: f64,
    pub energies: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub log_partition: f64,
}

pub(crate) fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_SPINS {
        Err(Error::SizeCap { what: "enumeration", size: n, cap: MAX_ENUMERATION_SPINS })
    } else {
        Ok(())
    }
}

/// `log Σ exp(x)` with the maximum shifted out.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.into_iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

pub fn exact_boltzmann(problem: &IsingProblem, beta: f64) -> Result<ExactDistribution> {
    check_enumerable(problem.n())?;
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be finite, got {beta}")));
    }
    let energies = problem.diagonal();
    let log_partition = log_sum_exp(energies.iter().map(|e| -beta * e));
    let probabilities = energies.iter().map(|e| (-beta * e - log_partition).exp()).collect();
    Ok(ExactDistribution { n: problem.n(), beta, energies, probabilities, log_partition })
}

/// Inverse-CDF sampler over a finite discrete distribution.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl InverseCdf {
    /// Weights need not be normalized; at least one must be positive.
    pub fn new(weights: &[f64]) -> Result<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|&w| {
                acc += w.max(0.0);
                acc
            })
            .collect();
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::InvalidArgument("distribution has no positive mass".into()));
        }
        let last_positive = weights.iter().rposition(|&w| w > 0.0).expect("positive mass");
        Ok(Self { cumulative, last_positive })
    }

    pub fn draw(&self, rng: &mut rng::Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        // u can round up to the total
        idx.min(self.last_positive)
    }

    /// Dense per-index counts of `count` independent draws.
    pub fn draw_counts(&self, count: usize, seed: u64) -> Vec<u64> {
        let mut rng = rng::seeded(seed);
        let mut counts = vec![0u64; self.cumulative.len()];
        for _ in 0..count {
            counts[self.draw(&mut rng)] += 1;
        }
        counts
    }
}

pub fn exact_boltzmann_sample(problem: &IsingProblem, beta: f64, count: usize, seed: u64) -> Result<SampleSet> {
    let dist = exact_boltzmann(problem, beta)?;
    sample_distribution(&dist, count, seed)
}

pub(crate) fn sample_distribution(dist: &ExactDistribution, count: usize, seed: u64) -> Result<SampleSet> {
    if count == 0 {
        return Ok(SampleSet::empty(dist.n));
    }
    let cdf = InverseCdf::new(&dist.probabilities)?;
    Ok(SampleSet::from_index_counts(dist.n, &cdf.draw_counts(count, seed)))
}

/// Independent Born-rule measurements of `state` in the computational basis.
pub fn born_sample(state: &StateVector, count: usize, seed: u64) -> Result<SampleSet> {
    if count == 0 {
        return Ok(SampleSet::empty(state.n()));
    }
    let cdf = InverseCdf::new(&state.probabilities())?;
    Ok(SampleSet::from_index_counts(state.n(), &cdf.draw_counts(count, seed)))
}
