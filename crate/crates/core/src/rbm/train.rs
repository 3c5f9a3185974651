//! Full-batch training loop over any [`Sampler`].
//!
//! Annealer backends sample the Ising form of the model with every weight
//! divided by `alpha`; Markov-chain backends sample the model itself at
//! `beta_target`. Each epoch then applies `J ← J + η · gradient`.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::gradient::gradient;
use super::model::Rbm;
use super::reconstruct::validation_error;
use crate::datasets::BinaryDataset;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::sampling::{BackendKind, SampleTarget, Sampler};

const SAMPLING_STREAM: u64 = 0x5a4d_504c;
const VALIDATION_STREAM: u64 = 0x5641_4c49;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// `T`.
    pub epochs: usize,
    /// `S`.
    pub samples_per_epoch: usize,
    /// `K`, the sweeps between retained samples of a Markov-chain backend.
    pub gibbs_steps: usize,
    /// `η`.
    pub learning_rate: f64,
    pub beta_target: f64,
    /// Divisor applied to the weights before an annealer samples them.
    pub alpha: f64,
    pub seed: u64,
    /// Name of the sampler the run uses.
    pub backend: String,
    /// Stochastic reconstructions averaged into each validation error.
    pub validation_repeats: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            samples_per_epoch: 3000,
            gibbs_steps: 100,
            learning_rate: 0.05,
            beta_target: 1.0,
            alpha: 1.0,
            seed: 0,
            backend: "pcd".into(),
            validation_repeats: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if self.samples_per_epoch == 0 || self.gibbs_steps == 0 || self.validation_repeats == 0 {
            return bad("samples_per_epoch, gibbs_steps and validation_repeats must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.beta_target.is_finite() && self.beta_target > 0.0) {
            return bad("beta_target must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::NonPositiveAlpha(self.alpha));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub validation_error: f64,
    pub mean_gradient_magnitude: f64,
    /// Seconds spent inside the sampler.
    pub wall_time_sampling: f64,
    pub wall_time_total: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Validation error of the initial model.
    pub initial_validation_error: f64,
    pub records: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn final_validation_error(&self) -> f64 {
        self.records.last().map_or(self.initial_validation_error, |r| r.validation_error)
    }

    /// Total sampler seconds per retained sample.
    pub fn sampling_seconds_per_sample(&self, samples_per_epoch: usize) -> f64 {
        let total: f64 = self.records.iter().map(|r| r.wall_time_sampling).sum();
        total / (self.records.len() * samples_per_epoch).max(1) as f64
    }
}

/// A run that stopped early, with everything completed before the failure.
#[derive(Debug)]
pub struct TrainAbort {
    pub error: Error,
    pub rbm: Rbm,
    pub history: TrainHistory,
}

impl fmt::Display for TrainAbort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "training stopped after {} epoch(s): {}", self.history.records.len(), self.error)
    }
}

impl std::error::Error for TrainAbort {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

fn mean_validation_error(rbm: &Rbm, validation: &BinaryDataset, config: &TrainConfig) -> Result<f64> {
    let base = derive_seed(config.seed, VALIDATION_STREAM);
    let mut sum = 0.0;
    for r in 0..config.validation_repeats {
        sum += validation_error(rbm, validation, config.beta_target, derive_seed(base, r as u64))?;
    }
    Ok(sum / config.validation_repeats as f64)
}

fn mean_magnitude(rbm: &Rbm, g: &ndarray::Array2<f64>) -> f64 {
    let (sum, n) =
        g.iter().zip(rbm.mask().iter()).filter(|(_, &m)| m).fold((0.0, 0usize), |(s, n), (x, _)| (s + x.abs(), n + 1));
    sum / n.max(1) as f64
}

pub fn train(
    rbm: Rbm,
    data: &BinaryDataset,
    config: &TrainConfig,
    sampler: &mut dyn Sampler,
    validation: &BinaryDataset,
) -> std::result::Result<(Rbm, TrainHistory), TrainAbort> {
    let mut history = TrainHistory::default();
    let setup = (|| {
        config.validate()?;
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if data.n_units() != rbm.n_visible() {
            return Err(Error::DimensionMismatch { expected: rbm.n_visible(), found: data.n_units() });
        }
        let batch = data.to_sample_set();
        let initial = mean_validation_error(&rbm, validation, config)?;
        Ok((batch, initial))
    })();
    let (batch, initial) = match setup {
        Ok(v) => v,
        Err(error) => return Err(TrainAbort { error, rbm, history }),
    };
    history.initial_validation_error = initial;

    let mut rbm = rbm;
    let sampling_base = derive_seed(config.seed, SAMPLING_STREAM);
    for epoch in 1..=config.epochs {
        let step = (|| {
            let started = Instant::now();
            let seed = derive_seed(sampling_base, epoch as u64);
            let samples = match sampler.kind() {
                BackendKind::Annealer => {
                    let problem = rbm.rescaled(config.alpha).to_ising();
                    sampler.sample(SampleTarget::Ising(&problem), config.samples_per_epoch, seed)?
                }
                BackendKind::MarkovChain => sampler.sample(
                    SampleTarget::Rbm { rbm: &rbm, beta: config.beta_target },
                    config.samples_per_epoch,
                    seed,
                )?,
            };
            let wall_time_sampling = started.elapsed().as_secs_f64();
            let g = gradient(&rbm, &batch, &samples, config.beta_target)?;
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteGradient { epoch });
            }
            let mut next = rbm.clone();
            next.apply_update(&g, config.learning_rate)?;
            if next.weights().iter().any(|w| !w.is_finite()) {
                return Err(Error::NonFiniteGradient { epoch });
            }
            let validation_error = mean_validation_error(&next, validation, config)?;
            let record = EpochRecord {
                epoch,
                validation_error,
                mean_gradient_magnitude: mean_magnitude(&rbm, &g),
                wall_time_sampling,
                wall_time_total: started.elapsed().as_secs_f64(),
            };
            Ok((next, record))
        })();
        match step {
            Ok((next, record)) => {
                rbm = next;
                history.records.push(record);
            }
            Err(error) => return Err(TrainAbort { error, rbm, history }),
        }
    }
    Ok((rbm, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::bars_and_stripes;
    use crate::rbm::exact_log_likelihood;
    use crate::sampling::{ExactSampler, PcdSampler, SampleSet};

    fn config(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            samples_per_epoch: 5000,
            gibbs_steps: 1,
            learning_rate: 0.05,
            beta_target: 1.0,
            alpha: 1.0,
            seed: 3,
            backend: "exact".into(),
            validation_repeats: 1,
        }
    }

    #[test]
    fn zero_epochs_leave_model_unchanged() {
        let data = bars_and_stripes(2, 2).unwrap();
        let rbm = Rbm::random(4, 3, None, 1).unwrap();
        let (out, history) = train(rbm.clone(), &data, &config(0), &mut ExactSampler { beta: 1.0 }, &data).unwrap();
        assert_eq!(out, rbm);
        assert!(history.records.is_empty());
    }

    #[test]
    fn exact_backend_increases_likelihood() {
        let data = bars_and_stripes(2, 2).unwrap();
        let batch = data.to_sample_set();
        let mut rbm = Rbm::random(4, 3, None, 1).unwrap();
        let mut cfg = config(1);
        let mut sampler = ExactSampler { beta: 1.0 };
        let mut ll = vec![exact_log_likelihood(&rbm, &batch, 1.0).unwrap()];
        for epoch in 0..50u64 {
            cfg.seed = epoch;
            let (next, history) = train(rbm, &data, &cfg, &mut sampler, &data).unwrap();
            assert_eq!(history.records.len(), 1);
            rbm = next;
            ll.push(exact_log_likelihood(&rbm, &batch, 1.0).unwrap());
        }
        for w in ll[..11].windows(2) {
            assert!(w[1] > w[0], "{ll:?}");
        }
        assert!(ll[50] > ll[0]);
    }

    #[test]
    fn history_and_determinism() {
        let data = bars_and_stripes(2, 2).unwrap();
        let rbm = Rbm::random(4, 3, None, 1).unwrap();
        let mut cfg = config(5);
        cfg.backend = "pcd".into();
        let (a, ha) = train(rbm.clone(), &data, &cfg, &mut PcdSampler::new(1), &data).unwrap();
        let (b, hb) = train(rbm, &data, &cfg, &mut PcdSampler::new(1), &data).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha.records.len(), 5);
        for (x, y) in ha.records.iter().zip(&hb.records) {
            assert_eq!(x.validation_error, y.validation_error);
            assert_eq!(x.mean_gradient_magnitude, y.mean_gradient_magnitude);
        }
    }

    struct Failing {
        after: usize,
    }

    impl Sampler for Failing {
        fn name(&self) -> &'static str {
            "failing"
        }
        fn kind(&self) -> BackendKind {
            BackendKind::Annealer
        }
        fn sample(&mut self, target: SampleTarget<'_>, count: usize, seed: u64) -> Result<SampleSet> {
            if self.after == 0 {
                return Err(Error::Unreachable("gone".into()));
            }
            self.after -= 1;
            ExactSampler { beta: 1.0 }.sample(target, count, seed)
        }
    }

    #[test]
    fn backend_failure_keeps_partial_history() {
        let data = bars_and_stripes(2, 2).unwrap();
        let rbm = Rbm::random(4, 3, None, 1).unwrap();
        let abort = train(rbm, &data, &config(10), &mut Failing { after: 3 }, &data).unwrap_err();
        assert_eq!(abort.history.records.len(), 3);
        assert!(matches!(abort.error, Error::Unreachable(_)));
    }

    #[test]
    fn huge_step_aborts() {
        let data = bars_and_stripes(2, 2).unwrap();
        let rbm = Rbm::random(4, 3, None, 1).unwrap();
        let mut cfg = config(3);
        cfg.learning_rate = f64::MAX;
        let abort = train(rbm, &data, &cfg, &mut ExactSampler { beta: 1.0 }, &data).unwrap_err();
        let Error::NonFiniteGradient { epoch } = abort.error else {
            panic!("{:?}", abort.error);
        };
        assert_eq!(abort.history.records.len(), epoch - 1);
        assert!(abort.rbm.weights().iter().all(|w| w.is_finite()));
    }
}
