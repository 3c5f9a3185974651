use super::dqa_sample;
use super::exact::exact_boltzmann_sample;
use super::gibbs::{gibbs_rbm_sample, PcdChain};
use super::mock::noisy_mock_sample;
use super::remote::{remote_submit, RemoteParams};
use super::sample_set::SampleSet;
use crate::dynamics::IsingProblem;
use crate::error::{Error, Result};
use crate::rbm::Rbm;
use crate::rng::derive_seed;
use crate::schedule::Schedule;

/// What a backend is asked to sample.
#[derive(Debug, Clone, Copy)]
pub enum SampleTarget<'a> {
    /// An energy model; annealer backends fix the temperature themselves.
    Ising(&'a IsingProblem),
    /// A bipartite model at inverse temperature `beta`.
    Rbm { rbm: &'a Rbm, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    /// Independent draws from a physical or simulated anneal of an Ising problem.
    Annealer,
    /// A persistent Markov chain over the bipartite model.
    MarkovChain,
}

pub trait Sampler {
    fn name(&self) -> &'static str;

    fn kind(&self) -> BackendKind;

    /// `count` configurations of the target; for bipartite targets each
    /// record is `(v, h)`, visible first.
    fn sample(&mut self, target: SampleTarget<'_>, count: usize, seed: u64) -> Result<SampleSet>;
}

fn unsupported(backend: &'static str, target: &'static str) -> Error {
    Error::UnsupportedTarget { backend, target }
}

/// Annealer backends sample a bipartite model through its Ising form.
fn ising_of(target: SampleTarget<'_>) -> IsingProblem {
    match target {
        SampleTarget::Ising(p) => p.clone(),
        SampleTarget::Rbm { rbm, .. } => rbm.to_ising(),
    }
}

/// Born-rule samples of the simulated anneal.
#[derive(Debug, Clone)]
pub struct DqaSampler {
    pub schedule: Schedule,
    pub steps_per_unit_time: usize,
}

impl Sampler for DqaSampler {
    fn name(&self) -> &'static str {
        "dqa"
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Annealer
    }

    fn sample(&mut self, target: SampleTarget<'_>, count: usize, seed: u64) -> Result<SampleSet> {
        dqa_sample(&ising_of(target), &self.schedule, count, seed, self.steps_per_unit_time)
    }
}

/// I.i.d. draws from the exact Boltzmann distribution at a fixed `beta`.
#[derive(Debug, Clone)]
pub struct ExactSampler {
    pub beta: f64,
}

impl Sampler for ExactSampler {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Annealer
    }

    fn sample(&mut self, target: SampleTarget<'_>, count: usize, seed: u64) -> Result<SampleSet> {
        exact_boltzmann_sample(&ising_of(target), self.beta, count, seed)
    }
}

/// Hardware stand-in running `alpha_true` times colder than the schedule implies.
#[derive(Debug, Clone)]
pub struct NoisyMockSampler {
    pub schedule: Schedule,
    pub alpha_true: f64,
}

impl Sampler for NoisyMockSampler {
    fn name(&self) -> &'static str {
        "mock"
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Annealer
    }

    fn sample(&mut self, target: SampleTarget<'_>, count: usize, seed: u64) -> Result<SampleSet> {
        noisy_mock_sample(&ising_of(target), &self.schedule, self.alpha_true, count, seed)
    }
}

/// Persistent-chain block Gibbs; the chain is created on first use and kept
/// across calls.
#[derive(Debug, Clone)]
pub struct PcdSampler {
    pub k_steps: usize,
    chain: Option<PcdChain>,
    calls: u64,
}

impl PcdSampler {
    pub fn new(k_steps: usize) -> Self {
        Self { k_steps, chain: None, calls: 0 }
    }

    pub fn chain(&self) -> Option<&PcdChain> {
        self.chain.as_ref()
    }
}

impl Sampler for PcdSampler {
    fn name(&self) -> &'static str {
        "pcd"
    }

    fn kind(&self) -> BackendKind {
        BackendKind::MarkovChain
    }

    fn sample(&mut self, target: SampleTarget<'_>, count: usize, seed: u64) -> Result<SampleSet> {
        let SampleTarget::Rbm { rbm, beta } = target else {
            return Err(unsupported(self.name(), "ising problem"));
        };
        let chain = self
            .chain
            .get_or_insert_with(|| PcdChain::new(rbm.n_visible(), rbm.n_hidden(), derive_seed(seed, u64::MAX)));
        self.calls += 1;
        gibbs_rbm_sample(rbm, beta, count, self.k_steps, chain, derive_seed(seed, self.calls))
    }
}

/// Forwards Ising problems to a remote service.
#[derive(Debug, Clone)]
pub struct RemoteSampler {
    /// Falls back to `ANNEAL_ENDPOINT` when unset.
    pub endpoint: Option<String>,
    pub anneal_time: f64,
    pub rescale_alpha: f64,
}

impl Sampler for RemoteSampler {
    fn name(&self) -> &'static str {
        "remote"
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Annealer
    }

    fn sample(&mut self, target: SampleTarget<'_>, count: usize, _seed: u64) -> Result<SampleSet> {
        let params =
            RemoteParams { anneal_time: self.anneal_time, num_reads: count, rescale_alpha: self.rescale_alpha };
        remote_submit(self.endpoint.as_deref(), &ising_of(target), &params)
    }
}
