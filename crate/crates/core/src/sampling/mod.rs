//! Sample sources behind one [`Sampler`] contract.

mod backend;
mod exact;
mod gibbs;
mod mock;
mod remote;
mod sample_set;

pub use backend::{
    BackendKind, DqaSampler, ExactSampler, NoisyMockSampler, PcdSampler, RemoteSampler, SampleTarget, Sampler,
};
pub(crate) use exact::check_enumerable;
pub use exact::{
    born_sample, exact_boltzmann, exact_boltzmann_sample, log_sum_exp, ExactDistribution, InverseCdf,
    MAX_ENUMERATION_SPINS,
};
pub use gibbs::{burn_in, gibbs_rbm_sample, PcdChain};
pub use mock::{noisy_mock_distribution, noisy_mock_sample};
pub use remote::{parse_response, remote_submit, resolve_endpoint, RemoteParams, ENDPOINT_ENV};
pub use sample_set::{total_variation, SampleCounter, SampleRecord, SampleSet};

use crate::dynamics::{evolve_continuous, IsingProblem};
use crate::error::Result;
use crate::schedule::Schedule;

/// Evolve once under `schedule`, then take `count` independent Born-rule
/// measurements of the final state.
pub fn dqa_sample(
    problem: &IsingProblem,
    schedule: &Schedule,
    count: usize,
    seed: u64,
    steps_per_unit_time: usize,
) -> Result<SampleSet> {
    let state = evolve_continuous(problem, schedule, steps_per_unit_time)?;
    born_sample(&state, count, seed)
}
