//! Boltzmann sampling by simulated diabatic quantum annealing.
//!
//! A schedule `A(t), B(t)` drives `H(t) = A(t)·H_mix + B(t)·H_prob` from the
//! mixer ground state; for short or weak anneals the measured outcomes are
//! close to Boltzmann at an inverse temperature fixed by the schedule alone
//! ([`beta::beta_integral`]). The crate simulates those anneals, measures the
//! effective temperature of any sample source, calibrates it, and trains
//! restricted Boltzmann machines on the samples.

pub mod beta;
pub mod datasets;
pub mod dynamics;
pub mod error;
pub mod rbm;
pub mod rng;
pub mod sampling;
pub mod schedule;
pub mod thermometry;

pub use beta::{beta_integral, beta_integral_constant, solve_tau_for_beta, BetaEstimate, BetaMethod};
pub use dynamics::{IsingProblem, StateVector};
pub use error::{Error, Result};
pub use rbm::Rbm;
pub use sampling::{SampleSet, Sampler};
pub use schedule::Schedule;
