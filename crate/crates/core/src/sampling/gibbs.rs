//! Block Gibbs sampling of the bipartite model.
//!
//! With `E(v, h) = −Σ_ij v_i J_ij h_j`, fixing `v` leaves the hidden units
//! independent with `p(h_j) ∝ exp(β m_j h_j)`, `m_j = Σ_i v_i J_ij`, so
//!
//! ```text
//! p(h_j = +1 | v) = e^{βm_j} / (e^{βm_j} + e^{−βm_j}) = logistic(2β m_j)
//! ```
//!
//! and symmetrically `p(v_i = +1 | h) = logistic(2β Σ_j J_ij h_j)`.

use rand::Rng as _;

use super::sample_set::{SampleCounter, SampleSet};
use crate::error::{Error, Result};
use crate::rbm::{logistic, Rbm};
use crate::rng;

/// Persistent chain state; created once and advanced across calls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcdChain {
    v: Vec<i8>,
    h: Vec<i8>,
}

fn draw_spin(rng: &mut rng::Rng, p_up: f64) -> i8 {
    if rng.random::<f64>() < p_up {
        1
    } else {
        -1
    }
}

impl PcdChain {
    /// Chain with uniformly random hidden (and visible) units.
    pub fn new(n_visible: usize, n_hidden: usize, seed: u64) -> Self {
        let mut rng = rng::seeded(seed);
        let h = (0..n_hidden).map(|_| draw_spin(&mut rng, 0.5)).collect();
        let v = (0..n_visible).map(|_| draw_spin(&mut rng, 0.5)).collect();
        Self { v, h }
    }

    pub fn visible(&self) -> &[i8] {
        &self.v
    }

    pub fn hidden(&self) -> &[i8] {
        &self.h
    }

    fn check(&self, rbm: &Rbm) -> Result<()> {
        if self.v.len() != rbm.n_visible() {
            return Err(Error::DimensionMismatch { expected: rbm.n_visible(), found: self.v.len() });
        }
        if self.h.len() != rbm.n_hidden() {
            return Err(Error::DimensionMismatch { expected: rbm.n_hidden(), found: self.h.len() });
        }
        Ok(())
    }

    /// One block sweep: visible from hidden, then hidden from visible.
    pub(crate) fn sweep(&mut self, rbm: &Rbm, beta: f64, rng: &mut rng::Rng) {
        let weights = rbm.weights();
        for (i, vi) in self.v.iter_mut().enumerate() {
            let field: f64 = weights.row(i).iter().zip(&self.h).map(|(w, &hj)| w * f64::from(hj)).sum();
            *vi = draw_spin(rng, logistic(2.0 * beta * field));
        }
        let m = rbm.hidden_field(&self.v);
        for (hj, mj) in self.h.iter_mut().zip(m) {
            *hj = draw_spin(rng, logistic(2.0 * beta * mj));
        }
    }
}

/// `n_samples` records of `(v, h)` (visible first), one every `k_steps`
/// sweeps, advancing `chain` in place.
pub fn gibbs_rbm_sample(
    rbm: &Rbm,
    beta: f64,
    n_samples: usize,
    k_steps: usize,
    chain: &mut PcdChain,
    seed: u64,
) -> Result<SampleSet> {
    if k_steps == 0 {
        return Err(Error::InvalidArgument("k_steps must be at least 1".into()));
    }
    chain.check(rbm)?;
    let mut rng = rng::seeded(seed);
    let mut counter = SampleCounter::new(rbm.n_visible() + rbm.n_hidden());
    let mut joint = vec![0i8; rbm.n_visible() + rbm.n_hidden()];
    for _ in 0..n_samples {
        for _ in 0..k_steps {
            chain.sweep(rbm, beta, &mut rng);
        }
        joint[..rbm.n_visible()].copy_from_slice(&chain.v);
        joint[rbm.n_visible()..].copy_from_slice(&chain.h);
        counter.add(&joint);
    }
    Ok(counter.finish())
}

/// Advance the chain by `sweeps` without recording.
pub fn burn_in(rbm: &Rbm, beta: f64, sweeps: usize, chain: &mut PcdChain, seed: u64) -> Result<()> {
    chain.check(rbm)?;
    let mut rng = rng::seeded(seed);
    for _ in 0..sweeps {
        chain.sweep(rbm, beta, &mut rng);
    }
    Ok(())
}
