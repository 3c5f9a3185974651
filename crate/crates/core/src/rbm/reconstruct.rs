use rand::Rng as _;

use super::model::{logistic, Rbm};
use crate::datasets::BinaryDataset;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconstructMode {
    /// Sample `h | v`, then `v | h`.
    Stochastic(u64),
    /// Propagate `tanh` means and take signs; a mean of exactly zero maps to +1.
    MeanField,
}

fn sign(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

fn draw(r: &mut rng::Rng, field: f64, beta: f64) -> i8 {
    if r.random::<f64>() < logistic(2.0 * beta * field) {
        1
    } else {
        -1
    }
}

/// One `v → h → v` pass.
pub fn reconstruct(rbm: &Rbm, v: &[i8], beta: f64, mode: ReconstructMode) -> Result<Vec<i8>> {
    if v.len() != rbm.n_visible() {
        return Err(Error::DimensionMismatch { expected: rbm.n_visible(), found: v.len() });
    }
    let m = rbm.hidden_field(v);
    Ok(match mode {
        ReconstructMode::Stochastic(seed) => {
            let mut r = rng::seeded(seed);
            let h: Vec<i8> = m.iter().map(|&mj| draw(&mut r, mj, beta)).collect();
            rbm.visible_field(&h).into_iter().map(|f| draw(&mut r, f, beta)).collect()
        }
        ReconstructMode::MeanField => {
            let h: Vec<f64> = m.iter().map(|mj| (beta * mj).tanh()).collect();
            rbm.weights()
                .rows()
                .into_iter()
                .map(|row| sign((beta * row.iter().zip(&h).map(|(w, hj)| w * hj).sum::<f64>()).tanh()))
                .collect()
        }
    })
}

/// Mean fraction of visible units that a stochastic reconstruction flips.
pub fn validation_error(rbm: &Rbm, validation: &BinaryDataset, beta: f64, seed: u64) -> Result<f64> {
    if validation.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut mismatched = 0usize;
    for (k, v) in validation.items().iter().enumerate() {
        let out = reconstruct(rbm, v, beta, ReconstructMode::Stochastic(rng::derive_seed(seed, k as u64)))?;
        mismatched += v.iter().zip(&out).filter(|(a, b)| a != b).count();
    }
    Ok(mismatched as f64 / (validation.len() * validation.n_units()) as f64)
}
