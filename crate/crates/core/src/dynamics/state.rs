use num_complex::Complex64;
use rayon::prelude::*;

use super::problem::IsingProblem;
use crate::error::{Error, Result};

/// Largest qubit count the state-vector routines accept.
pub const MAX_QUBITS: usize = 24;

/// Below this dimension the Hamiltonian is applied on the calling thread.
const PARALLEL_DIM: usize = 1 << 12;
const CHUNK: usize = 1 << 10;

pub(crate) fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("state needs at least one qubit".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::SizeCap { what: "qubit count", size: n, cap: MAX_QUBITS });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_size(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: amplitudes.len() });
        }
        Ok(Self { n, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_size(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities in basis-index order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()
    }

    /// Euclidean distance `‖self − other‖₂`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn normalize(&mut self) {
        let scale = 1.0 / self.norm_sqr().sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= scale);
    }
}

/// `|+⟩^⊗n`, the ground state of `H_mixing = −Σ σ_x`.
pub fn mixer_ground_state(n: usize) -> Result<StateVector> {
    check_size(n)?;
    let amp = Complex64::new((1usize << n) as f64, 0.0).sqrt().inv();
    Ok(StateVector { n, amplitudes: vec![amp; 1 << n] })
}

/// Writes `out[x] = b·E[x]·ψ[x] − a·Σ_k ψ[x ⊕ 2^k]`.
pub(crate) fn apply_into(diagonal: &[f64], n: usize, a: f64, b: f64, psi: &[Complex64], out: &mut [Complex64]) {
    let row = |x: usize| {
        let mut flip = Complex64::new(0.0, 0.0);
        for k in 0..n {
            flip += psi[x ^ (1 << k)];
        }
        psi[x] * (b * diagonal[x]) - flip * a
    };
    if psi.len() >= PARALLEL_DIM {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (offset, slot) in chunk.iter_mut().enumerate() {
                *slot = row(base + offset);
            }
        });
    } else {
        for (x, slot) in out.iter_mut().enumerate() {
            *slot = row(x);
        }
    }
}

/// `(a·H_mixing + b·H_problem)|ψ⟩`, matrix-free.
pub fn apply_hamiltonian(problem: &IsingProblem, a: f64, b: f64, psi: &StateVector) -> Result<StateVector> {
    if psi.n != problem.n() {
        return Err(Error::DimensionMismatch { expected: problem.n(), found: psi.n });
    }
    let diagonal = problem.diagonal();
    let mut out = vec![Complex64::new(0.0, 0.0); psi.amplitudes.len()];
    apply_into(&diagonal, psi.n, a, b, &psi.amplitudes, &mut out);
    Ok(StateVector { n: psi.n, amplitudes: out })
}
