use ndarray::Array2;
use rand::Rng as _;

use crate::dynamics::{Coupling, IsingProblem};
use crate::error::{Error, Result};
use crate::rng;

/// Half-width of the uniform weight initialization.
pub const INIT_HALF_WIDTH: f64 = 0.1;

/// Bipartite model with energy `E(v, h) = −vᵀ J h` over ±1 units, no biases.
///
/// `mask[i][j] == false` removes edge `(i, j)`; its weight is held at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Rbm {
    weights: Array2<f64>,
    mask: Array2<bool>,
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl Rbm {
    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        Self { weights: Array2::zeros((n_visible, n_hidden)), mask: Array2::from_elem((n_visible, n_hidden), true) }
    }

    /// Dense model with the given weights.
    pub fn from_weights(weights: Array2<f64>) -> Result<Self> {
        let mask = Array2::from_elem(weights.dim(), true);
        Self::with_mask(weights, mask)
    }

    pub fn with_mask(weights: Array2<f64>, mask: Array2<bool>) -> Result<Self> {
        if weights.dim() != mask.dim() {
            return Err(Error::InvalidArgument(format!(
                "weights {:?} and mask {:?} differ in shape",
                weights.dim(),
                mask.dim()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite".into()));
        }
        if weights.iter().zip(mask.iter()).any(|(w, &m)| !m && *w != 0.0) {
            return Err(Error::InvalidArgument("masked-out edges must carry zero weight".into()));
        }
        if weights.nrows() == 0 || weights.ncols() == 0 {
            return Err(Error::InvalidArgument("both layers need at least one unit".into()));
        }
        Ok(Self { weights, mask })
    }

    /// Weights i.i.d. uniform in `[−0.1, 0.1]` on unmasked edges.
    pub fn random(n_visible: usize, n_hidden: usize, mask: Option<Array2<bool>>, seed: u64) -> Result<Self> {
        let mask = mask.unwrap_or_else(|| Array2::from_elem((n_visible, n_hidden), true));
        check_dims(n_visible * n_hidden, mask.len())?;
        let mut rng = rng::seeded(seed);
        let mut weights = Array2::zeros((n_visible, n_hidden));
        for ((i, j), w) in weights.indexed_iter_mut() {
            let draw = rng.random_range(-INIT_HALF_WIDTH..=INIT_HALF_WIDTH);
            if mask[[i, j]] {
                *w = draw;
            }
        }
        Self::with_mask(weights, mask)
    }

    pub fn n_visible(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.ncols()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn mask(&self) -> &Array2<bool> {
        &self.mask
    }

    /// `J ← J + step · direction`, masked.
    pub fn apply_update(&mut self, direction: &Array2<f64>, step: f64) -> Result<()> {
        if direction.dim() != self.weights.dim() {
            return Err(Error::InvalidArgument("update has the wrong shape".into()));
        }
        for ((w, d), &m) in self.weights.iter_mut().zip(direction.iter()).zip(self.mask.iter()) {
            if m {
                *w += step * d;
            }
        }
        Ok(())
    }

    /// The same model with every weight divided by `alpha`.
    pub fn rescaled(&self, alpha: f64) -> Self {
        Self { weights: self.weights.mapv(|w| w / alpha), mask: self.mask.clone() }
    }

    /// `m_j = Σ_i v_i J_ij`.
    pub fn hidden_field(&self, v: &[i8]) -> Vec<f64> {
        let mut m = vec![0.0; self.n_hidden()];
        for (row, &vi) in self.weights.rows().into_iter().zip(v) {
            let s = f64::from(vi);
            for (mj, w) in m.iter_mut().zip(row) {
                *mj += s * w;
            }
        }
        m
    }

    /// `Σ_j J_ij h_j`.
    pub fn visible_field(&self, h: &[i8]) -> Vec<f64> {
        self.weights.rows().into_iter().map(|row| row.iter().zip(h).map(|(w, &hj)| w * f64::from(hj)).sum()).collect()
    }

    pub fn energy(&self, v: &[i8], h: &[i8]) -> Result<f64> {
        check_dims(self.n_visible(), v.len())?;
        check_dims(self.n_hidden(), h.len())?;
        // row-major accumulation, matching the coupling order of `to_ising`
        let mut e = 0.0;
        for ((i, j), &w) in self.weights.indexed_iter() {
            if self.mask[[i, j]] {
                e -= w * f64::from(v[i] * h[j]);
            }
        }
        Ok(e)
    }

    /// Bipartite Ising problem on `N_v + N_h` spins, visible first, with a
    /// coupling `(i, N_v + j, J_ij)` per unmasked edge and no fields.
    pub fn to_ising(&self) -> IsingProblem {
        let nv = self.n_visible();
        let couplings = self
            .weights
            .indexed_iter()
            .filter(|&((i, j), _)| self.mask[[i, j]])
            .map(|((i, j), &value)| Coupling { i, j: nv + j, value })
            .collect();
        IsingProblem::new(nv + self.n_hidden(), couplings, vec![]).expect("bipartite couplings are valid")
    }
}

/// `1 / (1 + e^{−x})`.
#[inline]
pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
