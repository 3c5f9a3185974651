use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub i: usize,
    pub h: f64,
}

/// Ising energy model `E(s) = −Σ J_ij s_i s_j − Σ h_i s_i` over `s ∈ {±1}^n`.
///
/// Basis index convention: bit `k` of a computational-basis index is spin `k`,
/// with bit 0 ↔ `s = +1` (σ_z eigenvalue +1) and bit 1 ↔ `s = −1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WireProblem", into = "WireProblem")]
pub struct IsingProblem {
    n: usize,
    couplings: Vec<Coupling>,
    fields: Vec<Field>,
}

/// JSON shape: `{"num_spins": n, "couplings": [[i, j, J]], "fields": [[i, h]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct WireProblem {
    num_spins: usize,
    #[serde(default)]
    couplings: Vec<(usize, usize, f64)>,
    #[serde(default)]
    fields: Vec<(usize, f64)>,
}

impl TryFrom<WireProblem> for IsingProblem {
    type Error = Error;

    fn try_from(w: WireProblem) -> Result<Self> {
        IsingProblem::new(
            w.num_spins,
            w.couplings.into_iter().map(|(i, j, value)| Coupling { i, j, value }).collect(),
            w.fields.into_iter().map(|(i, h)| Field { i, h }).collect(),
        )
    }
}

impl From<IsingProblem> for WireProblem {
    fn from(p: IsingProblem) -> Self {
        WireProblem {
            num_spins: p.n,
            couplings: p.couplings.iter().map(|c| (c.i, c.j, c.value)).collect(),
            fields: p.fields.iter().map(|f| (f.i, f.h)).collect(),
        }
    }
}

/// Spin at position `k` of basis index `index`.
#[inline]
pub fn spin_of(index: usize, k: usize) -> i8 {
    if (index >> k) & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Basis index of a ±1 configuration.
pub fn index_of(spins: &[i8]) -> usize {
    spins.iter().enumerate().fold(0, |acc, (k, &s)| if s < 0 { acc | (1 << k) } else { acc })
}

/// ±1 configuration of a basis index.
pub fn spins_of(index: usize, n: usize) -> Vec<i8> {
    (0..n).map(|k| spin_of(index, k)).collect()
}

impl IsingProblem {
    pub fn new(n: usize, couplings: Vec<Coupling>, fields: Vec<Field>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidProblem("at least one spin is required".into()));
        }
        let mut seen = HashSet::new();
        for c in &couplings {
            if !(c.i < c.j && c.j < n) {
                return Err(Error::InvalidProblem(format!("coupling ({}, {}) must satisfy i < j < {n}", c.i, c.j)));
            }
            if !seen.insert((c.i, c.j)) {
                return Err(Error::InvalidProblem(format!("duplicate coupling ({}, {})", c.i, c.j)));
            }
            if !c.value.is_finite() {
                return Err(Error::InvalidProblem(format!("coupling ({}, {}) is not finite", c.i, c.j)));
            }
        }
        let mut seen = HashSet::new();
        for f in &fields {
            if f.i >= n {
                return Err(Error::InvalidProblem(format!("field index {} out of range", f.i)));
            }
            if !seen.insert(f.i) {
                return Err(Error::InvalidProblem(format!("duplicate field on spin {}", f.i)));
            }
            if !f.h.is_finite() {
                return Err(Error::InvalidProblem(format!("field on spin {} is not finite", f.i)));
            }
        }
        Ok(Self { n, couplings, fields })
    }

    /// Single spin in a longitudinal field; levels `∓|h|`.
    pub fn single_field(h: f64) -> Result<Self> {
        Self::new(1, vec![], vec![Field { i: 0, h }])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: spins.len() });
        }
        let mut e = 0.0;
        for c in &self.couplings {
            e -= c.value * f64::from(spins[c.i] * spins[c.j]);
        }
        for f in &self.fields {
            e -= f.h * f64::from(spins[f.i]);
        }
        Ok(e)
    }

    pub fn energy_of_index(&self, index: usize) -> f64 {
        let mut e = 0.0;
        for c in &self.couplings {
            e -= c.value * f64::from(spin_of(index, c.i) * spin_of(index, c.j));
        }
        for f in &self.fields {
            e -= f.h * f64::from(spin_of(index, f.i));
        }
        e
    }

    /// Energies of all `2^n` basis states, in index order.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..1usize << self.n).map(|x| self.energy_of_index(x)).collect()
    }

    /// Couplings and fields multiplied by `factor`.
    pub fn map_values(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            couplings: self.couplings.iter().map(|c| Coupling { value: c.value * factor, ..*c }).collect(),
            fields: self.fields.iter().map(|f| Field { h: f.h * factor, ..*f }).collect(),
        }
    }

    /// Couplings and fields divided by `divisor`.
    pub(crate) fn divide_values(&self, divisor: f64) -> Self {
        Self {
            n: self.n,
            couplings: self.couplings.iter().map(|c| Coupling { value: c.value / divisor, ..*c }).collect(),
            fields: self.fields.iter().map(|f| Field { h: f.h / divisor, ..*f }).collect(),
        }
    }
}
