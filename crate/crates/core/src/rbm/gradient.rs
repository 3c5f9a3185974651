//! Log-likelihood gradient `⟨v_i h_j⟩_data − ⟨v_i h_j⟩_model`.
//!
//! Up to the factor `β·|D|` this is `∂ ln L / ∂J_ij`. The data term uses the
//! exact hidden conditional `⟨h_j | v⟩ = tanh(β m_j)` instead of sampled
//! hidden units.

use ndarray::Array2;

use super::model::Rbm;
use crate::dynamics::spins_of;
use crate::error::{Error, Result};
use crate::sampling::{check_enumerable, log_sum_exp, SampleSet};

fn check_visible(rbm: &Rbm, data: &SampleSet) -> Result<()> {
    if data.n() != rbm.n_visible() {
        return Err(Error::DimensionMismatch { expected: rbm.n_visible(), found: data.n() });
    }
    if data.is_empty() {
        return Err(Error::EmptyBatch("data"));
    }
    Ok(())
}

fn apply_mask(rbm: &Rbm, mut m: Array2<f64>) -> Array2<f64> {
    m.zip_mut_with(rbm.mask(), |x, &keep| {
        if !keep {
            *x = 0.0;
        }
    });
    m
}

/// `(1/|D|) Σ_v v_i tanh(β m_j(v))` over the data multiset.
pub fn data_term(rbm: &Rbm, data: &SampleSet, beta: f64) -> Result<Array2<f64>> {
    check_visible(rbm, data)?;
    let mut acc = Array2::<f64>::zeros((rbm.n_visible(), rbm.n_hidden()));
    for r in data.records() {
        let expected_h: Vec<f64> = rbm.hidden_field(&r.spins).iter().map(|m| (beta * m).tanh()).collect();
        let c = r.count as f64;
        for (mut row, &vi) in acc.rows_mut().into_iter().zip(&r.spins) {
            let s = c * f64::from(vi);
            for (x, hj) in row.iter_mut().zip(&expected_h) {
                *x += s * hj;
            }
        }
    }
    Ok(apply_mask(rbm, acc / data.total() as f64))
}

/// Empirical mean of `v_i h_j` over joint samples `(v, h)`, visible first.
pub fn model_term(rbm: &Rbm, model_samples: &SampleSet) -> Result<Array2<f64>> {
    let (nv, nh) = (rbm.n_visible(), rbm.n_hidden());
    if model_samples.n() != nv + nh {
        return Err(Error::DimensionMismatch { expected: nv + nh, found: model_samples.n() });
    }
    if model_samples.is_empty() {
        return Err(Error::EmptyBatch("model samples"));
    }
    let mut acc = Array2::<f64>::zeros((nv, nh));
    for r in model_samples.records() {
        let (v, h) = r.spins.split_at(nv);
        let c = r.count as f64;
        for (mut row, &vi) in acc.rows_mut().into_iter().zip(v) {
            for (x, &hj) in row.iter_mut().zip(h) {
                *x += c * f64::from(vi * hj);
            }
        }
    }
    Ok(apply_mask(rbm, acc / model_samples.total() as f64))
}

/// Data term minus the model term estimated from `model_samples`; masked
/// entries are zero.
pub fn gradient(rbm: &Rbm, data: &SampleSet, model_samples: &SampleSet, beta: f64) -> Result<Array2<f64>> {
    Ok(data_term(rbm, data, beta)? - model_term(rbm, model_samples)?)
}

/// `ln Σ_h exp(−β E(v, h))` by enumerating the hidden layer.
fn log_hidden_sum(rbm: &Rbm, v: &[i8], beta: f64) -> f64 {
    let m = rbm.hidden_field(v);
    let nh = rbm.n_hidden();
    log_sum_exp((0..1usize << nh).map(|x| {
        let h = spins_of(x, nh);
        beta * m.iter().zip(&h).map(|(mj, &hj)| mj * f64::from(hj)).sum::<f64>()
    }))
}

/// `(ln Σ_h e^{−βE(v,h)})` for every visible configuration, and `ln Z`.
fn visible_free_terms(rbm: &Rbm, beta: f64) -> Result<(Vec<f64>, f64)> {
    check_enumerable(rbm.n_visible() + rbm.n_hidden())?;
    let nv = rbm.n_visible();
    let terms: Vec<f64> = (0..1usize << nv).map(|x| log_hidden_sum(rbm, &spins_of(x, nv), beta)).collect();
    let log_z = log_sum_exp(terms.iter().copied());
    Ok((terms, log_z))
}

/// Exact `⟨v_i h_j⟩` under the model at `beta`, by enumeration.
pub fn exact_model_term(rbm: &Rbm, beta: f64) -> Result<Array2<f64>> {
    let (terms, log_z) = visible_free_terms(rbm, beta)?;
    let nv = rbm.n_visible();
    let mut acc = Array2::<f64>::zeros((nv, rbm.n_hidden()));
    for (x, t) in terms.iter().enumerate() {
        let p = (t - log_z).exp();
        let v = spins_of(x, nv);
        let expected_h: Vec<f64> = rbm.hidden_field(&v).iter().map(|m| (beta * m).tanh()).collect();
        for (mut row, &vi) in acc.rows_mut().into_iter().zip(&v) {
            for (a, hj) in row.iter_mut().zip(&expected_h) {
                *a += p * f64::from(vi) * hj;
            }
        }
    }
    Ok(apply_mask(rbm, acc))
}

/// Gradient with the model term computed exactly.
pub fn exact_gradient(rbm: &Rbm, data: &SampleSet, beta: f64) -> Result<Array2<f64>> {
    Ok(data_term(rbm, data, beta)? - exact_model_term(rbm, beta)?)
}

/// `Σ_data ln p(v)` with `p(v) = Σ_h e^{−βE(v,h)} / Z(β)`.
pub fn exact_log_likelihood(rbm: &Rbm, data: &SampleSet, beta: f64) -> Result<f64> {
    check_visible(rbm, data)?;
    let (terms, log_z) = visible_free_terms(rbm, beta)?;
    Ok(data.records().iter().map(|r| r.count as f64 * (terms[crate::dynamics::index_of(&r.spins)] - log_z)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::sampling::{exact_boltzmann, SampleRecord};
    use ndarray::array;
    use rand::Rng as _;

    fn random_rbm(nv: usize, nh: usize, seed: u64) -> Rbm {
        let mut r = rng::seeded(seed);
        Rbm::from_weights(Array2::from_shape_fn((nv, nh), |_| r.random_range(-1.0..1.0))).unwrap()
    }

    fn data(nv: usize, items: &[usize]) -> SampleSet {
        SampleSet::from_records(nv, items.iter().map(|&x| SampleRecord { spins: spins_of(x, nv), count: 1 }).collect())
            .unwrap()
    }

    #[test]
    fn matching_moments_cancel() {
        let rbm = Rbm::zeros(2, 1);
        // at J = 0 the data term is 0; model samples with ⟨v h⟩ = 0
        let d = data(2, &[0, 3]);
        let model = SampleSet::from_index_counts(3, &[1, 1, 1, 1, 1, 1, 1, 1]);
        assert!(gradient(&rbm, &d, &model, 1.0).unwrap().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn hand_built_sign() {
        let rbm = Rbm::zeros(2, 2);
        let d = data(2, &[0]);
        let model = SampleSet::from_records(4, vec![SampleRecord { spins: vec![1, 1, -1, -1], count: 7 }]).unwrap();
        assert!(gradient(&rbm, &d, &model, 1.0).unwrap().iter().all(|&g| g == 1.0));
    }

    #[test]
    fn empty_batches() {
        let rbm = Rbm::zeros(1, 1);
        let model = SampleSet::from_index_counts(2, &[1, 0, 0, 0]);
        assert!(matches!(gradient(&rbm, &SampleSet::empty(1), &model, 1.0), Err(Error::EmptyBatch(_))));
        assert!(matches!(gradient(&rbm, &data(1, &[0]), &SampleSet::empty(2), 1.0), Err(Error::EmptyBatch(_))));
        assert!(matches!(gradient(&rbm, &data(2, &[0]), &model, 1.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn masked_entries_are_zero() {
        let rbm = Rbm::with_mask(array![[0.4, 0.0], [0.2, -0.3]], array![[true, false], [true, true]]).unwrap();
        let g = exact_gradient(&rbm, &data(2, &[0]), 1.0).unwrap();
        assert_eq!(g[[0, 1]], 0.0);
        assert!(g[[0, 0]].abs() > 1e-3, "{g}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let step = 1e-5;
        let beta = 1.0;
        let d = data(4, &[0, 3, 5, 10, 15, 15]);
        let size = d.total() as f64;
        for seed in 0..10 {
            let rbm = random_rbm(4, 3, seed);
            let g = exact_gradient(&rbm, &d, beta).unwrap();
            for i in 0..4 {
                for j in 0..3 {
                    let mut e = Array2::zeros((4, 3));
                    e[[i, j]] = 1.0;
                    let mut up = rbm.clone();
                    up.apply_update(&e, step).unwrap();
                    let mut down = rbm.clone();
                    down.apply_update(&e, -step).unwrap();
                    let fd = (exact_log_likelihood(&up, &d, beta).unwrap()
                        - exact_log_likelihood(&down, &d, beta).unwrap())
                        / (2.0 * step * beta * size);
                    let rel = (fd - g[[i, j]]).abs() / g[[i, j]].abs().max(1e-3);
                    assert!(rel <= 1e-4, "seed {seed} ({i},{j}): fd {fd} analytic {}", g[[i, j]]);
                }
            }
        }
    }

    #[test]
    fn zero_weights_give_uniform_likelihood() {
        let d = data(3, &[0, 1, 6]);
        let ll = exact_log_likelihood(&Rbm::zeros(3, 2), &d, 1.0).unwrap();
        assert!((ll - 3.0 * (0.125f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn strong_coupling_favours_aligned_data() {
        let d = data(2, &[0, 3]);
        let zero = exact_log_likelihood(&Rbm::zeros(2, 1), &d, 1.0).unwrap();
        let aligned = exact_log_likelihood(&Rbm::from_weights(array![[1.5], [1.5]]).unwrap(), &d, 1.0).unwrap();
        assert!(aligned > zero);
    }

    #[test]
    fn likelihood_matches_closed_form_and_joint_enumeration() {
        let beta = 0.8;
        let rbm = random_rbm(3, 3, 42);
        let d = data(3, &[1, 2, 2, 7]);
        // closed form: Σ_h exp(β Σ m_j h_j) = Π 2cosh(β m_j)
        let terms: Vec<f64> = (0..8)
            .map(|x| rbm.hidden_field(&spins_of(x, 3)).iter().map(|m| (2.0 * (beta * m).cosh()).ln()).sum())
            .collect();
        let log_z = log_sum_exp(terms.iter().copied());
        let closed: f64 = [1usize, 2, 2, 7].iter().map(|&x| terms[x] - log_z).sum();
        let joint = exact_boltzmann(&rbm.to_ising(), beta).unwrap();
        let marginal = |x: usize| -> f64 { (0..8).map(|hx| joint.probabilities[x | (hx << 3)]).sum() };
        let enumerated: f64 = [1usize, 2, 2, 7].iter().map(|&x| marginal(x).ln()).sum();
        let ll = exact_log_likelihood(&rbm, &d, beta).unwrap();
        assert!((ll - closed).abs() < 1e-10, "{ll} {closed}");
        assert!((ll - enumerated).abs() < 1e-10, "{ll} {enumerated}");
    }

    #[test]
    fn exact_model_term_matches_joint_enumeration() {
        let beta = 1.1;
        let rbm = random_rbm(3, 2, 7);
        let joint = exact_boltzmann(&rbm.to_ising(), beta).unwrap();
        let mut oracle = Array2::<f64>::zeros((3, 2));
        for (x, p) in joint.probabilities.iter().enumerate() {
            let s = spins_of(x, 5);
            for i in 0..3 {
                for j in 0..2 {
                    oracle[[i, j]] += p * f64::from(s[i] * s[3 + j]);
                }
            }
        }
        let exact = exact_model_term(&rbm, beta).unwrap();
        for (a, b) in exact.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_vanishes_when_moments_match() {
        // 2+1 model with data equal to its own visible marginal: exact gradient is zero
        let rbm = Rbm::from_weights(array![[0.5], [-0.3]]).unwrap();
        let beta = 1.0;
        let joint = exact_boltzmann(&rbm.to_ising(), beta).unwrap();
        let scale = 1e9;
        let counts: Vec<u64> =
            (0..4).map(|v| ((joint.probabilities[v] + joint.probabilities[v | 4]) * scale).round() as u64).collect();
        let d = SampleSet::from_index_counts(2, &counts);
        let g = exact_gradient(&rbm, &d, beta).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-8), "{g}");

        // and a different data set leaves a non-zero gradient
        let g = exact_gradient(&rbm, &data(2, &[0]), beta).unwrap();
        assert!(g.iter().any(|x| x.abs() > 1e-3));
    }
}
