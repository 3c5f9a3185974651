use num_complex::Complex64;

use super::problem::IsingProblem;
use super::state::{apply_into, check_size, mixer_ground_state, StateVector};
use crate::beta::{BetaEstimate, BetaMethod};
use crate::error::{Error, Result};
use crate::schedule::Schedule;
use crate::thermometry::weighted_line_fit;

/// Norm drift above which the state is renormalized (and the event counted).
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;
/// Norm drift that aborts the integration.
pub const UNSTABLE_THRESHOLD: f64 = 1e-6;
/// Step density used when callers do not choose one.
pub const DEFAULT_STEPS_PER_UNIT_TIME: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvolutionReport {
    pub steps: usize,
    pub renormalizations: usize,
}

fn step_count(tau: f64, steps_per_unit_time: usize) -> Result<usize> {
    if steps_per_unit_time == 0 {
        return Err(Error::InvalidArgument("steps_per_unit_time must be at least 1".into()));
    }
    Ok(((tau * steps_per_unit_time as f64).ceil() as usize).max(1))
}

/// Integrate `i dψ/dt = H(t)ψ` from `|+⟩^⊗n` over the schedule with RK4.
pub fn evolve_continuous(
    problem: &IsingProblem,
    schedule: &Schedule,
    steps_per_unit_time: usize,
) -> Result<StateVector> {
    let initial = mixer_ground_state(problem.n())?;
    evolve_continuous_from(problem, schedule, steps_per_unit_time, initial).map(|(s, _)| s)
}

/// RK4 integration from an arbitrary initial state.
///
/// The step is `τ / ⌈τ · steps_per_unit_time⌉`, never larger than
/// `1 / steps_per_unit_time`, so the last step lands exactly on `τ`.
pub fn evolve_continuous_from(
    problem: &IsingProblem,
    schedule: &Schedule,
    steps_per_unit_time: usize,
    initial: StateVector,
) -> Result<(StateVector, EvolutionReport)> {
    let n = problem.n();
    check_size(n)?;
    if initial.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: initial.n() });
    }
    let tau = schedule.tau();
    let steps = step_count(tau, steps_per_unit_time)?;
    let dt = tau / steps as f64;
    let diagonal = problem.diagonal();
    let dim = 1usize << n;

    let mut psi = initial;
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]);
    let mut report = EvolutionReport { steps, renormalizations: 0 };

    // dψ/dt = −i H ψ
    let rhs = |a: f64, b: f64, src: &[Complex64], dst: &mut [Complex64]| {
        apply_into(&diagonal, n, a, b, src, dst);
        for d in dst.iter_mut() {
            *d = Complex64::new(d.im, -d.re);
        }
    };

    for step in 0..steps {
        let t0 = tau * step as f64 / steps as f64;
        let t1 = tau * (step + 1) as f64 / steps as f64;
        let (a0, b0) = schedule.evaluate_clamped(t0);
        let (am, bm) = schedule.evaluate_clamped(0.5 * (t0 + t1));
        let (a1, b1) = schedule.evaluate_clamped(t1);
        let cur = psi.amplitudes();

        rhs(a0, b0, cur, &mut k1);
        for x in 0..dim {
            tmp[x] = cur[x] + k1[x] * (0.5 * dt);
        }
        rhs(am, bm, &tmp, &mut k2);
        for x in 0..dim {
            tmp[x] = cur[x] + k2[x] * (0.5 * dt);
        }
        rhs(am, bm, &tmp, &mut k3);
        for x in 0..dim {
            tmp[x] = cur[x] + k3[x] * dt;
        }
        rhs(a1, b1, &tmp, &mut k4);

        let amps = psi.amplitudes_mut();
        for x in 0..dim {
            amps[x] += (k1[x] + (k2[x] + k3[x]) * 2.0 + k4[x]) * (dt / 6.0);
        }
        let deviation = (psi.norm_sqr() - 1.0).abs();
        if deviation > UNSTABLE_THRESHOLD {
            return Err(Error::Unstable { deviation, t: t1 });
        }
        if deviation > RENORMALIZE_THRESHOLD {
            psi.normalize();
            report.renormalizations += 1;
        }
    }
    Ok((psi, report))
}

/// `exp(iθ Σ_k σ_x^(k))` applied in place, one qubit at a time.
fn rotate_all_x(psi: &mut [Complex64], n: usize, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let is = Complex64::new(0.0, s);
    for k in 0..n {
        let bit = 1usize << k;
        for x in 0..psi.len() {
            if x & bit == 0 {
                let (u, v) = (psi[x], psi[x | bit]);
                psi[x] = u * c + v * is;
                psi[x | bit] = u * is + v * c;
            }
        }
    }
}

/// Piecewise-constant Strang splitting with midpoint controls on each of
/// `n_steps` equal slices: `e^{−iAΔt H_mix/2} e^{−iBΔt H_prob} e^{−iAΔt H_mix/2}`.
pub fn evolve_trotter(problem: &IsingProblem, schedule: &Schedule, n_steps: usize) -> Result<StateVector> {
    let initial = mixer_ground_state(problem.n())?;
    evolve_trotter_from(problem, schedule, n_steps, initial)
}

pub fn evolve_trotter_from(
    problem: &IsingProblem,
    schedule: &Schedule,
    n_steps: usize,
    initial: StateVector,
) -> Result<StateVector> {
    let n = problem.n();
    check_size(n)?;
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
    }
    if initial.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: initial.n() });
    }
    let tau = schedule.tau();
    let dt = tau / n_steps as f64;
    let diagonal = problem.diagonal();
    let mut psi = initial;
    for step in 0..n_steps {
        let mid = tau * (step as f64 + 0.5) / n_steps as f64;
        let (a, b) = schedule.evaluate_clamped(mid);
        let amps = psi.amplitudes_mut();
        // H_mix = −Σσx, so e^{−i(AΔt/2)H_mix} = e^{+i(AΔt/2)Σσx}
        rotate_all_x(amps, n, 0.5 * a * dt);
        for (amp, &e) in amps.iter_mut().zip(&diagonal) {
            *amp *= Complex64::from_polar(1.0, -b * dt * e);
        }
        rotate_all_x(amps, n, 0.5 * a * dt);
    }
    Ok(psi)
}

/// Ground/excited populations of a single spin in a field, read from a state.
pub fn two_level_populations(problem: &IsingProblem, state: &StateVector) -> Result<(f64, f64, f64)> {
    if problem.n() != 1 || state.n() != 1 {
        return Err(Error::InvalidArgument("two-level analysis needs a single spin".into()));
    }
    let h = problem.fields().first().map(|f| f.h).unwrap_or(0.0);
    if h == 0.0 {
        return Err(Error::InvalidArgument("two-level analysis needs a non-zero field".into()));
    }
    let p = state.probabilities();
    // ground state is s = sign(h); s = +1 is basis index 0
    let (p0, p1) = if h > 0.0 { (p[0], p[1]) } else { (p[1], p[0]) };
    Ok((p0, p1, 2.0 * h.abs()))
}

/// `ln(p0/p1)/(E1 − E0)` from populations.
pub fn two_level_beta(p0: f64, p1: f64, gap: f64) -> Result<f64> {
    if p1 <= f64::EPSILON * p0 {
        return Err(Error::VanishingPopulation);
    }
    Ok((p0 / p1).ln() / gap)
}

/// Reference β of a single spin in a field from exact unitary evolution.
pub fn beta_unitary_two_level(
    problem: &IsingProblem,
    schedule: &Schedule,
    steps_per_unit_time: usize,
) -> Result<BetaEstimate> {
    if problem.n() != 1 {
        return Err(Error::InvalidArgument("two-level reference needs a single spin".into()));
    }
    let state = evolve_continuous(problem, schedule, steps_per_unit_time)?;
    let (p0, p1, gap) = two_level_populations(problem, &state)?;
    Ok(BetaEstimate::exact(two_level_beta(p0, p1, gap)?, BetaMethod::Unitary))
}

/// Reference β for any problem under the cap; see [`beta_of_state`].
pub fn beta_unitary(problem: &IsingProblem, schedule: &Schedule, steps_per_unit_time: usize) -> Result<BetaEstimate> {
    if problem.n() == 1 {
        return beta_unitary_two_level(problem, schedule, steps_per_unit_time);
    }
    let state = evolve_continuous(problem, schedule, steps_per_unit_time)?;
    beta_of_state(problem, &state)
}

/// Effective β of the exact outcome distribution of `state`: the two-level
/// formula for one spin, otherwise the probability-weighted slope of `ln p`
/// against energy.
pub fn beta_of_state(problem: &IsingProblem, state: &StateVector) -> Result<BetaEstimate> {
    if state.n() != problem.n() {
        return Err(Error::DimensionMismatch { expected: problem.n(), found: state.n() });
    }
    if problem.n() == 1 {
        let (p0, p1, gap) = two_level_populations(problem, state)?;
        return Ok(BetaEstimate::exact(two_level_beta(p0, p1, gap)?, BetaMethod::Unitary));
    }
    let probs = state.probabilities();
    let energies = problem.diagonal();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for (p, e) in probs.iter().zip(&energies) {
        if *p > 0.0 {
            xs.push(*e);
            ys.push(p.ln());
            ws.push(*p);
        }
    }
    let fit = weighted_line_fit(&xs, &ys, &ws)?;
    Ok(BetaEstimate::exact(-fit.slope, BetaMethod::Unitary))
}
