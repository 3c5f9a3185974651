//! Effective inverse temperature of a diabatic anneal as a functional of its
//! schedule,
//!
//! ```text
//! β = 2 ∫₀^τ B(t) sin(2 ∫ₜ^τ A(s) ds) dt,
//! ```
//!
//! valid while β·E stays small. The inner phase is accumulated backward from
//! `τ` with the trapezoid rule, which is exact for piecewise-linear `A` on a
//! refinement of the knot grid; the outer integral uses composite Simpson on
//! the same grid, doubled until two levels agree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::Schedule;

/// Absolute agreement between successive refinements.
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;
/// Maximum residual `|β(τ) − β_target|` accepted by [`solve_tau_for_beta`].
pub const ROOT_TOLERANCE: f64 = 1e-6;

const MIN_GRID_POINTS: usize = 64;
const MAX_REFINEMENTS: u32 = 22;
const MAX_GRID_POINTS: usize = 1 << 25;
const SCAN_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMethod {
    Integral,
    Unitary,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta: f64,
    pub method: BetaMethod,
    /// Zero for deterministic methods.
    pub stderr: f64,
}

impl BetaEstimate {
    pub fn exact(beta: f64, method: BetaMethod) -> Self {
        Self { beta, method, stderr: 0.0 }
    }
}

/// Simpson estimate with `subdivisions` (even) panels per knot interval.
fn simpson_level(schedule: &Schedule, subdivisions: usize) -> f64 {
    let knots = schedule.knots();
    let mut phase = 0.0f64;
    let mut total = 0.0;
    // walk intervals backward so the phase accumulates from τ
    for w in knots.windows(2).rev() {
        let (lo, hi) = (w[0], w[1]);
        let h = (hi.t - lo.t) / subdivisions as f64;
        let a_at = |j: usize| lo.a + (j as f64 / subdivisions as f64) * (hi.a - lo.a);
        let b_at = |j: usize| lo.b + (j as f64 / subdivisions as f64) * (hi.b - lo.b);
        let mut sum = 0.0;
        let mut a_next = a_at(subdivisions);
        sum += b_at(subdivisions) * phase.sin();
        for j in (0..subdivisions).rev() {
            let a_j = a_at(j);
            phase += (a_j + a_next) * h; // 2 · trapezoid
            a_next = a_j;
            let weight = if j == 0 {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += weight * b_at(j) * phase.sin();
        }
        total += sum * h / 3.0;
    }
    2.0 * total
}

/// β from the schedule integral.
pub fn beta_integral(schedule: &Schedule) -> Result<BetaEstimate> {
    let intervals = schedule.knots().len() - 1;
    let mut subdivisions = (MIN_GRID_POINTS.div_ceil(intervals)).max(2);
    subdivisions += subdivisions % 2;
    let mut previous = simpson_level(schedule, subdivisions);
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        subdivisions *= 2;
        if subdivisions.saturating_mul(intervals) > MAX_GRID_POINTS {
            break;
        }
        let current = simpson_level(schedule, subdivisions);
        last_change = (current - previous).abs();
        if last_change <= QUADRATURE_TOLERANCE {
            // Richardson step on the Simpson pair
            let beta = current + (current - previous) / 15.0;
            return Ok(BetaEstimate::exact(beta, BetaMethod::Integral));
        }
        previous = current;
    }
    Err(Error::QuadratureDiverged { refinements: MAX_REFINEMENTS, last_change })
}

/// Closed form for constant controls: `(b/a)(1 − cos 2aτ)`, with the `a → 0`
/// limit equal to 0.
pub fn beta_integral_constant(a: f64, b: f64, tau: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    // 1 − cos 2x = 2 sin² x, without cancellation at small x
    let s = (a * tau).sin();
    2.0 * b * s * s / a
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Minimize `|f|` on `[lo, hi]` by golden-section search.
fn golden_min_abs<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?.abs();
    let mut f2 = f(x2)?.abs();
    for _ in 0..120 {
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?.abs();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?.abs();
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Smallest anneal duration in `tau_range` whose integral β matches
/// `beta_target` to [`ROOT_TOLERANCE`].
///
/// The range is scanned on a uniform grid; the first bracketed sign change
/// is bisected. A root where `β(τ)` only touches the target (a tangent, e.g.
/// the maximum of `1 − cos 2τ`) is located by minimizing the residual
/// between grid neighbours.
pub fn solve_tau_for_beta<F>(family: F, beta_target: f64, tau_range: (f64, f64)) -> Result<f64>
where
    F: Fn(f64) -> Result<Schedule>,
{
    let (lo, hi) = tau_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau range ({lo}, {hi}) must be positive and ordered")));
    }
    let residual = |tau: f64| -> Result<f64> { Ok(beta_integral(&family(tau)?)?.beta - beta_target) };

    let taus: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| if k + 1 == SCAN_POINTS { hi } else { lo + (hi - lo) * k as f64 / (SCAN_POINTS - 1) as f64 })
        .collect();
    let values = taus.iter().map(|&t| residual(t)).collect::<Result<Vec<_>>>()?;

    for k in 0..SCAN_POINTS {
        if values[k].abs() <= ROOT_TOLERANCE {
            return Ok(taus[k]);
        }
        if k > 0 && (values[k - 1] < 0.0) != (values[k] < 0.0) {
            return bisect(&residual, taus[k - 1], taus[k], values[k - 1]);
        }
        if k > 0 && k + 1 < SCAN_POINTS {
            let (prev, cur, next) = (values[k - 1], values[k], values[k + 1]);
            let same_sign = (prev < 0.0) == (cur < 0.0) && (cur < 0.0) == (next < 0.0);
            if same_sign && cur.abs() < prev.abs() && cur.abs() <= next.abs() {
                let (tau, r) = golden_min_abs(&residual, taus[k - 1], taus[k + 1])?;
                if r <= ROOT_TOLERANCE {
                    return Ok(tau);
                }
            }
        }
    }
    Err(Error::NoSolution { target: beta_target, lo, hi })
}
