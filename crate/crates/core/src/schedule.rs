//! Annealing schedules `A(t)`, `B(t)` over `[0, tau]`.
//!
//! Times are in abstract time units and `A`, `B` are angular frequencies
//! (radians per time unit), so the accumulated mixer phase is `∫A dt`
//! directly. Tables published in GHz are converted with the `angular` flag
//! of [`load_schedule`]. Between knots the schedule is piecewise linear.

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub t: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Constant,
    Linear,
    Tabulated,
}

/// Immutable piecewise-linear schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    knots: Vec<Knot>,
    kind: ScheduleKind,
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidSchedule(format!("{what} must be finite")))
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSchedule(format!("duration must be positive and finite, got {tau}")))
    }
}

impl Schedule {
    /// `A(t) = a`, `B(t) = b` on `[0, tau]`.
    pub fn constant(a: f64, b: f64, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        check_finite(&[a, b], "schedule values")?;
        Ok(Self { knots: vec![Knot { t: 0.0, a, b }, Knot { t: tau, a, b }], kind: ScheduleKind::Constant })
    }

    /// Linear ramps `a0 → a1` and `b0 → b1` over `[0, tau]`.
    pub fn linear(a0: f64, a1: f64, b0: f64, b1: f64, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        check_finite(&[a0, a1, b0, b1], "schedule values")?;
        Ok(Self {
            knots: vec![Knot { t: 0.0, a: a0, b: b0 }, Knot { t: tau, a: a1, b: b1 }],
            kind: ScheduleKind::Linear,
        })
    }

    /// Tabulated schedule from knots. The first knot must sit at `t = 0` and
    /// times must be strictly increasing.
    pub fn tabulated(knots: Vec<Knot>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::TooFewKnots(knots.len()));
        }
        for (row, k) in knots.iter().enumerate() {
            check_finite(&[k.t, k.a, k.b], "knot values")?;
            if row > 0 && k.t <= knots[row - 1].t {
                return Err(Error::NonMonotonicTime { row });
            }
        }
        if knots[0].t != 0.0 {
            return Err(Error::InvalidSchedule(format!("first knot must be at t = 0, found {}", knots[0].t)));
        }
        Ok(Self { knots, kind: ScheduleKind::Tabulated })
    }

    pub fn tau(&self) -> f64 {
        self.knots[self.knots.len() - 1].t
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    /// `(A(t), B(t))`. Exact at knots; `t` outside `[0, tau]` is rejected.
    pub fn evaluate(&self, t: f64) -> Result<(f64, f64)> {
        let tau = self.tau();
        if !(0.0..=tau).contains(&t) {
            return Err(Error::OutOfDomain { t, tau });
        }
        // first knot with knot.t >= t
        let idx = self.knots.partition_point(|k| k.t < t);
        let hi = self.knots[idx];
        if hi.t == t {
            return Ok((hi.a, hi.b));
        }
        let lo = self.knots[idx - 1];
        let w = (t - lo.t) / (hi.t - lo.t);
        Ok((lo.a + w * (hi.a - lo.a), lo.b + w * (hi.b - lo.b)))
    }

    /// Evaluate with `t` clamped into the domain; for integrators whose
    /// accumulated step times overshoot `tau` by rounding.
    pub(crate) fn evaluate_clamped(&self, t: f64) -> (f64, f64) {
        self.evaluate(t.clamp(0.0, self.tau())).expect("clamped time is in domain")
    }

    /// Multiply the `A` and `B` columns by constant factors.
    pub fn scaled(&self, a_factor: f64, b_factor: f64) -> Result<Self> {
        check_finite(&[a_factor, b_factor], "scale factors")?;
        Ok(Self {
            knots: self.knots.iter().map(|k| Knot { t: k.t, a: k.a * a_factor, b: k.b * b_factor }).collect(),
            kind: self.kind,
        })
    }

    /// Same control shape with the time axis stretched to a new duration.
    pub fn stretched(&self, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        let ratio = tau / self.tau();
        let last = self.knots.len() - 1;
        let knots = self
            .knots
            .iter()
            .enumerate()
            .map(|(i, k)| Knot { t: if i == last { tau } else { k.t * ratio }, a: k.a, b: k.b })
            .collect();
        Ok(Self { knots, kind: self.kind })
    }
}

/// Parametric schedule family over the anneal duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ScheduleFamily {
    Constant {
        a: f64,
        b: f64,
    },
    Linear {
        a0: f64,
        a1: f64,
        b0: f64,
        b1: f64,
    },
    /// A fixed control shape whose time axis is stretched to each duration.
    Stretched {
        shape: Schedule,
    },
}

impl ScheduleFamily {
    /// The usual annealing ramp: `A` from 1 to 0, `B` from 0 to 1.
    pub fn standard_ramp() -> Self {
        ScheduleFamily::Linear { a0: 1.0, a1: 0.0, b0: 0.0, b1: 1.0 }
    }

    pub fn at(&self, tau: f64) -> Result<Schedule> {
        match self {
            ScheduleFamily::Constant { a, b } => Schedule::constant(*a, *b, tau),
            ScheduleFamily::Linear { a0, a1, b0, b1 } => Schedule::linear(*a0, *a1, *b0, *b1, tau),
            ScheduleFamily::Stretched { shape } => shape.stretched(tau),
        }
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    t: f64,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
}

/// Load a `t,A,B` CSV table. With `angular` set, `A` and `B` are multiplied
/// by 2π (frequency to angular frequency).
pub fn load_schedule(path: impl AsRef<Path>, angular: bool) -> Result<Schedule> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_schedule_csv(&text, angular)
}

pub fn parse_schedule_csv(text: &str, angular: bool) -> Result<Schedule> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::MalformedRow { row: 0, reason: e.to_string() })?.clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "A", "B"] {
        return Err(Error::MalformedRow {
            row: 0,
            reason: format!("expected header `t,A,B`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let scale = if angular { TAU } else { 1.0 };
    let mut knots = Vec::new();
    for (row, record) in reader.deserialize::<CsvRow>().enumerate() {
        let r = record.map_err(|e| Error::MalformedRow { row: row + 1, reason: e.to_string() })?;
        knots.push(Knot { t: r.t, a: r.a * scale, b: r.b * scale });
    }
    Schedule::tabulated(knots)
}
