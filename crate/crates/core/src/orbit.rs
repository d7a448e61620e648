//! Orbit iteration and running average growth rates.
//!
//! States are advanced in log coordinates (`ln x += F(x, y)`), which keeps
//! long transients through very small densities from underflowing to an
//! absorbing zero. Axes stay invariant exactly: a zero coordinate is
//! `ln 0 = -inf` and remains so.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Axis, AxisView, GrowthModel};
use crate::tail::CompensatedSum;

/// Longest orbit stored point by point.
pub const DENSE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub fn min(&self) -> f64 {
        self.x.min(self.y)
    }
    pub fn max(&self) -> f64 {
        self.x.max(self.y)
    }
}

fn check_density(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, v, "initial density must be finite and non-negative"))
    }
}

fn check_horizon(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    if n > DENSE_LIMIT {
        return Err(Error::HorizonTooLong {
            requested: n,
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// Advances one planar orbit a step at a time without storing it.
#[derive(Clone)]
pub struct Stepper<'a> {
    model: &'a dyn GrowthModel,
    log_x: f64,
    log_y: f64,
    t: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(model: &'a dyn GrowthModel, x0: f64, y0: f64) -> Result<Self> {
        check_density("x0", x0)?;
        check_density("y0", y0)?;
        Ok(Stepper {
            model,
            log_x: x0.ln(),
            log_y: y0.ln(),
            t: 0,
        })
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn state(&self) -> State {
        State {
            x: self.log_x.exp(),
            y: self.log_y.exp(),
        }
    }

    /// `(ln x, ln y)`; `-inf` on an axis.
    pub fn log_state(&self) -> (f64, f64) {
        (self.log_x, self.log_y)
    }

    /// Log rates `(F, G)` at the current state; `None` for a coordinate
    /// that is zero.
    pub fn rates(&self) -> (Option<f64>, Option<f64>) {
        let s = self.state();
        let f = (s.x > 0.0 || self.log_x > f64::NEG_INFINITY).then(|| self.model.log_f(s.x, s.y));
        let g = (s.y > 0.0 || self.log_y > f64::NEG_INFINITY).then(|| self.model.log_g(s.x, s.y));
        (f, g)
    }

    pub fn step(&mut self) -> Result<State> {
        let s = self.state();
        let next = self.t + 1;
        if self.log_x > f64::NEG_INFINITY {
            self.log_x += self.model.log_f(s.x, s.y);
        }
        if self.log_y > f64::NEG_INFINITY {
            self.log_y += self.model.log_g(s.x, s.y);
        }
        if self.log_x.is_nan() || self.log_y.is_nan() {
            return Err(Error::Overflow { step: next });
        }
        let out = self.state();
        if !out.x.is_finite() || !out.y.is_finite() {
            return Err(Error::Overflow { step: next });
        }
        self.t = next;
        Ok(out)
    }
}

/// A stored trajectory `(x_t, y_t)`, `t = 0..=horizon`.
#[derive(Debug, Clone, Serialize)]
pub struct Orbit {
    pub model_id: String,
    pub initial: (f64, f64),
    pub horizon: usize,
    pub states: Vec<State>,
}

pub fn iterate(model: &dyn GrowthModel, initial: (f64, f64), n: usize) -> Result<Orbit> {
    check_horizon(n)?;
    let mut stepper = Stepper::new(model, initial.0, initial.1)?;
    let mut states = Vec::with_capacity(n + 1);
    states.push(stepper.state());
    for _ in 0..n {
        states.push(stepper.step()?);
    }
    Ok(Orbit {
        model_id: model.id(),
        initial,
        horizon: n,
        states,
    })
}

/// Advances the resident alone along one axis.
#[derive(Clone, Copy)]
pub struct BoundaryStepper<'a> {
    view: AxisView<'a>,
    log_s: f64,
    t: usize,
}

impl<'a> BoundaryStepper<'a> {
    pub fn new(view: AxisView<'a>, s0: f64) -> Result<Self> {
        check_density("ic", s0)?;
        Ok(BoundaryStepper {
            view,
            log_s: s0.ln(),
            t: 0,
        })
    }

    pub fn position(&self) -> f64 {
        self.log_s.exp()
    }

    pub fn step(&mut self) -> Result<f64> {
        if self.log_s > f64::NEG_INFINITY {
            self.log_s += self.view.resident_log(self.position());
        }
        self.t += 1;
        let s = self.position();
        if self.log_s.is_nan() || !s.is_finite() {
            return Err(Error::Overflow { step: self.t });
        }
        Ok(s)
    }
}

/// A stored orbit of one species alone on its axis.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryOrbit {
    pub axis: Axis,
    pub initial: f64,
    pub points: Vec<f64>,
}

impl BoundaryOrbit {
    pub fn horizon(&self) -> usize {
        self.points.len() - 1
    }
}

pub fn boundary_orbit(model: &dyn GrowthModel, axis: Axis, ic: f64, n: usize) -> Result<BoundaryOrbit> {
    check_horizon(n)?;
    let mut stepper = BoundaryStepper::new(AxisView::new(model, axis), ic)?;
    let mut points = Vec::with_capacity(n + 1);
    points.push(stepper.position());
    for _ in 0..n {
        points.push(stepper.step()?);
    }
    Ok(BoundaryOrbit {
        axis,
        initial: ic,
        points,
    })
}

/// Running means of the two log rates along a boundary orbit after `n`
/// steps. On `S_x`, `resident` is `r_n^{xx}` and `invader` is `r_n^{yx}`;
/// on `S_y`, they are `r_n^{yy}` and `r_n^{xy}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AverageRates {
    pub n: usize,
    pub resident: f64,
    pub invader: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateSeries {
    pub axis: Axis,
    pub initial: f64,
    pub rates: Vec<AverageRates>,
    /// First index at which the invader's factor was zero, if any.
    pub invader_undefined_at: Option<usize>,
}

impl RateSeries {
    pub fn resident_means(&self) -> Vec<f64> {
        self.rates.iter().map(|r| r.resident).collect()
    }
    pub fn invader_means(&self) -> Vec<f64> {
        self.rates.iter().map(|r| r.invader).collect()
    }
    pub fn last(&self) -> AverageRates {
        *self.rates.last().expect("rate series is never empty")
    }
}

/// Running means over `points[0..n]` for `n = 1..points.len()`.
pub fn rates_along(view: AxisView<'_>, orbit: &BoundaryOrbit) -> RateSeries {
    let mut resident_sum = CompensatedSum::default();
    let mut invader_sum = CompensatedSum::default();
    let mut undefined = None;
    let horizon = orbit.horizon();
    let mut rates = Vec::with_capacity(horizon);
    for (i, &s) in orbit.points[..horizon].iter().enumerate() {
        resident_sum.add(view.resident_log(s));
        let inv = view.invader_log(s);
        if inv == f64::NEG_INFINITY && undefined.is_none() {
            undefined = Some(i);
        }
        invader_sum.add(inv);
        let n = (i + 1) as f64;
        rates.push(AverageRates {
            n: i + 1,
            resident: resident_sum.value() / n,
            invader: invader_sum.value() / n,
        });
    }
    RateSeries {
        axis: orbit.axis,
        initial: orbit.initial,
        rates,
        invader_undefined_at: undefined,
    }
}

/// `r_n` for `n = 1..=horizon` along the boundary orbit from `ic`.
pub fn average_rates(model: &dyn GrowthModel, axis: Axis, ic: f64, horizon: usize) -> Result<RateSeries> {
    if !(ic > 0.0) {
        return Err(Error::invalid("ic", ic, "boundary initial condition must be positive"));
    }
    let orbit = boundary_orbit(model, axis, ic, horizon)?;
    Ok(rates_along(AxisView::new(model, axis), &orbit))
}
