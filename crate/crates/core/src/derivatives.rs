//! Finite-difference audit of a model's analytic boundary partials.
//!
//! First partials are compared with a central difference of the log rate;
//! second partials with a central difference of the analytic first
//! partial. The step is `1e-5 * max(1, s)` and the error is measured
//! relative to `max(|analytic|, 1)`.

use serde::Serialize;

use crate::grid;
use crate::model::{Axis, GrowthModel};

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOLERANCE: f64 = 1e-6;
pub const FD_POINTS: usize = 50;
const GRID_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Partial {
    Fx,
    Fxx,
    Gx,
    Gxx,
    Fy,
    Fyy,
    Gy,
    Gyy,
}

impl Partial {
    pub const ALL: [Partial; 8] = [
        Partial::Fx,
        Partial::Fxx,
        Partial::Gx,
        Partial::Gxx,
        Partial::Fy,
        Partial::Fyy,
        Partial::Gy,
        Partial::Gyy,
    ];

    pub fn axis(self) -> Axis {
        match self {
            Partial::Fx | Partial::Fxx | Partial::Gx | Partial::Gxx => Axis::X,
            _ => Axis::Y,
        }
    }

    fn analytic(self, m: &dyn GrowthModel, s: f64) -> f64 {
        match self {
            Partial::Fx => m.fx_axis(s),
            Partial::Fxx => m.fxx_axis(s),
            Partial::Gx => m.gx_axis(s),
            Partial::Gxx => m.gxx_axis(s),
            Partial::Fy => m.fy_axis(s),
            Partial::Fyy => m.fyy_axis(s),
            Partial::Gy => m.gy_axis(s),
            Partial::Gyy => m.gyy_axis(s),
        }
    }

    /// The function this partial differentiates.
    fn antiderivative(self, m: &dyn GrowthModel, s: f64) -> f64 {
        match self {
            Partial::Fx => m.log_f(s, 0.0),
            Partial::Gx => m.log_g(s, 0.0),
            Partial::Fy => m.log_f(0.0, s),
            Partial::Gy => m.log_g(0.0, s),
            Partial::Fxx => m.fx_axis(s),
            Partial::Gxx => m.gx_axis(s),
            Partial::Fyy => m.fy_axis(s),
            Partial::Gyy => m.gy_axis(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialCheck {
    pub partial: Partial,
    pub at: f64,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_err: f64,
}

/// Central difference of `h` at `s` with the module's step rule.
pub fn central_difference(h: impl Fn(f64) -> f64, s: f64) -> f64 {
    let step = FD_STEP * s.abs().max(1.0);
    (h(s + step) - h(s - step)) / (2.0 * step)
}

/// Checks one partial at one point; `None` where the log rate is not finite.
pub fn check_partial(model: &dyn GrowthModel, partial: Partial, s: f64) -> Option<PartialCheck> {
    let analytic = partial.analytic(model, s);
    let numeric = central_difference(|t| partial.antiderivative(model, t), s);
    if !analytic.is_finite() || !numeric.is_finite() {
        return None;
    }
    let rel_err = (analytic - numeric).abs() / analytic.abs().max(1.0);
    Some(PartialCheck {
        partial,
        at: s,
        analytic,
        numeric,
        rel_err,
    })
}

/// Every partial on `FD_POINTS` geometric points over `[1e-3, tail_cap]`.
pub fn audit(model: &dyn GrowthModel) -> Vec<PartialCheck> {
    let caps = model.tail_caps();
    let mut out = Vec::with_capacity(8 * FD_POINTS);
    for partial in Partial::ALL {
        let cap = caps.along(partial.axis());
        for s in grid::geometric(GRID_FLOOR.min(cap), cap, FD_POINTS) {
            if let Some(c) = check_partial(model, partial, s) {
                out.push(c);
            }
        }
    }
    out
}

/// Checks that exceed `FD_TOLERANCE`; empty when the model is consistent.
pub fn mismatches(model: &dyn GrowthModel) -> Vec<PartialCheck> {
    audit(model)
        .into_iter()
        .filter(|c| c.rel_err >= FD_TOLERANCE)
        .collect()
}
