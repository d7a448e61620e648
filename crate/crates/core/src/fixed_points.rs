//! Nontrivial boundary fixed points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid;
use crate::model::{Axis, AxisView, GrowthModel};
use crate::roots;

pub const SEARCH_POINTS: usize = 10_000;
pub const SEARCH_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryFixedPoint {
    pub axis: Axis,
    pub coordinate: f64,
    /// `|F(x*,0)|` or `|G(0,y*)|`.
    pub residual: f64,
    /// Resident slope `F_x(x*,0)` or `G_y(0,y*)`.
    pub slope: f64,
    /// Invader log rate `G(x*,0)` or `F(0,y*)`.
    pub cross_rate: f64,
    /// Invader factor at the point is at least one.
    pub unsaturated: bool,
}

impl BoundaryFixedPoint {
    pub fn point(&self) -> (f64, f64) {
        self.axis.point(self.coordinate)
    }
}

/// Sign changes of the resident log rate on a geometric grid over
/// `interval`, bisected to machine precision.
pub fn find_boundary_fixed_points(
    model: &dyn GrowthModel,
    axis: Axis,
    interval: (f64, f64),
) -> Result<Vec<BoundaryFixedPoint>> {
    let (lo, hi) = interval;
    let view = AxisView::new(model, axis);
    if !(lo > 0.0 && hi > lo && hi <= view.cap()) {
        return Err(Error::InvalidInput(format!(
            "fixed-point interval [{lo}, {hi}] must lie in (0, {}]",
            view.cap()
        )));
    }
    let pts = grid::geometric(lo, hi, SEARCH_POINTS);
    let rate = |s: f64| view.resident_log(s);
    let mut out = Vec::new();
    for (a, b) in roots::sign_brackets(rate, &pts) {
        let Some(s) = roots::bisect(rate, a, b, 0.0) else { continue };
        let cross_rate = view.invader_log(s);
        out.push(BoundaryFixedPoint {
            axis,
            coordinate: s,
            residual: rate(s).abs(),
            slope: view.resident_slope(s),
            cross_rate,
            unsaturated: cross_rate >= 0.0,
        });
    }
    Ok(out)
}

/// Fixed points over the default search interval `[1e-8, tail_cap]`.
pub fn boundary_fixed_points(model: &dyn GrowthModel, axis: Axis) -> Vec<BoundaryFixedPoint> {
    let cap = model.tail_caps().along(axis);
    find_boundary_fixed_points(model, axis, (SEARCH_FLOOR.min(cap / 2.0), cap))
        .expect("default interval is valid")
}
