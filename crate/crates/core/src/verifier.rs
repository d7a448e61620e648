//! Empirical permanence: sweep interior initial conditions and record how
//! close orbits come to the boundary and how far out they go.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::checker::{Conclusion, PermanenceVerdict};
use crate::error::{Error, Result};
use crate::grid;
use crate::model::GrowthModel;
use crate::orbit::Stepper;

pub const EXTINCTION_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_BURN_IN: usize = 10_000;
pub const DEFAULT_HORIZON: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepGrid {
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub spacing: Spacing,
}

impl SweepGrid {
    /// 20×20 log-spaced over `[1e-3, 3]²`.
    pub fn standard() -> Self {
        SweepGrid {
            nx: 20,
            ny: 20,
            x_range: (1e-3, 3.0),
            y_range: (1e-3, 3.0),
            spacing: Spacing::Log,
        }
    }

    /// A single initial condition.
    pub fn point(x: f64, y: f64) -> Self {
        SweepGrid {
            nx: 1,
            ny: 1,
            x_range: (x, x),
            y_range: (y, y),
            spacing: Spacing::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidInput("sweep grid needs at least one point per axis".into()));
        }
        for (name, (lo, hi)) in [("x", self.x_range), ("y", self.y_range)] {
            if !(lo > 0.0 && lo.is_finite() && hi.is_finite() && hi >= lo) {
                return Err(Error::InvalidInput(format!(
                    "{name} range [{lo}, {hi}] must satisfy 0 < lo <= hi < inf"
                )));
            }
        }
        Ok(())
    }

    fn axis(&self, n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => grid::geometric(lo, hi, n),
            Spacing::Linear => grid::linear(lo, hi, n),
        }
    }

    /// Initial conditions in row-major order (x outer, y inner).
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ys = self.axis(self.ny, self.y_range);
        self.axis(self.nx, self.x_range)
            .into_iter()
            .flat_map(|x| ys.iter().map(move |&y| (x, y)))
            .collect()
    }
}

impl fmt::Display for SweepGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} {:?} grid over [{:e}, {:e}] x [{:e}, {:e}]",
            self.nx, self.ny, self.spacing, self.x_range.0, self.x_range.1, self.y_range.0, self.y_range.1
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub x0: f64,
    pub y0: f64,
    /// Smallest `min(x, y)` after burn-in.
    pub tail_min: f64,
    /// Largest `max(x, y)` after burn-in.
    pub tail_max: f64,
    pub divergent: bool,
    pub diverged_at: Option<usize>,
}

/// Tail extrema of one orbit over steps `burn_in + 1 ..= horizon`.
/// Initial conditions on an axis are allowed here.
pub fn tail_extrema(model: &dyn GrowthModel, (x0, y0): (f64, f64), horizon: usize, burn_in: usize) -> Result<SweepPoint> {
    if horizon <= burn_in {
        return Err(Error::InvalidInput(format!("horizon {horizon} must exceed burn-in {burn_in}")));
    }
    let mut stepper = Stepper::new(model, x0, y0)?;
    let mut point = SweepPoint {
        x0,
        y0,
        tail_min: f64::INFINITY,
        tail_max: 0.0,
        divergent: false,
        diverged_at: None,
    };
    for t in 1..=horizon {
        match stepper.step() {
            Ok(s) if t > burn_in => {
                point.tail_min = point.tail_min.min(s.min());
                point.tail_max = point.tail_max.max(s.max());
            }
            Ok(_) => {}
            Err(Error::Overflow { step }) => {
                point.divergent = true;
                point.diverged_at = Some(step);
                point.tail_max = f64::INFINITY;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(point)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub horizon: usize,
    pub burn_in: usize,
    pub extinction_threshold: f64,
    pub points: Vec<SweepPoint>,
    /// Minimum over the grid of the tail minima.
    pub b_hat: f64,
    /// Maximum over the grid of the tail maxima.
    #[serde(rename = "B_hat")]
    pub big_b_hat: f64,
    pub persistent: bool,
    pub divergent: usize,
}

pub fn empirical_verify(model: &dyn GrowthModel, grid: SweepGrid, horizon: usize, burn_in: usize) -> Result<SweepResult> {
    grid.validate()?;
    if horizon <= burn_in {
        return Err(Error::InvalidInput(format!("horizon {horizon} must exceed burn-in {burn_in}")));
    }
    let points = grid
        .points()
        .into_par_iter()
        .map(|ic| tail_extrema(model, ic, horizon, burn_in))
        .collect::<Result<Vec<_>>>()?;
    let b_hat = points.iter().map(|p| p.tail_min).fold(f64::INFINITY, f64::min);
    let big_b_hat = points.iter().map(|p| p.tail_max).fold(0.0, f64::max);
    let divergent = points.iter().filter(|p| p.divergent).count();
    Ok(SweepResult {
        grid,
        horizon,
        burn_in,
        extinction_threshold: EXTINCTION_THRESHOLD,
        // a divergent orbit has no upper bound, so the sweep cannot be permanent
        persistent: divergent == 0 && b_hat > EXTINCTION_THRESHOLD,
        b_hat,
        big_b_hat,
        divergent,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Consistency {
    Consistent,
    Contradiction,
}

impl fmt::Display for Consistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Consistency::Consistent => "CONSISTENT",
            Consistency::Contradiction => "CONTRADICTION",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub status: Consistency,
    pub conclusion: Conclusion,
    pub persistent: bool,
    pub b_hat: f64,
    pub note: Option<String>,
}

pub fn cross_validate(verdict: &PermanenceVerdict, sweep: &SweepResult) -> ConsistencyReport {
    let (status, note) = match (verdict.conclusion, sweep.persistent) {
        (Conclusion::Permanent, true) => (Consistency::Consistent, None),
        (Conclusion::Permanent, false) => (
            Consistency::Contradiction,
            Some(format!(
                "certified permanent but the sweep reached {:e} (threshold {:e}) with {} divergent orbits",
                sweep.b_hat, sweep.extinction_threshold, sweep.divergent
            )),
        ),
        (Conclusion::NotEstablished, true) => (
            Consistency::Consistent,
            Some("sweep persists where the sufficient conditions are silent".into()),
        ),
        (Conclusion::NotEstablished, false) => (Consistency::Consistent, None),
    };
    ConsistencyReport {
        status,
        conclusion: verdict.conclusion,
        persistent: sweep.persistent,
        b_hat: sweep.b_hat,
        note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::*;
    use crate::checker::{check_builtin, CheckOptions};

    fn weak() -> BuiltinModel {
        build_weak_allee_competition(WeakAlleeCompetition {
            r1: 1.5,
            r2: 1.5,
            m1: 1.0,
            m2: 1.0,
            b1: 2.0,
            b2: 2.0,
            a1: 0.3,
            a2: 0.3,
        })
        .unwrap()
    }

    #[test]
    fn standard_grid_layout() {
        let pts = SweepGrid::standard().points();
        assert_eq!(pts.len(), 400);
        assert_eq!(pts[0], (1e-3, 1e-3));
        assert_eq!(pts[1].0, 1e-3);
        assert_eq!(pts[399], (3.0, 3.0));
    }

    #[test]
    fn rejects_boundary_grid_and_short_horizon() {
        let m = weak();
        assert!(empirical_verify(&m, SweepGrid::point(0.0, 1.0), 10, 1).is_err());
        assert!(empirical_verify(&m, SweepGrid::standard(), 10, 10).is_err());
    }

    #[test]
    fn single_point_at_interior_fixed_point() {
        // symmetric weak-Allee model: x = y = s with r(1 - s) - m/(1 + b s) - a s = 0
        let m = weak();
        let h = |s: f64| 1.5 * (1.0 - s) - 1.0 / (1.0 + 2.0 * s) - 0.3 * s;
        let s = crate::roots::bisect(h, 0.3, 1.0, 0.0).unwrap();
        let r = empirical_verify(&m, SweepGrid::point(s, s), 200, 100).unwrap();
        assert!((r.b_hat - s).abs() < 1e-12, "{} vs {s}", r.b_hat);
        assert!((r.big_b_hat - s).abs() < 1e-12);
    }

    #[test]
    fn strong_allee_resident_below_threshold_dies_out() {
        let p = StrongAlleeCompetition::example();
        let m = build_strong_allee_competition(p).unwrap();
        let (y1, _) = allee_roots(p.r2, p.m2, p.b2).unwrap();
        let pt = tail_extrema(&m, (0.0, 0.9 * y1), 2_000, 1_000).unwrap();
        assert!(pt.tail_max < EXTINCTION_THRESHOLD, "{pt:?}");
    }

    #[test]
    fn divergence_marks_sweep_non_persistent() {
        struct Boom;
        impl GrowthModel for Boom {
            fn id(&self) -> String {
                "boom".into()
            }
            fn log_f(&self, x: f64, _: f64) -> f64 {
                1.0 + x
            }
            fn log_g(&self, _: f64, _: f64) -> f64 {
                0.0
            }
            fn fx_axis(&self, _: f64) -> f64 {
                1.0
            }
            fn fxx_axis(&self, _: f64) -> f64 {
                0.0
            }
            fn gx_axis(&self, _: f64) -> f64 {
                0.0
            }
            fn gxx_axis(&self, _: f64) -> f64 {
                0.0
            }
            fn fy_axis(&self, _: f64) -> f64 {
                0.0
            }
            fn fyy_axis(&self, _: f64) -> f64 {
                0.0
            }
            fn gy_axis(&self, _: f64) -> f64 {
                0.0
            }
            fn gyy_axis(&self, _: f64) -> f64 {
                0.0
            }
        }
        let r = empirical_verify(&Boom, SweepGrid::point(1.0, 1.0), 100, 10).unwrap();
        assert_eq!(r.divergent, 1);
        assert!(!r.persistent);
        assert!(r.points[0].diverged_at.is_some());
    }

    #[test]
    fn sweep_is_deterministic() {
        let m = weak();
        let g = SweepGrid {
            nx: 4,
            ny: 3,
            ..SweepGrid::standard()
        };
        let a = empirical_verify(&m, g, 3_000, 1_000).unwrap();
        let b = empirical_verify(&m, g, 3_000, 1_000).unwrap();
        assert_eq!(a, b);
        assert!(a.b_hat <= a.big_b_hat);
    }

    #[test]
    fn cross_validation_table() {
        let m = weak();
        let mut v = check_builtin(&m, CheckOptions::default());
        let mut s = empirical_verify(&m, SweepGrid::point(0.5, 0.5), 2_000, 1_000).unwrap();
        assert!(v.is_permanent() && s.persistent);
        assert_eq!(cross_validate(&v, &s).status, Consistency::Consistent);
        s.persistent = false;
        let r = cross_validate(&v, &s);
        assert_eq!(r.status, Consistency::Contradiction);
        assert_eq!(r.status.to_string(), "CONTRADICTION");
        v.conclusion = Conclusion::NotEstablished;
        s.persistent = true;
        let r = cross_validate(&v, &s);
        assert_eq!(r.status, Consistency::Consistent);
        assert!(r.note.is_some());
    }
}
