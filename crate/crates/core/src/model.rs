//! The two-species map abstraction.
//!
//! A model advances densities by
//!
//! ```text
//! x' = x * f(x, y)
//! y' = y * g(x, y)
//! ```
//!
//! and is described through its log per-capita rates `F = ln f` and
//! `G = ln g`, plus the first and second partial derivatives of `F` and
//! `G` along the two boundary axes. Everything downstream (orbits,
//! exponent decompositions, condition checks) works from this surface.

use serde::{Deserialize, Serialize};

/// Default sampling caps standing in for limits at infinity.
pub const DEFAULT_TAIL_CAP: f64 = 1e6;

/// One of the two invariant boundary axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// `S_x = {(x, 0)}`: species x resident, y invading.
    X,
    /// `S_y = {(0, y)}`: species y resident, x invading.
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }

    /// The planar point at coordinate `s` on this axis.
    pub fn point(self, s: f64) -> (f64, f64) {
        match self {
            Axis::X => (s, 0.0),
            Axis::Y => (0.0, s),
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            other => Err(format!("unknown axis `{other}`, expected x or y")),
        }
    }
}

/// Where `g(0,0)` sits relative to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OriginClass {
    #[serde(rename = "g00_gt_1")]
    AboveOne,
    #[serde(rename = "g00_in_0_1")]
    BelowOne,
    #[serde(rename = "g00_eq_0")]
    Zero,
    #[serde(rename = "g00_eq_1")]
    One,
}

impl OriginClass {
    /// Classify from `G(0,0) = ln g(0,0)`; `-inf` means `g(0,0) = 0`.
    pub fn from_log(log_g00: f64) -> OriginClass {
        if log_g00 == f64::NEG_INFINITY {
            OriginClass::Zero
        } else if log_g00.abs() <= 1e-12 {
            OriginClass::One
        } else if log_g00 > 0.0 {
            OriginClass::AboveOne
        } else {
            OriginClass::BelowOne
        }
    }
}

/// Sampling caps `(x_max, y_max)` for the limits at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCaps {
    pub x: f64,
    pub y: f64,
}

impl Default for TailCaps {
    fn default() -> Self {
        TailCaps {
            x: DEFAULT_TAIL_CAP,
            y: DEFAULT_TAIL_CAP,
        }
    }
}

impl TailCaps {
    pub fn along(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
        }
    }
}

/// A two-species map given by its log per-capita rates.
///
/// `log_g` returns `-inf` where `g = 0`. Implementations must be pure;
/// the analysis runs them from several threads at once.
pub trait GrowthModel: Send + Sync {
    /// Identifier used in reports and orbit provenance.
    fn id(&self) -> String;

    /// `F(x, y) = ln f(x, y)`.
    fn log_f(&self, x: f64, y: f64) -> f64;
    /// `G(x, y) = ln g(x, y)`.
    fn log_g(&self, x: f64, y: f64) -> f64;

    fn f(&self, x: f64, y: f64) -> f64 {
        self.log_f(x, y).exp()
    }
    fn g(&self, x: f64, y: f64) -> f64 {
        self.log_g(x, y).exp()
    }

    /// `dF/dx` at `(x, 0)`.
    fn fx_axis(&self, x: f64) -> f64;
    /// `d2F/dx2` at `(x, 0)`.
    fn fxx_axis(&self, x: f64) -> f64;
    /// `dG/dx` at `(x, 0)`.
    fn gx_axis(&self, x: f64) -> f64;
    /// `d2G/dx2` at `(x, 0)`.
    fn gxx_axis(&self, x: f64) -> f64;
    /// `dF/dy` at `(0, y)`.
    fn fy_axis(&self, y: f64) -> f64;
    /// `d2F/dy2` at `(0, y)`.
    fn fyy_axis(&self, y: f64) -> f64;
    /// `dG/dy` at `(0, y)`.
    fn gy_axis(&self, y: f64) -> f64;
    /// `d2G/dy2` at `(0, y)`.
    fn gyy_axis(&self, y: f64) -> f64;

    fn tail_caps(&self) -> TailCaps {
        TailCaps::default()
    }

    fn origin_class(&self) -> OriginClass {
        OriginClass::from_log(self.log_g(0.0, 0.0))
    }
}

/// A model restricted to one boundary axis, seen from the resident's side.
///
/// On `S_x` the resident is x (rate `F(s,0)`) and the invader is y (rate
/// `G(s,0)`); on `S_y` the roles swap. Code that treats both axes
/// symmetrically goes through this view.
#[derive(Clone, Copy)]
pub struct AxisView<'a> {
    pub model: &'a dyn GrowthModel,
    pub axis: Axis,
}

impl<'a> AxisView<'a> {
    pub fn new(model: &'a dyn GrowthModel, axis: Axis) -> Self {
        AxisView { model, axis }
    }

    pub fn resident_log(&self, s: f64) -> f64 {
        match self.axis {
            Axis::X => self.model.log_f(s, 0.0),
            Axis::Y => self.model.log_g(0.0, s),
        }
    }

    pub fn invader_log(&self, s: f64) -> f64 {
        match self.axis {
            Axis::X => self.model.log_g(s, 0.0),
            Axis::Y => self.model.log_f(0.0, s),
        }
    }

    pub fn resident_slope(&self, s: f64) -> f64 {
        match self.axis {
            Axis::X => self.model.fx_axis(s),
            Axis::Y => self.model.gy_axis(s),
        }
    }

    pub fn resident_curvature(&self, s: f64) -> f64 {
        match self.axis {
            Axis::X => self.model.fxx_axis(s),
            Axis::Y => self.model.gyy_axis(s),
        }
    }

    pub fn invader_slope(&self, s: f64) -> f64 {
        match self.axis {
            Axis::X => self.model.gx_axis(s),
            Axis::Y => self.model.fy_axis(s),
        }
    }

    pub fn invader_curvature(&self, s: f64) -> f64 {
        match self.axis {
            Axis::X => self.model.gxx_axis(s),
            Axis::Y => self.model.fyy_axis(s),
        }
    }

    /// Per-capita log rate of the resident at low density, `F(0,0)` or `G(0,0)`.
    pub fn resident_origin_log(&self) -> f64 {
        self.resident_log(0.0)
    }

    /// Log rate of the resident coordinate at an arbitrary planar point.
    pub fn own_log(&self, own: f64, other: f64) -> f64 {
        match self.axis {
            Axis::X => self.model.log_f(own, other),
            Axis::Y => self.model.log_g(other, own),
        }
    }

    pub fn cap(&self) -> f64 {
        self.model.tail_caps().along(self.axis)
    }

    pub fn other_cap(&self) -> f64 {
        self.model.tail_caps().along(self.axis.other())
    }
}
