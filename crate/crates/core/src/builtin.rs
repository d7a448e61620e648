//! The builtin model families.
//!
//! Each family carries closed-form log rates and closed-form boundary
//! partials. [`BuiltinModel`] dispatches the [`GrowthModel`] surface to
//! whichever family it holds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GrowthModel, TailCaps};

/// Positive roots of `r(1 - s) - m/(1 + b s) = 0`, smaller first.
///
/// Both roots are returned even when one is negative; callers filter.
/// `None` when the discriminant is negative.
pub fn allee_roots(r: f64, m: f64, b: f64) -> Option<(f64, f64)> {
    let disc = r * r * (1.0 + b) * (1.0 + b) - 4.0 * m * b * r;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let lead = r * (b - 1.0);
    Some(((lead - sq) / (2.0 * r * b), (lead + sq) / (2.0 * r * b)))
}

/// Single-species map `s' = s exp(r(1 - s) - m/(1 + b s))`: a Ricker map
/// with survival from a saturating predator.
///
/// Embedded as two identical, uncoupled species so it can run through the
/// two-species machinery; `m = 0` gives the plain Ricker map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredationAllee {
    pub r: f64,
    pub m: f64,
    pub b: f64,
}

impl PredationAllee {
    pub fn log_rate(&self, s: f64) -> f64 {
        self.r * (1.0 - s) - self.m / (1.0 + self.b * s)
    }

    pub fn slope(&self, s: f64) -> f64 {
        let d = 1.0 + self.b * s;
        -self.r + self.b * self.m / (d * d)
    }

    pub fn curvature(&self, s: f64) -> f64 {
        let d = 1.0 + self.b * s;
        -2.0 * self.b * self.b * self.m / (d * d * d)
    }

    pub fn step(&self, s: f64) -> f64 {
        s * self.log_rate(s).exp()
    }

    /// `r < m < r (b+1)^2 / (4b)` with `b > 1`: zero is stable and two
    /// positive equilibria exist.
    pub fn has_strong_allee(&self) -> bool {
        self.b > 1.0
            && self.r < self.m
            && self.m < self.r * (self.b + 1.0) * (self.b + 1.0) / (4.0 * self.b)
    }

    pub fn equilibria(&self) -> Option<(f64, f64)> {
        allee_roots(self.r, self.m, self.b)
    }
}

/// Competition where y has a strong Allee effect and benefits from x
/// below the threshold `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongAlleeCompetition {
    pub r1: f64,
    pub r2: f64,
    pub m1: f64,
    pub m2: f64,
    pub b1: f64,
    pub b2: f64,
    pub a: f64,
    pub c: f64,
}

impl StrongAlleeCompetition {
    /// Parameter values from the worked example accompanying the
    /// closed-form permanence criteria (`c > 21`; 22 is used here).
    pub fn example() -> Self {
        StrongAlleeCompetition {
            r1: 4.1,
            r2: 0.85,
            m1: 4.0,
            m2: 1.0,
            b1: 1.0,
            b2: 2.5,
            a: 1.0,
            c: 22.0,
        }
    }
}

/// Competition with a weak Allee effect in both species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakAlleeCompetition {
    pub r1: f64,
    pub r2: f64,
    pub m1: f64,
    pub m2: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

/// Prey x with a weak Allee effect, predator y that cannot persist alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredatorPrey {
    pub r: f64,
    pub b: f64,
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub d: f64,
}

impl PredatorPrey {
    /// Prey fixed point `a + sqrt(r/b)`.
    pub fn prey_equilibrium(&self) -> f64 {
        self.a + (self.r / self.b).sqrt()
    }
}

/// Mutualism with saturating (`v11 <= v12`, `v22 <= v21`) benefits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mutualism {
    pub r1: f64,
    pub r2: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    pub v11: f64,
    pub v12: f64,
    pub v21: f64,
    pub v22: f64,
}

/// `c * z^e`, taken as 0 when `c == 0` so `0 * 0^-1` never produces NaN.
fn term(c: f64, z: f64, e: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * z.powf(e)
    }
}

/// Saturating benefit `z^p / (1 + z^q)` and its first two derivatives.
fn benefit(z: f64, p: f64, q: f64) -> (f64, f64, f64) {
    let d = 1.0 + z.powf(q);
    let h = z.powf(p) / d;
    let h1 = term(p, z, p - 1.0) / d - term(q, z, p + q - 1.0) / (d * d);
    let h2 = term(p * (p - 1.0), z, p - 2.0) / d
        - term(2.0 * p * q + q * q - q, z, p + q - 2.0) / (d * d)
        + term(2.0 * q * q, z, p + 2.0 * q - 2.0) / (d * d * d);
    (h, h1, h2)
}

/// Parameters of one builtin family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ModelParams {
    PredationAllee(PredationAllee),
    StrongAlleeCompetition(StrongAlleeCompetition),
    WeakAlleeCompetition(WeakAlleeCompetition),
    PredatorPrey(PredatorPrey),
    Mutualism(Mutualism),
}

impl ModelParams {
    pub fn family(&self) -> &'static str {
        match self {
            ModelParams::PredationAllee(_) => "predation_allee",
            ModelParams::StrongAlleeCompetition(_) => "strong_allee_competition",
            ModelParams::WeakAlleeCompetition(_) => "weak_allee_competition",
            ModelParams::PredatorPrey(_) => "predator_prey",
            ModelParams::Mutualism(_) => "mutualism",
        }
    }

    /// `(name, value)` pairs in declaration order.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        match *self {
            ModelParams::PredationAllee(p) => vec![("r", p.r), ("m", p.m), ("b", p.b)],
            ModelParams::StrongAlleeCompetition(p) => vec![
                ("r1", p.r1),
                ("r2", p.r2),
                ("m1", p.m1),
                ("m2", p.m2),
                ("b1", p.b1),
                ("b2", p.b2),
                ("a", p.a),
                ("c", p.c),
            ],
            ModelParams::WeakAlleeCompetition(p) => vec![
                ("r1", p.r1),
                ("r2", p.r2),
                ("m1", p.m1),
                ("m2", p.m2),
                ("b1", p.b1),
                ("b2", p.b2),
                ("a1", p.a1),
                ("a2", p.a2),
            ],
            ModelParams::PredatorPrey(p) => vec![
                ("r", p.r),
                ("b", p.b),
                ("a", p.a),
                ("c1", p.c1),
                ("c2", p.c2),
                ("d", p.d),
            ],
            ModelParams::Mutualism(p) => vec![
                ("r1", p.r1),
                ("r2", p.r2),
                ("a11", p.a11),
                ("a12", p.a12),
                ("a21", p.a21),
                ("a22", p.a22),
                ("v11", p.v11),
                ("v12", p.v12),
                ("v21", p.v21),
                ("v22", p.v22),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named() {
            if !value.is_finite() {
                return Err(Error::invalid(name, value, "must be finite"));
            }
        }
        let nonneg: &[&str] = match self {
            ModelParams::PredationAllee(_) => &["m"],
            ModelParams::Mutualism(_) => &["v11", "v12", "v21", "v22"],
            _ => &[],
        };
        for (name, value) in self.named() {
            if nonneg.contains(&name) {
                if value < 0.0 {
                    return Err(Error::invalid(name, value, "must be non-negative"));
                }
            } else if value <= 0.0 {
                return Err(Error::invalid(name, value, "must be positive"));
            }
        }
        if let ModelParams::Mutualism(p) = self {
            if p.v11 > p.v12 {
                return Err(Error::invalid("v11", p.v11, "must not exceed v12"));
            }
            if p.v22 > p.v21 {
                return Err(Error::invalid("v22", p.v22, "must not exceed v21"));
            }
        }
        Ok(())
    }
}

/// A validated builtin model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuiltinModel {
    params: ModelParams,
    caps: TailCaps,
}

impl BuiltinModel {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(BuiltinModel {
            params,
            caps: TailCaps::default(),
        })
    }

    pub fn with_tail_caps(mut self, caps: TailCaps) -> Result<Self> {
        if !(caps.x > 0.0 && caps.x.is_finite()) {
            return Err(Error::invalid("tail_caps[0]", caps.x, "must be positive and finite"));
        }
        if !(caps.y > 0.0 && caps.y.is_finite()) {
            return Err(Error::invalid("tail_caps[1]", caps.y, "must be positive and finite"));
        }
        self.caps = caps;
        Ok(self)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

pub fn build_predation_allee(p: PredationAllee) -> Result<BuiltinModel> {
    BuiltinModel::new(ModelParams::PredationAllee(p))
}

pub fn build_strong_allee_competition(p: StrongAlleeCompetition) -> Result<BuiltinModel> {
    BuiltinModel::new(ModelParams::StrongAlleeCompetition(p))
}

pub fn build_weak_allee_competition(p: WeakAlleeCompetition) -> Result<BuiltinModel> {
    BuiltinModel::new(ModelParams::WeakAlleeCompetition(p))
}

pub fn build_predator_prey(p: PredatorPrey) -> Result<BuiltinModel> {
    BuiltinModel::new(ModelParams::PredatorPrey(p))
}

pub fn build_mutualism(p: Mutualism) -> Result<BuiltinModel> {
    BuiltinModel::new(ModelParams::Mutualism(p))
}

impl GrowthModel for BuiltinModel {
    fn id(&self) -> String {
        let body: Vec<String> = self
            .params
            .named()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{}({})", self.params.family(), body.join(","))
    }

    fn log_f(&self, x: f64, y: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(p) => p.log_rate(x),
            ModelParams::StrongAlleeCompetition(p) => {
                p.r1 * (1.0 - x) - p.m1 * y / (1.0 + p.b1 * y)
            }
            ModelParams::WeakAlleeCompetition(p) => {
                p.r1 * (1.0 - x) - p.m1 / (1.0 + p.b1 * x) - p.a1 * y
            }
            ModelParams::PredatorPrey(p) => p.r - p.b * (x - p.a) * (x - p.a) - p.c1 * y,
            ModelParams::Mutualism(p) => p.r1 - p.a11 * x + p.a12 * benefit(y, p.v11, p.v12).0,
        }
    }

    fn log_g(&self, x: f64, y: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(p) => p.log_rate(y),
            ModelParams::StrongAlleeCompetition(p) => {
                p.r2 * (1.0 - y) - p.m2 / (1.0 + p.b2 * y) - p.a * x * (x - p.c)
            }
            ModelParams::WeakAlleeCompetition(p) => {
                p.r2 * (1.0 - y) - p.m2 / (1.0 + p.b2 * y) - p.a2 * x
            }
            ModelParams::PredatorPrey(p) => p.c2 * x * x - p.d * y,
            ModelParams::Mutualism(p) => p.r2 - p.a22 * y + p.a21 * benefit(x, p.v22, p.v21).0,
        }
    }

    fn fx_axis(&self, x: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(p) => p.slope(x),
            ModelParams::StrongAlleeCompetition(p) => -p.r1,
            ModelParams::WeakAlleeCompetition(p) => {
                let d = 1.0 + p.b1 * x;
                -p.r1 + p.b1 * p.m1 / (d * d)
            }
            ModelParams::PredatorPrey(p) => -2.0 * p.b * (x - p.a),
            ModelParams::Mutualism(p) => -p.a11,
        }
    }

    fn fxx_axis(&self, x: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(p) => p.curvature(x),
            ModelParams::StrongAlleeCompetition(_) => 0.0,
            ModelParams::WeakAlleeCompetition(p) => {
                let d = 1.0 + p.b1 * x;
                -2.0 * p.b1 * p.b1 * p.m1 / (d * d * d)
            }
            ModelParams::PredatorPrey(p) => -2.0 * p.b,
            ModelParams::Mutualism(_) => 0.0,
        }
    }

    fn gx_axis(&self, x: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(_) => 0.0,
            ModelParams::StrongAlleeCompetition(p) => p.a * (p.c - 2.0 * x),
            ModelParams::WeakAlleeCompetition(p) => -p.a2,
            ModelParams::PredatorPrey(p) => 2.0 * p.c2 * x,
            ModelParams::Mutualism(p) => p.a21 * benefit(x, p.v22, p.v21).1,
        }
    }

    fn gxx_axis(&self, x: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(_) => 0.0,
            ModelParams::StrongAlleeCompetition(p) => -2.0 * p.a,
            ModelParams::WeakAlleeCompetition(_) => 0.0,
            ModelParams::PredatorPrey(p) => 2.0 * p.c2,
            ModelParams::Mutualism(p) => p.a21 * benefit(x, p.v22, p.v21).2,
        }
    }

    fn fy_axis(&self, y: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(_) => 0.0,
            ModelParams::StrongAlleeCompetition(p) => {
                let d = 1.0 + p.b1 * y;
                -p.m1 / (d * d)
            }
            ModelParams::WeakAlleeCompetition(p) => -p.a1,
            ModelParams::PredatorPrey(p) => -p.c1,
            ModelParams::Mutualism(p) => p.a12 * benefit(y, p.v11, p.v12).1,
        }
    }

    fn fyy_axis(&self, y: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(_) => 0.0,
            ModelParams::StrongAlleeCompetition(p) => {
                let d = 1.0 + p.b1 * y;
                2.0 * p.b1 * p.m1 / (d * d * d)
            }
            ModelParams::WeakAlleeCompetition(_) => 0.0,
            ModelParams::PredatorPrey(_) => 0.0,
            ModelParams::Mutualism(p) => p.a12 * benefit(y, p.v11, p.v12).2,
        }
    }

    fn gy_axis(&self, y: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(p) => p.slope(y),
            ModelParams::StrongAlleeCompetition(p) => {
                let d = 1.0 + p.b2 * y;
                -p.r2 + p.b2 * p.m2 / (d * d)
            }
            ModelParams::WeakAlleeCompetition(p) => {
                let d = 1.0 + p.b2 * y;
                -p.r2 + p.b2 * p.m2 / (d * d)
            }
            ModelParams::PredatorPrey(p) => -p.d,
            ModelParams::Mutualism(p) => -p.a22,
        }
    }

    fn gyy_axis(&self, y: f64) -> f64 {
        match self.params {
            ModelParams::PredationAllee(p) => p.curvature(y),
            ModelParams::StrongAlleeCompetition(p) => {
                let d = 1.0 + p.b2 * y;
                -2.0 * p.b2 * p.b2 * p.m2 / (d * d * d)
            }
            ModelParams::WeakAlleeCompetition(p) => {
                let d = 1.0 + p.b2 * y;
                -2.0 * p.b2 * p.b2 * p.m2 / (d * d * d)
            }
            ModelParams::PredatorPrey(_) => 0.0,
            ModelParams::Mutualism(_) => 0.0,
        }
    }

    fn tail_caps(&self) -> TailCaps {
        self.caps
    }
}
