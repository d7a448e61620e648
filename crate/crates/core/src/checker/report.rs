use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::fixed_points::BoundaryFixedPoint;
use crate::model::OriginClass;

use super::corollary::CorollaryReport;

/// Inequalities closer to zero than this are not decided.
pub const STRICT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConditionId {
    H,
    G1,
    G2,
    G3,
    G4,
    #[serde(rename = "G'3")]
    G3Integral,
    #[serde(rename = "G'4")]
    G4Integral,
    P1,
    P2,
    P3,
    P4,
    #[serde(rename = "P'4")]
    P4Integral,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionId::H => "H",
            ConditionId::G1 => "G1",
            ConditionId::G2 => "G2",
            ConditionId::G3 => "G3",
            ConditionId::G4 => "G4",
            ConditionId::G3Integral => "G'3",
            ConditionId::G4Integral => "G'4",
            ConditionId::P1 => "P1",
            ConditionId::P2 => "P2",
            ConditionId::P3 => "P3",
            ConditionId::P4 => "P4",
            ConditionId::P4Integral => "P'4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    /// `v > 0` with a roundoff margin. An exact zero fails: it sits on the
    /// boundary of the inequality rather than near it.
    pub fn strict(v: f64) -> Verdict {
        if v > STRICT_MARGIN {
            Verdict::Holds
        } else if v < -STRICT_MARGIN || v == 0.0 || v.is_nan() {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        }
    }

    /// `v >= 0`, with values just below zero left undecided.
    pub fn non_strict(v: f64) -> Verdict {
        if v >= 0.0 {
            Verdict::Holds
        } else if v <= -STRICT_MARGIN || v.is_nan() {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        }
    }

    fn rank(self) -> u8 {
        match self {
            Verdict::Holds => 2,
            Verdict::Inconclusive => 1,
            Verdict::Fails => 0,
        }
    }

    /// Both must hold.
    pub fn and(self, other: Verdict) -> Verdict {
        if self.rank() <= other.rank() {
            self
        } else {
            other
        }
    }

    /// Either may hold.
    pub fn or(self, other: Verdict) -> Verdict {
        if self.rank() >= other.rank() {
            self
        } else {
            other
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub(crate) fn ordering_key(self) -> u8 {
        self.rank()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One condition's verdict with its numeric evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionEntry {
    pub id: ConditionId,
    pub verdict: Verdict,
    /// Smallest slack of the inequalities involved; negative when violated.
    pub margin: Option<f64>,
    /// Counterexample for a failure, or the binding sample otherwise.
    pub point: Option<[f64; 2]>,
    /// Expansion point of the candidate that decided the verdict.
    pub expansion_point: Option<f64>,
    pub grid: Option<String>,
    pub values: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl ConditionEntry {
    pub fn new(id: ConditionId, verdict: Verdict) -> Self {
        ConditionEntry {
            id,
            verdict,
            margin: None,
            point: None,
            expansion_point: None,
            grid: None,
            values: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn value(mut self, name: &str, v: f64) -> Self {
        self.values.insert(name.to_string(), v);
        self
    }

    pub(crate) fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    Permanent,
    NotEstablished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    Theorem1,
    Theorem2,
    Corollary2,
    Corollary3,
    Corollary4,
    Corollary5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    General,
    PredatorPrey,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermanenceVerdict {
    pub model_id: String,
    pub conclusion: Conclusion,
    /// The result the verdict rests on (or was attempted through).
    pub basis: Basis,
    pub route: Route,
    pub origin_class: OriginClass,
    pub conditions: Vec<ConditionEntry>,
    /// Required conditions that did not hold.
    pub blocking: Vec<ConditionId>,
    pub fixed_points: Vec<BoundaryFixedPoint>,
    /// Closed-form criteria for builtin families; informational.
    pub corollary: Option<CorollaryReport>,
    pub notes: Vec<String>,
}

impl PermanenceVerdict {
    pub fn is_permanent(&self) -> bool {
        self.conclusion == Conclusion::Permanent
    }

    pub fn entry(&self, id: ConditionId) -> Option<&ConditionEntry> {
        self.conditions.iter().find(|c| c.id == id)
    }
}
