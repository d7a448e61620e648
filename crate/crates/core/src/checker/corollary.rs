//! Closed-form permanence criteria for the builtin competition and
//! predator–prey families. Informational: the verdict itself always rests
//! on the condition checks.

use serde::Serialize;

use crate::builtin::{allee_roots, ModelParams, PredatorPrey, StrongAlleeCompetition, WeakAlleeCompetition};

use super::report::{Basis, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub name: String,
    pub verdict: Verdict,
    pub margin: f64,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub corollary: Basis,
    pub verdict: Verdict,
    pub conditions: Vec<ClosedForm>,
}

fn item(name: &str, statement: &str, parts: &[(f64, bool)]) -> ClosedForm {
    // (slack, strict)
    let mut verdict = Verdict::Holds;
    let mut margin = f64::INFINITY;
    for &(slack, strict) in parts {
        let v = if strict { Verdict::strict(slack) } else { Verdict::non_strict(slack) };
        verdict = verdict.and(v);
        margin = margin.min(slack);
    }
    ClosedForm {
        name: name.into(),
        verdict,
        margin,
        statement: statement.into(),
    }
}

fn report(corollary: Basis, conditions: Vec<ClosedForm>) -> CorollaryReport {
    let verdict = conditions.iter().fold(Verdict::Holds, |v, c| v.and(c.verdict));
    CorollaryReport {
        corollary,
        verdict,
        conditions,
    }
}

pub fn strong_allee(p: &StrongAlleeCompetition) -> CorollaryReport {
    let peak = (p.r1 - 1.0).exp() / p.r1;
    let worst = p.a.max(p.a * (peak - 1.0).powi(2));
    report(
        Basis::Corollary3,
        vec![
            item(
                "condition 1",
                "r2 < m2 < r2 (b2+1)^2 / (4 b2) and b2 > 1",
                &[
                    (p.m2 - p.r2, true),
                    (p.r2 * (p.b2 + 1.0).powi(2) / (4.0 * p.b2) - p.m2, true),
                    (p.b2 - 1.0, true),
                ],
            ),
            item(
                "condition 2",
                "a(c-1) + r2 - m2 - max{a, a (e^(r1-1)/r1 - 1)^2} > 0 and r1 > max{m1, m1/b1}",
                &[
                    (p.a * (p.c - 1.0) + p.r2 - p.m2 - worst, true),
                    (p.r1 - p.m1.max(p.m1 / p.b1), true),
                ],
            ),
            item(
                "condition 3",
                "b1 <= b2 and m1 (b2 m2 - r2) > b2^2 m2",
                &[
                    (p.b2 - p.b1, false),
                    (p.m1 * (p.b2 * p.m2 - p.r2) - p.b2 * p.b2 * p.m2, true),
                ],
            ),
        ],
    )
}

pub fn weak_allee(p: &WeakAlleeCompetition) -> CorollaryReport {
    let c1 = item(
        "condition 1",
        "r1 > m1 and r2 > m2",
        &[(p.r1 - p.m1, true), (p.r2 - p.m2, true)],
    );
    let roots = allee_roots(p.r1, p.m1, p.b1).zip(allee_roots(p.r2, p.m2, p.b2));
    let Some(((_, xs), (_, ys))) = roots else {
        let missing = |name: &str| ClosedForm {
            name: name.into(),
            verdict: Verdict::Inconclusive,
            margin: f64::NAN,
            statement: "boundary equilibria do not exist".into(),
        };
        return report(Basis::Corollary4, vec![c1, missing("condition 2"), missing("condition 3")]);
    };
    let f0y = p.r1 - p.m1 - p.a1 * ys;
    let gx0 = p.r2 - p.m2 - p.a2 * xs;
    report(
        Basis::Corollary4,
        vec![
            c1,
            item("condition 2", "F(0,y*) > 0 and G(x*,0) > 0", &[(f0y, true), (gx0, true)]),
            item(
                "condition 3",
                "r2 > b2 m2 / (1 + b2 y*)^2 and r1 > b1 m1 / (1 + b1 x*)^2",
                &[
                    (p.r2 - p.b2 * p.m2 / (1.0 + p.b2 * ys).powi(2), true),
                    (p.r1 - p.b1 * p.m1 / (1.0 + p.b1 * xs).powi(2), true),
                ],
            ),
        ],
    )
}

pub fn predator_prey(p: &PredatorPrey) -> CorollaryReport {
    report(
        Basis::Corollary5,
        vec![
            item("hypothesis", "r > b a^2", &[(p.r - p.b * p.a * p.a, true)]),
            item(
                "condition",
                "a^2 < r (b + 1/b - 2)",
                &[(p.r * (p.b + 1.0 / p.b - 2.0) - p.a * p.a, true)],
            ),
        ],
    )
}

pub fn corollary_report(params: &ModelParams) -> Option<CorollaryReport> {
    match params {
        ModelParams::StrongAlleeCompetition(p) => Some(strong_allee(p)),
        ModelParams::WeakAlleeCompetition(p) => Some(weak_allee(p)),
        ModelParams::PredatorPrey(p) => Some(predator_prey(p)),
        _ => None,
    }
}
