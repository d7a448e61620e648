//! Sufficient conditions for permanence and the verdicts built from them.
//!
//! Two routes: the general one (H, G1–G4, with integral alternatives for
//! G3/G4) and the predator–prey one (H, P1–P4). Both are sufficient only,
//! so a verdict of `NotEstablished` is not a proof of non-permanence.

pub mod conditions;
pub mod corollary;
mod report;

use serde::{Deserialize, Serialize};

use crate::builtin::BuiltinModel;
use crate::fixed_points::boundary_fixed_points;
use crate::model::{Axis, GrowthModel, OriginClass};

pub use conditions::{
    check_g1, check_g2, check_g3, check_g4, check_h, check_p1, check_p2, check_p3, check_p4, Form,
};
pub use corollary::{corollary_report, ClosedForm, CorollaryReport};
pub use report::{
    Basis, Conclusion, ConditionEntry, ConditionId, PermanenceVerdict, Route, Verdict, STRICT_MARGIN,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteChoice {
    #[default]
    Auto,
    General,
    PredPrey,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantChoice {
    #[default]
    Auto,
    Point,
    Integral,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub route: RouteChoice,
    pub variant: VariantChoice,
}

/// Runs a pointwise/integral pair according to the variant choice.
/// Returns the entries produced and whether the integral form decided.
fn paired(
    variant: VariantChoice,
    check: impl Fn(Form) -> ConditionEntry,
) -> (Vec<ConditionEntry>, Verdict, bool) {
    match variant {
        VariantChoice::Point => {
            let e = check(Form::Pointwise);
            let v = e.verdict;
            (vec![e], v, false)
        }
        VariantChoice::Integral => {
            let e = check(Form::Integral);
            let v = e.verdict;
            (vec![e], v, true)
        }
        VariantChoice::Auto => {
            let p = check(Form::Pointwise);
            if p.verdict.holds() {
                return (vec![p], Verdict::Holds, false);
            }
            let i = check(Form::Integral);
            let v = p.verdict.or(i.verdict);
            let used_integral = i.verdict.holds();
            (vec![p, i], v, used_integral)
        }
    }
}

pub fn theorem_verdict(model: &dyn GrowthModel, options: CheckOptions) -> PermanenceVerdict {
    let origin_class = model.origin_class();
    let h = check_h(model);
    let p1 = check_p1(model);
    let route = match options.route {
        RouteChoice::General => Route::General,
        RouteChoice::PredPrey => Route::PredatorPrey,
        RouteChoice::Auto if p1.verdict.holds() || origin_class == OriginClass::One => Route::PredatorPrey,
        RouteChoice::Auto => Route::General,
    };

    let mut conditions = vec![h];
    let mut blocking = Vec::new();
    let mut notes = Vec::new();
    let require = |e: &ConditionEntry, blocking: &mut Vec<ConditionId>| {
        if !e.verdict.holds() {
            blocking.push(e.id);
        }
    };
    require(&conditions[0], &mut blocking);

    let basis = match route {
        Route::PredatorPrey => {
            require(&p1, &mut blocking);
            conditions.push(p1);
            for e in [check_p2(model), check_p3(model)] {
                require(&e, &mut blocking);
                conditions.push(e);
            }
            let (entries, v, _) = paired(options.variant, |f| check_p4(model, f));
            if !v.holds() {
                blocking.extend(entries.iter().map(|e| e.id));
            }
            conditions.extend(entries);
            Basis::Theorem2
        }
        Route::General => {
            conditions.push(p1);
            for e in [check_g1(model), check_g2(model)] {
                require(&e, &mut blocking);
                conditions.push(e);
            }
            let mut integral = false;
            for check in [check_g3 as fn(&dyn GrowthModel, Form) -> ConditionEntry, check_g4] {
                let (entries, v, used) = paired(options.variant, |f| check(model, f));
                if !v.holds() {
                    blocking.extend(entries.iter().map(|e| e.id));
                }
                integral |= used;
                conditions.extend(entries);
            }
            if integral {
                Basis::Corollary2
            } else {
                Basis::Theorem1
            }
        }
    };

    let conclusion = if blocking.is_empty() {
        Conclusion::Permanent
    } else {
        notes.push("the conditions are sufficient only; this is not evidence against permanence".into());
        Conclusion::NotEstablished
    };
    let mut fixed_points = boundary_fixed_points(model, Axis::X);
    fixed_points.extend(boundary_fixed_points(model, Axis::Y));
    PermanenceVerdict {
        model_id: model.id(),
        conclusion,
        basis,
        route,
        origin_class,
        conditions,
        blocking,
        fixed_points,
        corollary: None,
        notes,
    }
}

/// [`theorem_verdict`] plus the family's closed-form criteria.
pub fn check_builtin(model: &BuiltinModel, options: CheckOptions) -> PermanenceVerdict {
    let mut v = theorem_verdict(model, options);
    v.corollary = corollary_report(model.params());
    v
}
