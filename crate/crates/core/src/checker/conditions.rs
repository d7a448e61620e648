//! The individual permanence conditions, each checked on finite grids.

use crate::derivatives::FD_STEP;
use crate::dissipativity::{boundary_bound, dissipativity_bound, TAIL_MARGIN};
use crate::fixed_points::{boundary_fixed_points, BoundaryFixedPoint};
use crate::grid;
use crate::lyapunov::Remainder;
use crate::model::{Axis, AxisView, GrowthModel, OriginClass};

use super::report::{ConditionEntry, ConditionId, Verdict};

/// Points in the scans of the relative-nonlinearity conditions.
pub const SCAN_POINTS: usize = 10_000;
pub const SCAN_FLOOR: f64 = 1e-8;
/// Points per coordinate in two-dimensional sample grids.
pub const PLANE_POINTS: usize = 200;
/// Points in the top decade below a tail cap.
pub const TAIL_POINTS: usize = 100;
const CONTINUITY_EPS: f64 = 1e-8;
const CONTINUITY_TOL: f64 = 1e-6;

fn plane_grid(cap: f64) -> Vec<f64> {
    grid::sup_grid(cap, PLANE_POINTS)
}

/// `f(0,0) > 1`, positivity of `f` and `g` away from the origin, and
/// continuity of both rates onto the axes.
pub fn check_h(model: &dyn GrowthModel) -> ConditionEntry {
    let caps = model.tail_caps();
    let f00 = model.log_f(0.0, 0.0);
    let g00 = model.log_g(0.0, 0.0);
    let mut verdict = Verdict::strict(f00);
    let mut point = (verdict != Verdict::Holds).then_some([0.0, 0.0]);
    let mut notes = Vec::new();

    let xs = plane_grid(caps.x);
    let ys = plane_grid(caps.y);
    'outer: for &x in &xs {
        for &y in &ys {
            if x == 0.0 && y == 0.0 {
                continue;
            }
            let (f, g) = (model.log_f(x, y), model.log_g(x, y));
            if !f.is_finite() || !g.is_finite() {
                verdict = Verdict::Fails;
                point.get_or_insert([x, y]);
                notes.push(format!("rate not positive and finite at ({x:e}, {y:e}): ln f = {f}, ln g = {g}"));
                break 'outer;
            }
        }
    }

    // Rates at a distance eps from an axis approach their values on it.
    let jump = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let mut continuity = |on_axis: (f64, f64), off: &dyn Fn(f64) -> (f64, f64), which: &str, h: &dyn Fn(f64, f64) -> f64| {
        let base = h(on_axis.0, on_axis.1);
        let near = off(CONTINUITY_EPS);
        let nearer = off(CONTINUITY_EPS * 1e-2);
        let d1 = jump(h(near.0, near.1), base);
        let d2 = jump(h(nearer.0, nearer.1), base);
        if !(d1 < CONTINUITY_TOL || d2 < 0.5 * d1) && verdict != Verdict::Fails {
            verdict = Verdict::Fails;
            point.get_or_insert([on_axis.0, on_axis.1]);
            notes.push(format!(
                "{which} does not approach its axis value at ({:e}, {:e})",
                on_axis.0, on_axis.1
            ));
        }
    };
    let lf = |x: f64, y: f64| model.log_f(x, y);
    let lg = |x: f64, y: f64| model.log_g(x, y);
    for &y in ys.iter().skip(1) {
        continuity((0.0, y), &|e| (e, y), "ln f", &lf);
        continuity((0.0, y), &|e| (e, y), "ln g", &lg);
    }
    for &x in xs.iter().skip(1) {
        continuity((x, 0.0), &|e| (x, e), "ln f", &lf);
        continuity((x, 0.0), &|e| (x, e), "ln g", &lg);
    }

    let mut e = ConditionEntry::new(ConditionId::H, verdict)
        .value("ln_f00", f00)
        .value("ln_g00", g00);
    e.margin = Some(f00);
    e.point = point;
    e.grid = Some(format!(
        "{n}x{n} grid: 0 and {m} geometric points in [1e-6, cap] per axis; continuity at eps = {CONTINUITY_EPS:e}",
        n = PLANE_POINTS + 1,
        m = PLANE_POINTS
    ));
    e.notes = notes;
    e.notes.push(format!("origin class {:?}", model.origin_class()));
    e
}

/// `sup` over `others` of the own log rate, for each own value in the top
/// decade below the cap. Returns `(max, own, other)` at the worst sample.
fn tail_scan(view: AxisView<'_>, others: &[f64]) -> (f64, f64, f64) {
    let cap = view.cap();
    let mut worst = (f64::NEG_INFINITY, cap, 0.0);
    for s in grid::geometric(cap / 10.0, cap, TAIL_POINTS) {
        for &o in others {
            let v = view.own_log(s, o);
            if v > worst.0 || v.is_nan() {
                worst = (v, s, o);
            }
        }
    }
    worst
}

fn tail_entry(id: ConditionId, parts: Vec<(&str, AxisView<'_>, Vec<f64>)>) -> ConditionEntry {
    let mut e = ConditionEntry::new(id, Verdict::Holds);
    let mut margin = f64::INFINITY;
    for (name, view, others) in parts {
        let (sup_log, s, o) = tail_scan(view, &others);
        let a = sup_log.exp();
        let slack = (1.0 - TAIL_MARGIN) - a;
        let v = Verdict::strict(slack);
        if slack < margin {
            margin = slack;
            let (x, y) = match view.axis {
                Axis::X => (s, o),
                Axis::Y => (o, s),
            };
            e.point = Some([x, y]);
        }
        e.verdict = e.verdict.and(v);
        e.values.insert(name.to_string(), a);
    }
    e.margin = Some(margin);
    e.grid = Some(format!(
        "{TAIL_POINTS} geometric points over the top decade below each tail cap; other coordinate on 0 and {PLANE_POINTS} geometric points"
    ));
    e
}

/// Both per-capita factors fall below one far out, uniformly in the other
/// coordinate.
pub fn check_g1(model: &dyn GrowthModel) -> ConditionEntry {
    let caps = model.tail_caps();
    let vx = AxisView::new(model, Axis::X);
    let vy = AxisView::new(model, Axis::Y);
    let mut e = tail_entry(
        ConditionId::G1,
        vec![("a1", vx, plane_grid(caps.y)), ("a2", vy, plane_grid(caps.x))],
    );
    for (name, axis) in [("l_m_x", Axis::X), ("l_m_y", Axis::Y)] {
        if let Some(l) = dissipativity_bound(model, axis).l_m {
            e.values.insert(name.into(), l);
        }
    }
    e
}

/// The prey factor falls below one far out uniformly in the predator; the
/// predator factor falls below one at large predator density for each prey
/// density the prey can sustain.
pub fn check_p2(model: &dyn GrowthModel) -> ConditionEntry {
    let caps = model.tail_caps();
    let vx = AxisView::new(model, Axis::X);
    let vy = AxisView::new(model, Axis::Y);
    let prey = dissipativity_bound(model, Axis::X);
    let (prey_limit, note) = match prey.l_m {
        Some(l) => (l, format!("prey densities sampled up to its absorbing bound {l:e}")),
        None => (caps.x, "prey bound inconclusive; prey densities sampled up to the tail cap".to_string()),
    };
    let mut e = tail_entry(
        ConditionId::P2,
        vec![
            ("a1", vx, plane_grid(caps.y)),
            ("a2", vy, grid::sup_grid(prey_limit.min(caps.x), PLANE_POINTS)),
        ],
    )
    .note(note);
    if let Some(l) = prey.l_m {
        e.values.insert("l_m_x".into(), l);
    }
    if let Some(l) = dissipativity_bound(model, Axis::Y).l_m {
        e.values.insert("l_m_y".into(), l);
    }
    e
}

fn unsaturated_entry(id: ConditionId, points: &[BoundaryFixedPoint]) -> ConditionEntry {
    let mut e = ConditionEntry::new(id, Verdict::Holds);
    if points.is_empty() {
        return e.note("no nontrivial boundary fixed points");
    }
    let mut margin = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let v = Verdict::strict(p.cross_rate);
        e.verdict = e.verdict.and(v);
        if p.cross_rate < margin {
            margin = p.cross_rate;
            let (x, y) = p.point();
            e.point = Some([x, y]);
        }
        e.values.insert(format!("fixed_point_{}_{i}", p.axis), p.coordinate);
        e.values.insert(format!("cross_rate_{}_{i}", p.axis), p.cross_rate);
    }
    e.margin = Some(margin);
    e
}

/// Every nontrivial boundary fixed point can be invaded.
pub fn check_g2(model: &dyn GrowthModel) -> ConditionEntry {
    let mut pts = boundary_fixed_points(model, Axis::X);
    pts.extend(boundary_fixed_points(model, Axis::Y));
    unsaturated_entry(ConditionId::G2, &pts)
}

/// Every nontrivial prey-only fixed point can be invaded by the predator.
pub fn check_p3(model: &dyn GrowthModel) -> ConditionEntry {
    unsaturated_entry(ConditionId::P3, &boundary_fixed_points(model, Axis::X))
}

/// The predator's factor increases with prey and is positive without it.
///
/// Predator densities are sampled over its absorbing range: far beyond it
/// the prey dependence of `ln g` at small prey densities sinks below double
/// precision, and orbits never go there anyway.
pub fn check_p1(model: &dyn GrowthModel) -> ConditionEntry {
    let caps = model.tail_caps();
    let bound = dissipativity_bound(model, Axis::Y).l_m;
    let y_limit = bound.unwrap_or(caps.y).min(caps.y);
    let xs = grid::geometric(1e-6, caps.x, PLANE_POINTS);
    let ys = plane_grid(y_limit);
    let mut slope_min = (f64::INFINITY, 0.0, 0.0);
    // Without a predator bound, differences lost in rounding are undecided.
    let mut unresolved = 0usize;
    for &x in &xs {
        let h = (FD_STEP * x.max(1.0)).min(0.5 * x);
        for &y in &ys {
            let (hi, lo) = (model.log_g(x + h, y), model.log_g(x - h, y));
            if bound.is_none() && (hi - lo).abs() <= 4.0 * f64::EPSILON * (hi.abs() + lo.abs()) {
                unresolved += 1;
                continue;
            }
            let d = (hi - lo) / (2.0 * h);
            if d < slope_min.0 || d.is_nan() {
                slope_min = (d, x, y);
            }
        }
    }
    let mut positive = Verdict::Holds;
    let mut bad_y = None;
    for &y in &ys {
        if !model.log_g(0.0, y).is_finite() {
            positive = Verdict::Fails;
            bad_y = Some(y);
            break;
        }
    }
    let mut monotone = Verdict::strict(slope_min.0);
    if unresolved > 0 {
        monotone = monotone.and(Verdict::Inconclusive);
    }
    let mut e = ConditionEntry::new(ConditionId::P1, monotone.and(positive))
        .value("min_dlng_dx", slope_min.0)
        .value("y_limit", y_limit);
    e.margin = Some(slope_min.0);
    e.point = Some(match bad_y {
        Some(y) if monotone == Verdict::Holds => [0.0, y],
        _ => [slope_min.1, slope_min.2],
    });
    e.grid = Some(format!(
        "x on {PLANE_POINTS} geometric points in [1e-6, cap], y on 0 and {PLANE_POINTS} geometric points up to {y_limit:e}; central differences of ln g"
    ));
    if bound.is_none() {
        e.notes.push("predator bound inconclusive; predator densities sampled up to the tail cap".into());
    }
    if unresolved > 0 {
        e.notes.push(format!("{unresolved} samples below the rounding noise of ln g"));
    }
    e
}

/// Upper end of the scans on one axis: the absorbing bound of the species
/// alone, where its boundary orbits eventually live.
pub fn scan_interval(model: &dyn GrowthModel, axis: Axis) -> (f64, Option<String>) {
    let b = boundary_bound(model, axis);
    match b.l_m {
        Some(l) => (l, None),
        None => {
            let cap = model.tail_caps().along(axis);
            (cap, Some(format!("boundary bound on {axis} inconclusive; scanning to the tail cap")))
        }
    }
}

/// Expansion points tried: the origin of the axis when both rates are
/// finite there, then every nontrivial fixed point.
pub fn candidates(model: &dyn GrowthModel, axis: Axis, include_origin: bool) -> Vec<f64> {
    let view = AxisView::new(model, axis);
    let mut out = Vec::new();
    if include_origin && view.resident_log(0.0).is_finite() && view.invader_log(0.0).is_finite() {
        out.push(0.0);
    }
    out.extend(boundary_fixed_points(model, axis).into_iter().map(|p| p.coordinate));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Pointwise,
    Integral,
}

/// What each candidate must satisfy beyond the scan.
#[derive(Debug, Clone, Copy)]
struct Requirements {
    base: bool,
    /// Slope ratio must be strictly negative.
    negative_ratio: bool,
}

struct Outcome {
    s_star: f64,
    verdict: Verdict,
    margin: f64,
    worst_s: f64,
    values: Vec<(String, f64)>,
    note: Option<String>,
}

fn evaluate(model: &dyn GrowthModel, axis: Axis, s_star: f64, scan: &[f64], req: Requirements, form: Form) -> Outcome {
    let rem = match Remainder::new(model, axis, s_star) {
        Ok(r) => r,
        Err(err) => {
            return Outcome {
                s_star,
                verdict: Verdict::Inconclusive,
                margin: f64::NEG_INFINITY,
                worst_s: s_star,
                values: Vec::new(),
                note: Some(format!("candidate {s_star:e}: {err}")),
            }
        }
    };
    let ratio = rem.ratio();
    let base = rem.base();
    let mut verdict = Verdict::Holds;
    let mut margin = f64::INFINITY;
    let mut worst_s = s_star;
    let mut values = vec![("slope_ratio".to_string(), ratio), ("base".to_string(), base)];
    if req.negative_ratio {
        verdict = verdict.and(Verdict::strict(-ratio));
        margin = margin.min(-ratio);
    }
    let argmin = |h: &dyn Fn(f64) -> f64| {
        scan.iter()
            .map(|&s| (h(s), s))
            .fold((f64::INFINITY, s_star), |a, b| if b.0 < a.0 || b.0.is_nan() { b } else { a })
    };
    match form {
        Form::Pointwise => {
            if req.base {
                verdict = verdict.and(Verdict::strict(base));
                margin = margin.min(base);
            }
            let (min_r, at) = argmin(&|s| rem.integrand(s));
            values.push(("min_integrand".into(), min_r));
            verdict = verdict.and(Verdict::non_strict(min_r));
            if min_r < margin {
                margin = min_r;
                worst_s = at;
            }
        }
        Form::Integral => {
            // Per-term integral nonnegative (with the base condition), or
            // the base plus the full remainder positive at every point.
            let mut literal = Verdict::Holds;
            let mut literal_margin = f64::INFINITY;
            if req.base {
                literal = Verdict::strict(base);
                literal_margin = base;
            }
            let (min_i, at_i) = argmin(&|s| rem.integral(s));
            literal = literal.and(Verdict::non_strict(min_i));
            literal_margin = literal_margin.min(min_i);
            let (min_c, at_c) = argmin(&|s| rem.combined(s));
            let combined = Verdict::strict(min_c);
            values.push(("min_integral".into(), min_i));
            values.push(("min_base_plus_remainder".into(), min_c));
            let (v, m, at) = if combined.ordering_key() > literal.ordering_key()
                || (combined == literal && min_c > literal_margin)
            {
                (combined, min_c, at_c)
            } else {
                (literal, literal_margin, at_i)
            };
            verdict = verdict.and(v);
            if m < margin {
                margin = m;
                worst_s = at;
            }
        }
    }
    Outcome {
        s_star,
        verdict,
        margin,
        worst_s,
        values,
        note: None,
    }
}

fn scan_grid(model: &dyn GrowthModel, axis: Axis) -> (Vec<f64>, f64, Option<String>) {
    let (hi, note) = scan_interval(model, axis);
    (grid::geometric(SCAN_FLOOR.min(hi), hi, SCAN_POINTS), hi, note)
}

fn existence_entry(
    id: ConditionId,
    model: &dyn GrowthModel,
    axis: Axis,
    cands: &[f64],
    req: Requirements,
    form: Form,
) -> ConditionEntry {
    let (scan, hi, scan_note) = scan_grid(model, axis);
    let mut outcomes: Vec<Outcome> = cands
        .iter()
        .map(|&s| evaluate(model, axis, s, &scan, req, form))
        .collect();
    // best candidate first: verdict, then margin, then position
    outcomes.sort_by(|a, b| {
        b.verdict
            .ordering_key()
            .cmp(&a.verdict.ordering_key())
            .then(b.margin.total_cmp(&a.margin))
            .then(a.s_star.total_cmp(&b.s_star))
    });
    let mut e = ConditionEntry::new(id, Verdict::Fails);
    e.grid = Some(format!("{SCAN_POINTS} geometric points over [{:e}, {hi:e}]", SCAN_FLOOR.min(hi)));
    if let Some(n) = scan_note {
        e.notes.push(n);
    }
    for o in &outcomes {
        if let Some(n) = &o.note {
            e.notes.push(n.clone());
        }
    }
    let Some(best) = outcomes.first() else {
        e.notes.push("no expansion point with finite rates".into());
        e.point = Some(axis.point(0.0).into());
        return e;
    };
    if outcomes.iter().all(|o| o.note.is_some()) {
        e.verdict = Verdict::Inconclusive;
        e.notes.push("every candidate has zero resident slope".into());
        return e;
    }
    e.verdict = best.verdict;
    e.margin = Some(best.margin);
    e.expansion_point = Some(best.s_star);
    let (x, y) = axis.point(best.worst_s);
    e.point = Some([x, y]);
    for (k, v) in &best.values {
        e.values.insert(k.clone(), *v);
    }
    e
}

/// Invasion of `y` along `S_x`, pointwise or integral form.
pub fn check_g3(model: &dyn GrowthModel, form: Form) -> ConditionEntry {
    let id = match form {
        Form::Pointwise => ConditionId::G3,
        Form::Integral => ConditionId::G3Integral,
    };
    let req = Requirements {
        base: true,
        negative_ratio: false,
    };
    existence_entry(id, model, Axis::X, &candidates(model, Axis::X, true), req, form)
}

/// Invasion of `x` along `S_y`; needs a negative slope ratio when `y`
/// alone declines from rarity.
pub fn check_g4(model: &dyn GrowthModel, form: Form) -> ConditionEntry {
    let id = match form {
        Form::Pointwise => ConditionId::G4,
        Form::Integral => ConditionId::G4Integral,
    };
    let negative_ratio = match model.origin_class() {
        OriginClass::AboveOne => false,
        OriginClass::BelowOne | OriginClass::Zero => true,
        OriginClass::One => {
            let mut e = ConditionEntry::new(id, Verdict::Inconclusive)
                .note("g(0,0) = 1 lies outside both branches of the condition");
            e.point = Some([0.0, 0.0]);
            return e;
        }
    };
    let req = Requirements {
        base: true,
        negative_ratio,
    };
    existence_entry(id, model, Axis::Y, &candidates(model, Axis::Y, true), req, form)
}

/// Predator invasion along the prey axis at a nontrivial prey fixed point.
pub fn check_p4(model: &dyn GrowthModel, form: Form) -> ConditionEntry {
    let id = match form {
        Form::Pointwise => ConditionId::P4,
        Form::Integral => ConditionId::P4Integral,
    };
    let req = Requirements {
        base: false,
        negative_ratio: false,
    };
    existence_entry(id, model, Axis::X, &candidates(model, Axis::X, false), req, form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::*;

    fn strong() -> BuiltinModel {
        build_strong_allee_competition(StrongAlleeCompetition::example()).unwrap()
    }

    fn predator_prey(r: f64, b: f64, a: f64) -> BuiltinModel {
        build_predator_prey(PredatorPrey {
            r,
            b,
            a,
            c1: 1.0,
            c2: 1.0,
            d: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn h_on_builtins() {
        assert_eq!(check_h(&strong()).verdict, Verdict::Holds);
        let pp = check_h(&predator_prey(1.0, 1.0, 0.5));
        assert_eq!(pp.verdict, Verdict::Holds);
        assert!(pp.notes.iter().any(|n| n.contains("One")));
    }

    #[test]
    fn h_fails_on_the_boundary_r_equals_b_a_squared() {
        let e = check_h(&predator_prey(3.0, 3.0, 1.0));
        assert_eq!(e.verdict, Verdict::Fails);
        assert_eq!(e.margin, Some(0.0));
    }

    #[test]
    fn h_fails_when_origin_factor_is_one() {
        // r = b a^2 gives f(0,0) = 1 exactly
        let m = build_predator_prey(PredatorPrey {
            r: 0.75,
            b: 3.0,
            a: 0.5,
            c1: 1.0,
            c2: 1.0,
            d: 1.0,
        })
        .unwrap();
        let e = check_h(&m);
        assert_eq!(e.verdict, Verdict::Fails);
        assert_eq!(e.point, Some([0.0, 0.0]));
    }

    #[test]
    fn g1_on_strong_allee() {
        let e = check_g1(&strong());
        assert_eq!(e.verdict, Verdict::Holds);
        assert!(e.values["a1"] < 1.0 && e.values["a2"] < 1.0);
    }

    #[test]
    fn g2_strong_allee_and_saturated_variant() {
        let e = check_g2(&strong());
        assert_eq!(e.verdict, Verdict::Holds);
        let p = StrongAlleeCompetition {
            c: 1.0,
            ..StrongAlleeCompetition::example()
        };
        let e = check_g2(&build_strong_allee_competition(p).unwrap());
        assert_eq!(e.verdict, Verdict::Fails);
        assert_eq!(e.point, Some([1.0, 0.0]));
        assert!((e.margin.unwrap() + 0.15).abs() < 1e-12);
    }

    #[test]
    fn g3_pointwise_fails_and_integral_holds_for_strong_allee() {
        let m = strong();
        let e = check_g3(&m, Form::Pointwise);
        assert_eq!(e.verdict, Verdict::Fails);
        let e = check_g3(&m, Form::Integral);
        assert_eq!(e.verdict, Verdict::Holds, "{e:?}");
        assert_eq!(e.expansion_point, Some(1.0));
        // 20.85 - (e^{3.1}/4.1 - 1)^2
        let closed = 20.85 - (3.1f64.exp() / 4.1 - 1.0).powi(2);
        assert!((e.margin.unwrap() - closed).abs() < 1e-6, "{:?} vs {closed}", e.margin);
    }

    #[test]
    fn g4_strong_allee_needs_integral_form() {
        let m = strong();
        assert_eq!(check_g4(&m, Form::Pointwise).verdict, Verdict::Fails);
        let e = check_g4(&m, Form::Integral);
        assert_eq!(e.verdict, Verdict::Holds, "{e:?}");
        assert!(e.values["slope_ratio"] < 0.0);
        // the origin of S_y alone already suffices
        let at_origin = existence_entry(
            ConditionId::G4Integral,
            &m,
            Axis::Y,
            &[0.0],
            Requirements { base: true, negative_ratio: true },
            Form::Integral,
        );
        assert_eq!(at_origin.verdict, Verdict::Holds, "{at_origin:?}");
    }

    #[test]
    fn g4_origin_one_is_inconclusive() {
        let e = check_g4(&predator_prey(3.0, 3.0, 1.0), Form::Pointwise);
        assert_eq!(e.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn p1_p2_p3_on_predator_prey() {
        let m = predator_prey(1.0, 1.0, 0.5);
        assert_eq!(check_p1(&m).verdict, Verdict::Holds);
        assert_eq!(check_p2(&m).verdict, Verdict::Holds);
        let p3 = check_p3(&m);
        assert_eq!(p3.verdict, Verdict::Holds);
        // G(x*, 0) = c2 x*^2 with x* = a + sqrt(r / b)
        let x_star = 1.5;
        assert!((p3.margin.unwrap() - x_star * x_star).abs() < 1e-9);
        assert_eq!(check_p1(&strong()).verdict, Verdict::Fails);
    }

    #[test]
    fn p1_undecided_when_prey_overshoot_has_no_bound() {
        // one prey step reaches e^4, after which g = e^{x^2} overflows
        let e = check_p1(&predator_prey(4.0, 3.0, 1.0));
        assert_eq!(e.verdict, Verdict::Inconclusive, "{e:?}");
    }

    #[test]
    fn p1_fails_without_prey_dependence() {
        let m = build_predation_allee(PredationAllee { r: 2.0, m: 1.0, b: 1.0 }).unwrap();
        let e = check_p1(&m);
        assert_eq!(e.verdict, Verdict::Fails);
        assert_eq!(e.margin, Some(0.0));
    }

    #[test]
    fn p4_pointwise_integrand_is_negative() {
        // G'' - k F'' = -2 c2 a sqrt(b / r) at every x
        let m = predator_prey(3.0, 3.0, 1.0);
        let e = check_p4(&m, Form::Pointwise);
        assert_eq!(e.verdict, Verdict::Fails);
        assert!((e.values["min_integrand"] + 2.0).abs() < 1e-9);
    }
}
