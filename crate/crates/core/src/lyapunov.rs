//! External Lyapunov exponents of the boundary axes.
//!
//! Along a resident orbit `s_i` on one axis, the invader's mean log rate
//! splits exactly (second-order Taylor expansion with integral remainder)
//! around any point `s*` with nonzero resident slope:
//!
//! ```text
//! mean G(s_i) = G(s*) - k F(s*) + k mean F(s_i) + mean w_i
//! k   = G'(s*) / F'(s*)
//! w_i = (s_i - s*)^2 ∫₀¹ (1-t) [G''(s_t) - k F''(s_t)] dt,  s_t = s* + (s_i - s*) t
//! ```
//!
//! with `F` the resident's and `G` the invader's log rate on the axis.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed_points::boundary_fixed_points;
use crate::model::{Axis, AxisView, GrowthModel};
use crate::orbit::{BoundaryOrbit, BoundaryStepper};
use crate::quadrature::GaussLegendre;
use crate::tail::{CompensatedSum, TailStatistic, TailTracker, DEFAULT_BURN_IN, DEFAULT_HORIZON, DEFAULT_WINDOW};

/// Exponents within `±SIGN_TOL` have no reliable sign.
pub const SIGN_TOL: f64 = 1e-3;
pub const QUADRATURE_NODES: usize = 32;
pub const QUADRATURE_CHECK_NODES: usize = 64;
pub const QUADRATURE_AGREEMENT: f64 = 1e-8;
pub const MIN_CLASSIFY_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Horizon {
    pub n: usize,
    pub burn_in: usize,
    pub window: usize,
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon {
            n: DEFAULT_HORIZON,
            burn_in: DEFAULT_BURN_IN,
            window: DEFAULT_WINDOW,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    Decomposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Components {
    /// `G(s*)`.
    pub base: f64,
    /// `-k F(s*)`.
    pub slope_ratio_term: f64,
    /// `k r_n` of the resident at the final `n`.
    pub coupling: f64,
    /// Tail surrogate of the running mean of `w_i`.
    pub remainder: f64,
}

impl Components {
    pub fn sum(&self) -> f64 {
        self.base + self.slope_ratio_term + self.coupling + self.remainder
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub n: usize,
    pub burn_in: usize,
    pub window: usize,
    /// Tail window means agree to within `SIGN_TOL`.
    pub converged: bool,
    pub spread: f64,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    fn new(h: Horizon, tail: Option<&TailStatistic>) -> Self {
        let spread = tail.map_or(f64::NAN, TailStatistic::spread);
        Diagnostics {
            n: h.n,
            burn_in: h.burn_in,
            window: h.window,
            converged: spread < SIGN_TOL,
            spread,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub axis: Axis,
    pub initial: f64,
    pub value: f64,
    pub method: Method,
    /// Expansion point for the decomposition.
    pub expansion_point: Option<f64>,
    pub slope_ratio: Option<f64>,
    pub components: Option<Components>,
    /// The resident's origin rate is not above one, so only the lower
    /// bound of the decomposition holds.
    pub is_lower_bound: bool,
    pub diagnostics: Diagnostics,
}

/// The remainder machinery for one axis and expansion point.
pub struct Remainder<'a> {
    view: AxisView<'a>,
    s_star: f64,
    ratio: f64,
    rule: GaussLegendre,
    check: GaussLegendre,
}

impl<'a> Remainder<'a> {
    pub fn new(model: &'a dyn GrowthModel, axis: Axis, s_star: f64) -> Result<Self> {
        let view = AxisView::new(model, axis);
        let slope = view.resident_slope(s_star);
        if slope == 0.0 || !slope.is_finite() {
            return Err(Error::DegenerateSlope { at: s_star, slope });
        }
        Ok(Remainder {
            view,
            s_star,
            ratio: view.invader_slope(s_star) / slope,
            rule: GaussLegendre::new(QUADRATURE_NODES),
            check: GaussLegendre::new(QUADRATURE_CHECK_NODES),
        })
    }

    pub fn expansion_point(&self) -> f64 {
        self.s_star
    }

    /// `k = G'(s*) / F'(s*)`.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Extended relative nonlinearity `G''(s) - k F''(s)`.
    pub fn integrand(&self, s: f64) -> f64 {
        self.view.invader_curvature(s) - self.ratio * self.view.resident_curvature(s)
    }

    fn integral_with(&self, rule: &GaussLegendre, s: f64) -> f64 {
        let d = s - self.s_star;
        rule.integrate_taylor_weight(|t| self.integrand(self.s_star + d * t))
    }

    /// `∫₀¹ (1-t) [G''(s_t) - k F''(s_t)] dt`.
    pub fn integral(&self, s: f64) -> f64 {
        self.integral_with(&self.rule, s)
    }

    /// `w(s) = (s - s*)^2 ∫₀¹ ...`.
    pub fn weight(&self, s: f64) -> f64 {
        self.weight_checked(s).0
    }

    /// `w(s)` and the difference to a rule with twice the nodes.
    pub fn weight_checked(&self, s: f64) -> (f64, f64) {
        let d2 = (s - self.s_star).powi(2);
        if d2 == 0.0 {
            return (0.0, 0.0);
        }
        let w = d2 * self.integral_with(&self.rule, s);
        let w2 = d2 * self.integral_with(&self.check, s);
        (w, (w - w2).abs())
    }

    /// `G(s*) - k F(s*)`.
    pub fn base(&self) -> f64 {
        self.view.invader_log(self.s_star) - self.ratio * self.view.resident_log(self.s_star)
    }

    /// `G(s) - k F(s)`, which equals `base() + weight(s)`.
    pub fn combined(&self, s: f64) -> f64 {
        self.view.invader_log(s) - self.ratio * self.view.resident_log(s)
    }
}

/// `G''(s) - k F''(s)` on the named axis with `k` taken at `s_star`.
pub fn remainder_integrand(model: &dyn GrowthModel, axis: Axis, s_star: f64, s: f64) -> Result<f64> {
    Ok(Remainder::new(model, axis, s_star)?.integrand(s))
}

fn check_ic(ic: f64) -> Result<()> {
    if ic > 0.0 && ic.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("ic", ic, "boundary initial condition must be positive and finite"))
    }
}

/// Tail surrogate of the invader's running mean log rate.
pub fn external_exponent_direct(model: &dyn GrowthModel, axis: Axis, ic: f64, h: Horizon) -> Result<ExponentEstimate> {
    check_ic(ic)?;
    let view = AxisView::new(model, axis);
    let mut stepper = BoundaryStepper::new(view, ic)?;
    let mut tracker = TailTracker::new(h.burn_in, h.window)?;
    let mut sum = CompensatedSum::default();
    let mut undefined_at = None;
    for i in 0..h.n {
        let g = view.invader_log(stepper.position());
        if g == f64::NEG_INFINITY {
            undefined_at = Some(i);
            break;
        }
        sum.add(g);
        tracker.push(sum.value() / (i + 1) as f64);
        if i + 1 < h.n {
            stepper.step()?;
        }
    }
    if let Some(i) = undefined_at {
        let mut diagnostics = Diagnostics::new(h, None);
        diagnostics
            .warnings
            .push(format!("invader factor is zero at step {i}; exponent is -inf"));
        return Ok(ExponentEstimate {
            axis,
            initial: ic,
            value: f64::NEG_INFINITY,
            method: Method::Direct,
            expansion_point: None,
            slope_ratio: None,
            components: None,
            is_lower_bound: false,
            diagnostics,
        });
    }
    let tail = tracker.finish()?;
    Ok(ExponentEstimate {
        axis,
        initial: ic,
        value: tail.value,
        method: Method::Direct,
        expansion_point: None,
        slope_ratio: None,
        components: None,
        is_lower_bound: false,
        diagnostics: Diagnostics::new(h, Some(&tail)),
    })
}

/// Whether the decomposition is an equality (resident grows from rarity)
/// or only a lower bound; errors when neither applies.
fn case_of(view: AxisView<'_>, ratio: f64) -> Result<bool> {
    if view.resident_origin_log() > 0.0 {
        Ok(false)
    } else if ratio <= 0.0 {
        Ok(true)
    } else {
        Err(Error::InapplicableCase { ratio })
    }
}

/// Running means of `w_i` over a boundary orbit streamed from `ic`.
pub fn remainder_delta(
    model: &dyn GrowthModel,
    axis: Axis,
    s_star: f64,
    ic: f64,
    h: Horizon,
) -> Result<(TailStatistic, Vec<String>)> {
    let rem = Remainder::new(model, axis, s_star)?;
    check_ic(ic)?;
    let run = stream_decomposition(&rem, ic, h)?;
    Ok((run.tail, run.warnings))
}

struct DecompositionRun {
    tail: TailStatistic,
    resident_mean: f64,
    warnings: Vec<String>,
}

fn stream_decomposition(rem: &Remainder<'_>, ic: f64, h: Horizon) -> Result<DecompositionRun> {
    let mut stepper = BoundaryStepper::new(rem.view, ic)?;
    let mut tracker = TailTracker::new(h.burn_in, h.window)?;
    let mut resident_sum = CompensatedSum::default();
    let mut w_sum = CompensatedSum::default();
    let mut worst = 0.0f64;
    let mut worst_at = 0.0;
    for i in 0..h.n {
        let s = stepper.position();
        resident_sum.add(rem.view.resident_log(s));
        let (w, err) = rem.weight_checked(s);
        if err > worst {
            worst = err;
            worst_at = s;
        }
        w_sum.add(w);
        tracker.push(w_sum.value() / (i + 1) as f64);
        if i + 1 < h.n {
            stepper.step()?;
        }
    }
    let mut warnings = Vec::new();
    if worst > QUADRATURE_AGREEMENT {
        warnings.push(format!(
            "quadrature precision: {QUADRATURE_NODES}- and {QUADRATURE_CHECK_NODES}-node rules differ by {worst:.3e} at s = {worst_at:.6e}"
        ));
    }
    Ok(DecompositionRun {
        tail: tracker.finish()?,
        resident_mean: resident_sum.value() / h.n as f64,
        warnings,
    })
}

/// The exponent reassembled from its four components.
pub fn external_exponent_decomposed(
    model: &dyn GrowthModel,
    axis: Axis,
    s_star: f64,
    ic: f64,
    h: Horizon,
) -> Result<ExponentEstimate> {
    check_ic(ic)?;
    let rem = Remainder::new(model, axis, s_star)?;
    let is_lower_bound = case_of(rem.view, rem.ratio)?;
    let run = stream_decomposition(&rem, ic, h)?;
    let components = Components {
        base: rem.view.invader_log(s_star),
        slope_ratio_term: -rem.ratio * rem.view.resident_log(s_star),
        coupling: rem.ratio * run.resident_mean,
        remainder: run.tail.value,
    };
    let mut diagnostics = Diagnostics::new(h, Some(&run.tail));
    diagnostics.warnings = run.warnings;
    Ok(ExponentEstimate {
        axis,
        initial: ic,
        value: components.sum(),
        method: Method::Decomposition,
        expansion_point: Some(s_star),
        slope_ratio: Some(rem.ratio),
        components: Some(components),
        is_lower_bound,
        diagnostics,
    })
}

/// Both sides of the finite-`n` identity at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionTerm {
    pub n: usize,
    /// `(1/n) Σ G(s_i)`.
    pub direct: f64,
    pub base: f64,
    pub slope_ratio_term: f64,
    pub coupling: f64,
    /// `(1/n) Σ w_i`.
    pub remainder_mean: f64,
}

impl DecompositionTerm {
    pub fn reconstructed(&self) -> f64 {
        self.base + self.slope_ratio_term + self.coupling + self.remainder_mean
    }
}

/// The identity evaluated at every `n` along a stored orbit.
pub fn decomposition_series(
    model: &dyn GrowthModel,
    s_star: f64,
    orbit: &BoundaryOrbit,
) -> Result<Vec<DecompositionTerm>> {
    let rem = Remainder::new(model, orbit.axis, s_star)?;
    let base = rem.view.invader_log(s_star);
    let slope_ratio_term = -rem.ratio * rem.view.resident_log(s_star);
    let mut g_sum = CompensatedSum::default();
    let mut f_sum = CompensatedSum::default();
    let mut w_sum = CompensatedSum::default();
    let horizon = orbit.horizon();
    Ok(orbit.points[..horizon]
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            g_sum.add(rem.view.invader_log(s));
            f_sum.add(rem.view.resident_log(s));
            w_sum.add(rem.weight(s));
            let n = (i + 1) as f64;
            DecompositionTerm {
                n: i + 1,
                direct: g_sum.value() / n,
                base,
                slope_ratio_term,
                coupling: rem.ratio * f_sum.value() / n,
                remainder_mean: w_sum.value() / n,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScenarioKind {
    Permanence,
    RelativePermanence,
    BoundaryAttractor,
    MultipleAttractors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
    Indeterminate,
}

impl Sign {
    pub fn of(v: f64, tol: f64) -> Sign {
        if v > tol {
            Sign::Positive
        } else if v < -tol {
            Sign::Negative
        } else {
            Sign::Indeterminate
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvasionSample {
    pub ic: f64,
    pub exponent: f64,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvasionScenario {
    pub axis: Axis,
    /// `None` when no sample has a definite sign.
    pub kind: Option<ScenarioKind>,
    pub inconclusive: bool,
    /// Samples sorted by initial condition.
    pub evidence: Vec<InvasionSample>,
    /// Initial conditions with a negative exponent.
    pub exceptional: Vec<f64>,
}

/// Sorts the invasion outcome from a sample of resident initial conditions
/// into one of four situations.
pub fn classify_invasion(model: &dyn GrowthModel, axis: Axis, ics: &[f64], h: Horizon) -> Result<InvasionScenario> {
    if ics.len() < MIN_CLASSIFY_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "classification needs at least {MIN_CLASSIFY_SAMPLES} initial conditions, got {}",
            ics.len()
        )));
    }
    let mut evidence = ics
        .par_iter()
        .map(|&ic| {
            let e = external_exponent_direct(model, axis, ic, h)?;
            Ok(InvasionSample {
                ic,
                exponent: e.value,
                sign: Sign::of(e.value, SIGN_TOL),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    evidence.sort_by(|a, b| a.ic.total_cmp(&b.ic));

    let saturated: Vec<f64> = boundary_fixed_points(model, axis)
        .into_iter()
        .filter(|p| !p.unsaturated)
        .map(|p| p.coordinate)
        .collect();
    let at_saturated = |ic: f64| saturated.iter().any(|&p| (ic - p).abs() <= 1e-9 * p.max(1.0));

    let positive = evidence.iter().filter(|e| e.sign == Sign::Positive).count();
    let exceptional: Vec<f64> = evidence.iter().filter(|e| e.sign == Sign::Negative).map(|e| e.ic).collect();
    let inconclusive = evidence.iter().any(|e| e.sign == Sign::Indeterminate);
    let kind = match (positive, exceptional.len()) {
        (0, 0) => None,
        (_, 0) => Some(ScenarioKind::Permanence),
        (0, _) => Some(ScenarioKind::BoundaryAttractor),
        _ if exceptional.iter().all(|&ic| at_saturated(ic)) => Some(ScenarioKind::RelativePermanence),
        _ => Some(ScenarioKind::MultipleAttractors),
    };
    Ok(InvasionScenario {
        axis,
        kind,
        inconclusive,
        evidence,
        exceptional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::*;
    use crate::orbit::boundary_orbit;

    fn strong() -> BuiltinModel {
        build_strong_allee_competition(StrongAlleeCompetition::example()).unwrap()
    }

    fn short() -> Horizon {
        Horizon {
            n: 5_000,
            burn_in: 1_000,
            window: 100,
        }
    }

    #[test]
    fn direct_at_fixed_point_is_cross_rate() {
        let m = strong();
        let e = external_exponent_direct(&m, Axis::X, 1.0, short()).unwrap();
        assert!((e.value - m.log_g(1.0, 0.0)).abs() < 1e-13);
        assert!(e.diagnostics.converged);
    }

    #[test]
    fn predator_prey_unsaturated_point() {
        let p = PredatorPrey {
            r: 3.0,
            b: 3.0,
            a: 1.0,
            c1: 1.0,
            c2: 0.7,
            d: 1.0,
        };
        let m = build_predator_prey(p).unwrap();
        let x = p.prey_equilibrium();
        let e = external_exponent_direct(&m, Axis::X, x, short()).unwrap();
        assert!((e.value - 0.7 * x * x).abs() < 1e-12);
    }

    #[test]
    fn integrand_of_strong_allee_is_constant() {
        let m = strong();
        for s in [0.01, 0.5, 1.0, 3.0, 5.4] {
            assert!((remainder_integrand(&m, Axis::X, 1.0, s).unwrap() + 2.0).abs() < 1e-12);
        }
        let rem = Remainder::new(&m, Axis::X, 1.0).unwrap();
        assert!((rem.integral(3.0) + 1.0).abs() < 1e-12);
        assert!((rem.weight(3.0) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_slope_is_an_error() {
        let p = PredatorPrey {
            r: 3.0,
            b: 3.0,
            a: 1.0,
            c1: 1.0,
            c2: 1.0,
            d: 1.0,
        };
        let m = build_predator_prey(p).unwrap();
        assert!(matches!(
            remainder_integrand(&m, Axis::X, 1.0, 0.5),
            Err(Error::DegenerateSlope { .. })
        ));
    }

    #[test]
    fn combined_equals_base_plus_weight() {
        let m = strong();
        let rem = Remainder::new(&m, Axis::X, 1.0).unwrap();
        for s in [0.1, 0.9, 2.5, 5.0] {
            assert!((rem.combined(s) - rem.base() - rem.weight(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_holds_along_chaotic_orbit() {
        let m = strong();
        let orbit = boundary_orbit(&m, Axis::X, 0.3, 3_000).unwrap();
        for s_star in [1.0, 0.0, 2.0] {
            for t in decomposition_series(&m, s_star, &orbit).unwrap() {
                assert!((t.direct - t.reconstructed()).abs() < 1e-8, "n={} s*={s_star}", t.n);
            }
        }
    }

    #[test]
    fn decomposed_matches_direct_on_chaotic_resident() {
        let m = strong();
        let h = Horizon::default();
        let d = external_exponent_direct(&m, Axis::X, 0.5, h).unwrap();
        let c = external_exponent_decomposed(&m, Axis::X, 1.0, 0.5, h).unwrap();
        assert!(!c.is_lower_bound);
        assert!((d.value - c.value).abs() < 2e-3, "{} vs {}", d.value, c.value);
        let comp = c.components.unwrap();
        assert!((comp.sum() - c.value).abs() < 1e-9);
        assert!(comp.coupling.abs() < 5e-3);
    }

    #[test]
    fn case_two_on_strong_allee_y_axis() {
        let p = StrongAlleeCompetition::example();
        let m = strong();
        // expand at the origin of the y-axis, where g(0,0) < 1
        let e = external_exponent_decomposed(&m, Axis::Y, 0.0, 0.05, short()).unwrap();
        assert!(e.is_lower_bound);
        let k = e.slope_ratio.unwrap();
        assert!((k + p.m1 / (p.b2 * p.m2 - p.r2)).abs() < 1e-12);
        let comp = e.components.unwrap();
        let closed = p.r1 - p.m1 * (p.m2 - p.r2) / (p.b2 * p.m2 - p.r2);
        assert!((comp.base + comp.slope_ratio_term - closed).abs() < 1e-12);
        // at the upper fixed point the slope ratio is positive
        let (_, y2) = allee_roots(p.r2, p.m2, p.b2).unwrap();
        assert!(matches!(
            external_exponent_decomposed(&m, Axis::Y, y2, 0.05, short()),
            Err(Error::InapplicableCase { .. })
        ));
    }

    #[test]
    fn remainder_of_constant_orbit_is_zero() {
        let m = strong();
        let (tail, warnings) = remainder_delta(&m, Axis::X, 1.0, 1.0, short()).unwrap();
        assert_eq!(tail.value, 0.0);
        assert!(warnings.is_empty());
    }

    #[test]
    fn classification_is_order_invariant() {
        let m = strong();
        let ics: Vec<f64> = (1..=12).map(|i| 0.4 * i as f64).collect();
        let mut rev = ics.clone();
        rev.reverse();
        let a = classify_invasion(&m, Axis::X, &ics, short()).unwrap();
        let b = classify_invasion(&m, Axis::X, &rev, short()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.kind, Some(ScenarioKind::Permanence));
        assert!(classify_invasion(&m, Axis::X, &ics[..5], short()).is_err());
    }

    /// Chaotic Ricker resident `F = 4.1 (1 - x)` and invader
    /// `G = -1 + 0.8 x^2 - y`: saturated at `x* = 1`, yet the resident's
    /// fluctuations favour the invader.
    struct Convex;
    impl GrowthModel for Convex {
        fn id(&self) -> String {
            "convex".into()
        }
        fn log_f(&self, x: f64, y: f64) -> f64 {
            4.1 * (1.0 - x) - y
        }
        fn log_g(&self, x: f64, y: f64) -> f64 {
            -1.0 + 0.8 * x * x - y
        }
        fn fx_axis(&self, _: f64) -> f64 {
            -4.1
        }
        fn fxx_axis(&self, _: f64) -> f64 {
            0.0
        }
        fn gx_axis(&self, x: f64) -> f64 {
            1.6 * x
        }
        fn gxx_axis(&self, _: f64) -> f64 {
            1.6
        }
        fn fy_axis(&self, _: f64) -> f64 {
            -1.0
        }
        fn fyy_axis(&self, _: f64) -> f64 {
            0.0
        }
        fn gy_axis(&self, _: f64) -> f64 {
            -1.0
        }
        fn gyy_axis(&self, _: f64) -> f64 {
            0.0
        }
    }

    #[test]
    fn saturated_fixed_point_gives_relative_permanence() {
        let mut ics: Vec<f64> = (1..=10).map(|i| 0.45 * i as f64).collect();
        ics.push(1.0);
        let s = classify_invasion(&Convex, Axis::X, &ics, short()).unwrap();
        assert_eq!(s.exceptional, vec![1.0]);
        assert_eq!(s.kind, Some(ScenarioKind::RelativePermanence));
        assert!(!s.inconclusive);
    }

    #[test]
    fn all_negative_is_boundary_attractor() {
        // c barely above one: the invader loses everywhere on the axis
        let p = StrongAlleeCompetition {
            c: 1.1,
            ..StrongAlleeCompetition::example()
        };
        let m = build_strong_allee_competition(p).unwrap();
        let ics: Vec<f64> = (1..=10).map(|i| 0.45 * i as f64).collect();
        let s = classify_invasion(&m, Axis::X, &ics, short()).unwrap();
        assert_eq!(s.kind, Some(ScenarioKind::BoundaryAttractor));
    }
}
