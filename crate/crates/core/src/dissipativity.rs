//! Absorbing bounds for one coordinate of the map.
//!
//! `L_eps` is the smallest sampled density beyond which the coordinate's
//! own per-capita factor stays below `1 - TAIL_MARGIN` for every sampled
//! value of the other coordinate. Below `L_eps` one step can reach at most
//! `sup s f(s, ·)`, and above it the coordinate shrinks, so
//! `L_m = max(L_eps, sup_{s <= L_eps} s f(s, ·))` is absorbing: a
//! coordinate at or below `L_m` stays there.

use serde::Serialize;

use crate::grid;
use crate::model::{Axis, AxisView, GrowthModel};

pub const TAIL_MARGIN: f64 = 1e-3;
pub const OWN_GRID_POINTS: usize = 1_000;
pub const SUP_GRID_POINTS: usize = 200;
const GRID_FLOOR: f64 = 1e-6;
const PAD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Bounded,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct DissipativityBound {
    pub axis: Axis,
    pub status: BoundStatus,
    pub l_eps: Option<f64>,
    pub l_m: Option<f64>,
    /// Largest sampled factor at or beyond `L_eps`: the empirical `a`.
    pub tail_sup: Option<f64>,
    /// Upper limit imposed on the other coordinate, if the unrestricted
    /// scan failed and the other coordinate's own bound was used instead.
    pub other_limit: Option<f64>,
    /// Where the tail condition fails, when inconclusive.
    pub witness: Option<(f64, f64)>,
}

impl DissipativityBound {
    pub fn is_bounded(&self) -> bool {
        self.status == BoundStatus::Bounded
    }
}

/// Bound for one coordinate with the other unrestricted up to its tail cap;
/// falls back to restricting the other coordinate to its own `L_m`.
pub fn dissipativity_bound(model: &dyn GrowthModel, axis: Axis) -> DissipativityBound {
    let view = AxisView::new(model, axis);
    let first = scan(view, None);
    if first.is_bounded() {
        return first;
    }
    let other = scan(AxisView::new(model, axis.other()), None);
    match other.l_m {
        Some(limit) if other.is_bounded() => {
            let retry = scan(view, Some(limit));
            if retry.is_bounded() {
                retry
            } else {
                first
            }
        }
        _ => first,
    }
}

/// Bound for a single species alone on its axis (other coordinate zero).
pub fn boundary_bound(model: &dyn GrowthModel, axis: Axis) -> DissipativityBound {
    scan(AxisView::new(model, axis), Some(0.0))
}

fn other_grid(view: AxisView<'_>, limit: Option<f64>) -> Vec<f64> {
    match limit {
        Some(l) if l <= 0.0 => vec![0.0],
        Some(l) => grid::sup_grid(l.min(view.other_cap()).max(GRID_FLOOR), SUP_GRID_POINTS),
        None => grid::sup_grid(view.other_cap(), SUP_GRID_POINTS),
    }
}

fn scan(view: AxisView<'_>, limit: Option<f64>) -> DissipativityBound {
    let cap = view.cap();
    let own = grid::geometric(GRID_FLOOR.min(cap), cap, OWN_GRID_POINTS);
    let others = other_grid(view, limit);
    let threshold = (1.0 - TAIL_MARGIN).ln();

    // sup over the other coordinate of the own log rate, with its argmax
    let sups: Vec<(f64, f64)> = own
        .iter()
        .map(|&s| {
            others
                .iter()
                .map(|&o| (view.own_log(s, o), o))
                .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 || b.0.is_nan() { b } else { a })
        })
        .collect();

    let below = |v: f64| v < threshold;
    let mut start = own.len();
    while start > 0 && below(sups[start - 1].0) {
        start -= 1;
    }
    let mut out = DissipativityBound {
        axis: view.axis,
        status: BoundStatus::Inconclusive,
        l_eps: None,
        l_m: None,
        tail_sup: None,
        other_limit: limit,
        witness: None,
    };
    if start == own.len() {
        let (_, o) = sups[own.len() - 1];
        out.witness = Some((cap, o));
        return out;
    }
    let l_eps = own[start];
    let tail_sup = sups[start..].iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).exp();
    let reach = max_image(view, l_eps, &own[..=start], &others);
    if !reach.is_finite() {
        out.witness = Some((l_eps, f64::NAN));
        return out;
    }
    out.status = BoundStatus::Bounded;
    out.l_eps = Some(l_eps);
    out.l_m = Some(l_eps.max(reach * (1.0 + PAD)));
    out.tail_sup = Some(tail_sup);
    out
}

/// `sup s f(s, o)` over `s in (0, l_eps]` and the sampled `o`, by grid
/// search and golden-section refinement in each coordinate.
fn max_image(view: AxisView<'_>, l_eps: f64, own: &[f64], others: &[f64]) -> f64 {
    let image_log = |s: f64, o: f64| if s > 0.0 { s.ln() + view.own_log(s, o) } else { f64::NEG_INFINITY };
    let mut samples: Vec<f64> = own.to_vec();
    samples.extend(grid::linear(0.0, l_eps, 201).into_iter().skip(1));
    samples.sort_by(f64::total_cmp);

    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (j, &o) in others.iter().enumerate() {
        for (i, &s) in samples.iter().enumerate() {
            let v = image_log(s, o);
            if v > best.0 || v.is_nan() {
                best = (v, i, j);
            }
        }
    }
    if best.0.is_nan() {
        return f64::NAN;
    }
    let (_, i, j) = best;
    let mut s = samples[i];
    let mut o = others[j];
    let s_lo = samples[i.saturating_sub(1)];
    let s_hi = samples[(i + 1).min(samples.len() - 1)];
    let o_lo = others[j.saturating_sub(1)];
    let o_hi = others[(j + 1).min(others.len() - 1)];
    let mut value = best.0;
    for _ in 0..3 {
        if s_hi > s_lo {
            let (arg, v) = grid::golden_max(|t| image_log(t, o), s_lo, s_hi, 200);
            if v > value {
                value = v;
                s = arg;
            }
        }
        if o_hi > o_lo {
            let (arg, v) = grid::golden_max(|t| image_log(s, t), o_lo, o_hi, 200);
            if v > value {
                value = v;
                o = arg;
            }
        }
    }
    value.exp()
}
