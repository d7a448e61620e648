//! Sign-change bracketing and bisection.

/// Bisects `h` on `[lo, hi]` until the bracket is narrower than
/// `xtol * max(1, |mid|)`. Requires `h(lo)` and `h(hi)` of opposite sign.
pub fn bisect(h: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> Option<f64> {
    let mut flo = h(lo);
    let fhi = h(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return Some(mid);
        }
        let fm = h(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Adjacent grid pairs across which `h` changes sign (or hits zero).
pub fn sign_brackets(h: impl Fn(f64) -> f64, grid: &[f64]) -> Vec<(f64, f64)> {
    let values: Vec<f64> = grid.iter().map(|&s| h(s)).collect();
    let mut out = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if !a.is_finite() || !b.is_finite() {
            continue;
        }
        // A zero at a grid point is reported once, by the bracket to its left.
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
            out.push((grid[i], grid[i + 1]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn no_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn brackets_cubic_roots() {
        let grid: Vec<f64> = (0..=100).map(|i| -3.0 + 0.06 * i as f64).collect();
        let b = sign_brackets(|x| (x - 1.0) * (x + 1.0) * (x - 0.5), &grid);
        assert_eq!(b.len(), 3);
    }
}
