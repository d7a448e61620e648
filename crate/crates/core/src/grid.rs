//! Sample grids shared by the scans.

/// `n` geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo, "geometric grid needs 0 < lo <= hi");
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (n - 1) as f64;
            let mut pts: Vec<f64> = (0..n).map(|i| lo * (ratio * i as f64).exp()).collect();
            pts[n - 1] = hi;
            pts
        }
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            let mut pts: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
            pts[n - 1] = hi;
            pts
        }
    }
}

/// Grid used for the sup over the other coordinate: zero followed by
/// `n` geometric points from 1e-6 to `cap`.
pub fn sup_grid(cap: f64, n: usize) -> Vec<f64> {
    let mut pts = vec![0.0];
    pts.extend(geometric(1e-6, cap, n));
    pts
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
