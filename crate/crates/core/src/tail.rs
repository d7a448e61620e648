//! Finite-horizon stand-in for `lim sup` of a sequence: the largest
//! sliding-window mean after a burn-in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BURN_IN: usize = 10_000;
pub const DEFAULT_WINDOW: usize = 1_000;
pub const DEFAULT_HORIZON: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailStatistic {
    pub burn_in: usize,
    pub window: usize,
    /// Largest window mean in the tail.
    pub value: f64,
    /// Smallest window mean in the tail.
    pub min_window: f64,
    /// Number of windows examined.
    pub windows: usize,
}

impl TailStatistic {
    pub fn spread(&self) -> f64 {
        self.value - self.min_window
    }

    /// Window means agree to within `tol`: the limit, not just the
    /// `lim sup`, is plausibly reached.
    pub fn converged(&self, tol: f64) -> bool {
        self.spread() < tol
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Streaming version of [`tail_limsup`].
#[derive(Debug, Clone)]
pub struct TailTracker {
    burn_in: usize,
    window: usize,
    seen: usize,
    ring: Vec<f64>,
    head: usize,
    sum: f64,
    max: f64,
    min: f64,
    windows: usize,
}

impl TailTracker {
    pub fn new(burn_in: usize, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidInput("window must be at least 1".into()));
        }
        Ok(TailTracker {
            burn_in,
            window,
            seen: 0,
            ring: Vec::with_capacity(window),
            head: 0,
            sum: 0.0,
            max: f64::NEG_INFINITY,
            min: f64::INFINITY,
            windows: 0,
        })
    }

    pub fn push(&mut self, v: f64) {
        self.seen += 1;
        if self.seen <= self.burn_in {
            return;
        }
        if self.ring.len() < self.window {
            self.ring.push(v);
            self.sum += v;
        } else {
            self.sum += v - self.ring[self.head];
            self.ring[self.head] = v;
            self.head += 1;
            if self.head == self.window {
                self.head = 0;
                // Re-sum once per lap so sliding updates cannot drift.
                self.sum = self.ring.iter().sum();
            }
        }
        if self.ring.len() == self.window {
            let mean = self.sum / self.window as f64;
            self.max = self.max.max(mean);
            self.min = self.min.min(mean);
            self.windows += 1;
        }
    }

    pub fn finish(&self) -> Result<TailStatistic> {
        let needed = self.burn_in + self.window;
        if self.seen <= needed {
            return Err(Error::InsufficientLength {
                len: self.seen,
                needed,
            });
        }
        Ok(TailStatistic {
            burn_in: self.burn_in,
            window: self.window,
            value: self.max,
            min_window: self.min,
            windows: self.windows,
        })
    }
}

/// Maximum over all windows of `window` consecutive entries starting at
/// index `burn_in` or later, of the window mean.
pub fn tail_limsup(sequence: &[f64], burn_in: usize, window: usize) -> Result<TailStatistic> {
    let mut t = TailTracker::new(burn_in, window)?;
    for &v in sequence {
        t.push(v);
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(seq: &[f64], burn_in: usize, window: usize) -> f64 {
        (burn_in..=seq.len() - window)
            .map(|k| seq[k..k + window].iter().sum::<f64>() / window as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn compensated_sum_of_constant() {
        let mut s = CompensatedSum::default();
        for _ in 0..100_000 {
            s.add(0.1);
        }
        assert!((s.value() - 10_000.0).abs() < 1e-11);
    }

    #[test]
    fn constant_sequence() {
        let s = vec![0.7; 50];
        let t = tail_limsup(&s, 10, 5).unwrap();
        assert!((t.value - 0.7).abs() < 1e-15);
        assert!(t.converged(1e-12));
    }

    #[test]
    fn alternating_even_window() {
        let s: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let t = tail_limsup(&s, 7, 4).unwrap();
        assert_eq!(t.value, 0.0);
    }

    #[test]
    fn too_short_is_an_error() {
        let s = vec![1.0; 15];
        assert!(matches!(
            tail_limsup(&s, 10, 5),
            Err(Error::InsufficientLength { len: 15, needed: 15 })
        ));
        assert!(tail_limsup(&s, 10, 4).is_ok());
        assert!(tail_limsup(&s, 0, 0).is_err());
    }

    #[test]
    fn long_random_walk_matches_naive() {
        let mut x = 0.0f64;
        let s: Vec<f64> = (0..20_000)
            .map(|i| {
                x += ((i * 7919) % 13) as f64 - 6.0;
                x
            })
            .collect();
        let t = tail_limsup(&s, 1_000, 250).unwrap();
        let oracle = naive(&s, 1_000, 250);
        assert!((t.value - oracle).abs() <= 1e-9 * oracle.abs().max(1.0));
    }

    proptest! {
        #[test]
        fn agrees_with_naive_oracle(
            seq in proptest::collection::vec(-100.0f64..100.0, 30..200),
            burn in 0usize..10,
            window in 1usize..10,
        ) {
            prop_assume!(seq.len() > burn + window);
            let t = tail_limsup(&seq, burn, window).unwrap();
            let oracle = naive(&seq, burn, window);
            prop_assert!((t.value - oracle).abs() <= 1e-9);
            prop_assert!(t.value >= t.min_window);
        }

        #[test]
        fn nonincreasing_in_burn_in(
            seq in proptest::collection::vec(-10.0f64..10.0, 40..120),
            window in 1usize..8,
        ) {
            let mut prev = f64::INFINITY;
            for burn in 0..(seq.len() - window) {
                let t = tail_limsup(&seq, burn, window).unwrap();
                prop_assert!(t.value <= prev + 1e-12);
                prev = t.value;
            }
        }
    }
}
