//! Order-fixed floating-point reductions.

use rayon::prelude::*;

const BLOCK: usize = 64;

/// Pairwise summation with a fixed split pattern, so the result depends only
/// on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Summation policy for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reduction {
    /// Fixed-order pairwise sums, independent of the worker count. When off,
    /// the input is split into one chunk per worker and the partial sums are
    /// added in chunk order.
    pub deterministic: bool,
    pub compensated: bool,
}

impl Default for Reduction {
    fn default() -> Self {
        Self {
            deterministic: true,
            compensated: false,
        }
    }
}

impl Reduction {
    pub fn sum(&self, xs: &[f64]) -> f64 {
        let leaf = |c: &[f64]| {
            if self.compensated {
                compensated_sum(c)
            } else {
                pairwise_sum(c)
            }
        };
        if self.deterministic || xs.len() < 2 * BLOCK {
            return leaf(xs);
        }
        let workers = rayon::current_num_threads().max(1);
        let chunk = xs.len().div_ceil(workers);
        let partial: Vec<f64> = xs.par_chunks(chunk).map(leaf).collect();
        partial.iter().sum()
    }

    /// Sum of `f(i)` over `0..n`.
    pub fn sum_map<F>(&self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let values: Vec<f64> = (0..n).into_par_iter().map(f).collect();
        self.sum(&values)
    }
}
