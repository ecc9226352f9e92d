//! Monte Carlo sampling of the generalized circular ensemble
//! `P_N(θ) ∝ Π_j f(θ_j) Π_{j<k} |e^{iθ_j} − e^{iθ_k}|²` and counting
//! statistics of its points.

mod dpp;
mod mcmc;
pub mod stats;

pub use dpp::{sample_dpp, DppSampler};
pub use mcmc::{sample_mcmc, McmcChain, McmcConfig, McmcDiagnostics, McmcRun};

use std::f64::consts::PI;

use crate::{Error, Result};

/// One draw of `N` eigenvalue arguments, sorted, in `(−π, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSample {
    pub n: usize,
    pub thetas: Vec<f64>,
}

impl EnsembleSample {
    pub fn new(mut thetas: Vec<f64>) -> Self {
        for t in thetas.iter_mut() {
            *t = wrap_angle(*t);
        }
        thetas.sort_by(f64::total_cmp);
        EnsembleSample {
            n: thetas.len(),
            thetas,
        }
    }

    /// `#{i : θ_i ∈ [lo, hi]}`.
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        let a = self.thetas.partition_point(|&t| t < lo);
        let b = self.thetas.partition_point(|&t| t <= hi);
        b.saturating_sub(a)
    }
}

/// Map an angle to `(−π, π]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut x = t.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Histogram of counts in `[u/N^q, v/N^q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingEstimate {
    pub interval: [f64; 2],
    pub scale_exponent: u32,
    /// `counts[m]` = number of samples with exactly `m` points in the interval.
    pub counts: Vec<u64>,
    pub n_samples: u64,
    pub std_errors: Vec<f64>,
}

impl CountingEstimate {
    pub fn probability(&self, m: usize) -> f64 {
        if self.n_samples == 0 {
            return 0.0;
        }
        self.counts.get(m).copied().unwrap_or(0) as f64 / self.n_samples as f64
    }

    pub fn std_error(&self, m: usize) -> f64 {
        stats::binomial_std_error(self.probability(m), self.n_samples)
    }

    /// `P̂(count ≥ m)` and its binomial standard error.
    pub fn at_least(&self, m: usize) -> (f64, f64) {
        let hits: u64 = self.counts.iter().skip(m).sum();
        let p = if self.n_samples == 0 { 0.0 } else { hits as f64 / self.n_samples as f64 };
        (p, stats::binomial_std_error(p, self.n_samples))
    }
}

/// Streaming accumulator for [`CountingEstimate`].
#[derive(Debug, Clone)]
pub struct CountingAccumulator {
    interval: [f64; 2],
    q: u32,
    counts: Vec<u64>,
    n_samples: u64,
}

impl CountingAccumulator {
    pub fn new(interval: [f64; 2], q: u32) -> Result<Self> {
        let [u, v] = interval;
        if !(u <= v) || !u.is_finite() || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("bad interval [{u}, {v}]")));
        }
        Ok(CountingAccumulator {
            interval,
            q,
            counts: Vec::new(),
            n_samples: 0,
        })
    }

    pub fn add(&mut self, s: &EnsembleSample) {
        let scale = (s.n as f64).powi(self.q as i32);
        let (lo, hi) = (self.interval[0] / scale, self.interval[1] / scale);
        // a window wider than the circle covers every point
        let m = if hi - lo >= 2.0 * PI { s.n } else { count_wrapped(s, lo, hi) };
        if self.counts.len() <= m {
            self.counts.resize(m + 1, 0);
        }
        self.counts[m] += 1;
        self.n_samples += 1;
    }

    pub fn finish(mut self) -> CountingEstimate {
        if self.counts.is_empty() {
            self.counts.push(0);
        }
        let n = self.n_samples;
        let std_errors = self
            .counts
            .iter()
            .map(|&c| stats::binomial_std_error(if n == 0 { 0.0 } else { c as f64 / n as f64 }, n))
            .collect();
        CountingEstimate {
            interval: self.interval,
            scale_exponent: self.q,
            counts: self.counts,
            n_samples: n,
            std_errors,
        }
    }
}

fn count_wrapped(s: &EnsembleSample, lo: f64, hi: f64) -> usize {
    if lo >= -PI && hi <= PI {
        return s.count_in(lo, hi);
    }
    // the window wraps around ±π: split it
    let (a, b) = (wrap_angle(lo), wrap_angle(hi));
    if a <= b {
        s.count_in(a, b)
    } else {
        s.count_in(a, PI) + s.count_in(-PI, b)
    }
}

/// Histogram of `#{i : θ_i ∈ [u/N^q, v/N^q]}` over the samples.
pub fn counting_statistics<'a, I>(samples: I, interval: [f64; 2], q: u32) -> Result<CountingEstimate>
where
    I: IntoIterator<Item = &'a EnsembleSample>,
{
    let mut acc = CountingAccumulator::new(interval, q)?;
    for s in samples {
        acc.add(s);
    }
    Ok(acc.finish())
}
