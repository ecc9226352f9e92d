//! Metropolis-within-Gibbs sampler for the log-density
//! `Σ log f(θ_j) + 2 Σ_{j<k} log|e^{iθ_j} − e^{iθ_k}|`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::stats::integrated_autocorrelation_time;
use super::{wrap_angle, EnsembleSample};
use crate::weights::WeightSpec;
use crate::{Error, Result};

/// Largest ensemble size the sampler accepts.
pub const MAX_N: usize = 128;

/// Pair factors are multiplied in blocks of this size before taking a log.
const CHUNK: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct McmcConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Independent chains, each on its own ChaCha20 stream.
    pub chains: usize,
    /// Burn-in sweeps per chain; the local step is tuned during burn-in.
    pub burn_in: usize,
    /// Sweeps recorded to estimate the autocorrelation time.
    pub pilot: usize,
    /// Probability that a site update proposes a uniform angle.
    pub independence_prob: f64,
    pub target_acceptance: f64,
}

impl McmcConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        McmcConfig {
            n_samples,
            seed,
            chains: 1,
            burn_in: 2000,
            pilot: 6000,
            independence_prob: 0.1,
            target_acceptance: 0.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McmcDiagnostics {
    pub chains: usize,
    pub seed: u64,
    /// Acceptance rate of single-site moves after burn-in.
    pub acceptance_rate: f64,
    /// Acceptance rate of global rotations after burn-in.
    pub rotation_acceptance: f64,
    pub local_step: f64,
    /// Largest integrated autocorrelation time (in sweeps) over the
    /// monitored statistics of the pilot run.
    pub autocorrelation_time: f64,
    /// Per statistic: `Σ cos θ`, `Σ sin θ`, `#{|θ| ≤ 3/N}`.
    pub autocorrelation_times: [f64; 3],
    /// Sweeps between emitted samples.
    pub thinning: usize,
    pub effective_sample_size: f64,
    pub sweeps: u64,
}

/// One Markov chain. Emits a sample every `thinning` sweeps.
#[derive(Debug, Clone)]
pub struct McmcChain {
    n: usize,
    alpha: f64,
    c_coeffs: Vec<crate::C64>,
    theta: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
    log_f: Vec<f64>,
    rng: ChaCha20Rng,
    step: f64,
    rot_step: f64,
    independence_prob: f64,
    thinning: usize,
    accepted: u64,
    proposed: u64,
    rot_accepted: u64,
    rot_proposed: u64,
    sweeps: u64,
    taus: [f64; 3],
}

impl McmcChain {
    /// Burns in, tunes the step size and fixes the thinning from a pilot run.
    pub fn new(w: &WeightSpec, n: usize, config: &McmcConfig, stream: u64) -> Result<Self> {
        validate(n, config)?;
        let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
        rng.set_stream(stream);
        // evenly spaced start, shifted off the singularity
        let theta: Vec<f64> = (0..n)
            .map(|j| wrap_angle(-PI + 2.0 * PI * (j as f64 + 0.5) / n as f64 + PI / (2.0 * n as f64)))
            .collect();
        let mut chain = McmcChain {
            n,
            alpha: w.alpha(),
            c_coeffs: w.c_coefficients().to_vec(),
            cos: theta.iter().map(|t| t.cos()).collect(),
            sin: theta.iter().map(|t| t.sin()).collect(),
            log_f: Vec::new(),
            theta,
            rng,
            step: 2.0 / n as f64,
            rot_step: 0.5 / n as f64,
            independence_prob: config.independence_prob,
            thinning: 1,
            accepted: 0,
            proposed: 0,
            rot_accepted: 0,
            rot_proposed: 0,
            sweeps: 0,
            taus: [1.0; 3],
        };
        chain.log_f = chain.theta.iter().map(|&t| chain.log_weight(t)).collect();

        // Robbins-Monro tuning of both step sizes in blocks of 50 sweeps
        let block = 50;
        for b in 0..config.burn_in.div_ceil(block) {
            chain.reset_counters();
            for _ in 0..block {
                chain.sweep();
            }
            let gain = 1.0 / (1.0 + b as f64).sqrt();
            let acc = chain.accepted as f64 / chain.proposed.max(1) as f64;
            let rot = chain.rot_accepted as f64 / chain.rot_proposed.max(1) as f64;
            chain.step = (chain.step * (2.0 * gain * (acc - config.target_acceptance)).exp()).clamp(1e-6, PI);
            chain.rot_step = (chain.rot_step * (2.0 * gain * (rot - config.target_acceptance)).exp()).clamp(1e-8, PI);
        }

        chain.reset_counters();
        let edge = 3.0 / n as f64;
        let mut series: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(config.pilot));
        for _ in 0..config.pilot {
            chain.sweep();
            series[0].push(chain.cos.iter().sum());
            series[1].push(chain.sin.iter().sum());
            series[2].push(chain.theta.iter().filter(|t| t.abs() <= edge).count() as f64);
        }
        for (k, s) in series.iter().enumerate() {
            chain.taus[k] = integrated_autocorrelation_time(s);
        }
        let tau = chain.taus.iter().copied().fold(1.0, f64::max);
        chain.thinning = tau.ceil() as usize;
        Ok(chain)
    }

    pub fn thinning(&self) -> usize {
        self.thinning
    }

    pub fn autocorrelation_times(&self) -> [f64; 3] {
        self.taus
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.proposed.max(1) as f64
    }

    pub fn rotation_acceptance(&self) -> f64 {
        self.rot_accepted as f64 / self.rot_proposed.max(1) as f64
    }

    pub fn local_step(&self) -> f64 {
        self.step
    }

    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    /// Current state without advancing the chain.
    pub fn state(&self) -> EnsembleSample {
        EnsembleSample::new(self.theta.clone())
    }

    fn reset_counters(&mut self) {
        self.accepted = 0;
        self.proposed = 0;
        self.rot_accepted = 0;
        self.rot_proposed = 0;
    }

    fn log_weight(&self, t: f64) -> f64 {
        let mut c = self.c_coeffs[0].re;
        for (k, z) in self.c_coeffs.iter().enumerate().skip(1) {
            c += 2.0 * (z * crate::C64::from_polar(1.0, k as f64 * t)).re;
        }
        let sing = if self.alpha == 0.0 {
            0.0
        } else {
            2.0 * self.alpha * (2.0 * (0.5 * t).sin()).abs().ln()
        };
        sing + c.ln()
    }

    /// `log π(θ with θ_i → t) − log π(θ)`.
    fn delta(&self, i: usize, ct: f64, st: f64, log_ft: f64) -> f64 {
        let (ci, si) = (self.cos[i], self.sin[i]);
        let mut acc = log_ft - self.log_f[i];
        let mut prod = 1.0;
        let mut in_chunk = 0;
        for k in 0..self.n {
            if k == i {
                continue;
            }
            let (ck, sk) = (self.cos[k], self.sin[k]);
            // |e^{ia} − e^{ib}|² as a sum of squares, accurate for close points
            let new = (ct - ck) * (ct - ck) + (st - sk) * (st - sk);
            let old = (ci - ck) * (ci - ck) + (si - sk) * (si - sk);
            prod *= new / old;
            in_chunk += 1;
            if in_chunk == CHUNK {
                acc += prod.ln();
                prod = 1.0;
                in_chunk = 0;
            }
        }
        acc + prod.ln()
    }

    fn site_update(&mut self, i: usize) {
        let t = if self.rng.random::<f64>() < self.independence_prob {
            PI - 2.0 * PI * self.rng.random::<f64>()
        } else {
            let z: f64 = self.rng.sample(StandardNormal);
            wrap_angle(self.theta[i] + self.step * z)
        };
        let (st, ct) = t.sin_cos();
        let log_ft = self.log_weight(t);
        let d = self.delta(i, ct, st, log_ft);
        self.proposed += 1;
        let u: f64 = self.rng.random();
        // non-finite proposals (collisions, the zero of f) are rejected
        if d.is_finite() && u.ln() < d {
            self.theta[i] = t;
            self.cos[i] = ct;
            self.sin[i] = st;
            self.log_f[i] = log_ft;
            self.accepted += 1;
        }
    }

    /// Rigid rotation: the pair term is invariant, only `Σ log f` changes.
    fn rotation_update(&mut self) {
        let z: f64 = self.rng.sample(StandardNormal);
        let phi = self.rot_step * z;
        let new_theta: Vec<f64> = self.theta.iter().map(|&t| wrap_angle(t + phi)).collect();
        let new_log_f: Vec<f64> = new_theta.iter().map(|&t| self.log_weight(t)).collect();
        let d: f64 = new_log_f.iter().sum::<f64>() - self.log_f.iter().sum::<f64>();
        self.rot_proposed += 1;
        let u: f64 = self.rng.random();
        if d.is_finite() && u.ln() < d {
            for (j, &t) in new_theta.iter().enumerate() {
                let (s, c) = t.sin_cos();
                self.cos[j] = c;
                self.sin[j] = s;
            }
            self.theta = new_theta;
            self.log_f = new_log_f;
            self.rot_accepted += 1;
        }
    }

    /// One systematic-scan sweep plus one rotation proposal.
    pub fn sweep(&mut self) {
        for i in 0..self.n {
            self.site_update(i);
        }
        self.rotation_update();
        self.sweeps += 1;
    }
}

impl Iterator for McmcChain {
    type Item = EnsembleSample;

    fn next(&mut self) -> Option<EnsembleSample> {
        for _ in 0..self.thinning {
            self.sweep();
        }
        Some(self.state())
    }
}

/// A finite stream of `n_samples` draws over one or more chains.
#[derive(Debug, Clone)]
pub struct McmcRun {
    chains: Vec<McmcChain>,
    per_chain: Vec<usize>,
    current: usize,
    emitted: usize,
    seed: u64,
    n_samples: usize,
}

impl McmcRun {
    pub fn new(w: &WeightSpec, n: usize, config: &McmcConfig) -> Result<Self> {
        validate(n, config)?;
        let chains = (0..config.chains)
            .map(|s| McmcChain::new(w, n, config, s as u64))
            .collect::<Result<Vec<_>>>()?;
        let base = config.n_samples / config.chains;
        let extra = config.n_samples % config.chains;
        let per_chain = (0..config.chains).map(|k| base + usize::from(k < extra)).collect();
        Ok(McmcRun {
            chains,
            per_chain,
            current: 0,
            emitted: 0,
            seed: config.seed,
            n_samples: config.n_samples,
        })
    }

    /// Diagnostics aggregated over chains; acceptance covers all sweeps so far.
    pub fn diagnostics(&self) -> McmcDiagnostics {
        let k = self.chains.len() as f64;
        let mut taus = [1.0f64; 3];
        for c in &self.chains {
            for (t, ct) in taus.iter_mut().zip(c.autocorrelation_times()) {
                *t = t.max(ct);
            }
        }
        let tau = taus.iter().copied().fold(1.0, f64::max);
        let thinning = self.chains.iter().map(|c| c.thinning()).max().unwrap_or(1);
        let ess: f64 = self
            .chains
            .iter()
            .zip(&self.per_chain)
            .map(|(c, &m)| {
                let t = c.autocorrelation_times().iter().copied().fold(1.0, f64::max);
                m as f64 * c.thinning() as f64 / t
            })
            .sum();
        McmcDiagnostics {
            chains: self.chains.len(),
            seed: self.seed,
            acceptance_rate: self.chains.iter().map(|c| c.acceptance_rate()).sum::<f64>() / k,
            rotation_acceptance: self.chains.iter().map(|c| c.rotation_acceptance()).sum::<f64>() / k,
            local_step: self.chains.iter().map(|c| c.local_step()).sum::<f64>() / k,
            autocorrelation_time: tau,
            autocorrelation_times: taus,
            thinning,
            effective_sample_size: ess,
            sweeps: self.chains.iter().map(|c| c.sweeps()).sum(),
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }
}

impl Iterator for McmcRun {
    type Item = EnsembleSample;

    fn next(&mut self) -> Option<EnsembleSample> {
        while self.current < self.chains.len() {
            if self.emitted < self.per_chain[self.current] {
                self.emitted += 1;
                return self.chains[self.current].next();
            }
            self.current += 1;
            self.emitted = 0;
        }
        None
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let done: usize = self.per_chain[..self.current.min(self.per_chain.len())].iter().sum::<usize>() + self.emitted;
        let left = self.n_samples.saturating_sub(done);
        (left, Some(left))
    }
}

/// `n_samples` draws from a single chain with the default schedule.
pub fn sample_mcmc(w: &WeightSpec, n: usize, n_samples: usize, seed: u64) -> Result<McmcRun> {
    McmcRun::new(w, n, &McmcConfig::new(n_samples, seed))
}

fn validate(n: usize, config: &McmcConfig) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::InvalidArgument(format!("ensemble size {n} outside 1..={MAX_N}")));
    }
    if config.chains == 0 {
        return Err(Error::InvalidArgument("at least one chain is required".into()));
    }
    if !(0.0..=1.0).contains(&config.independence_prob) || !(0.0 < config.target_acceptance && config.target_acceptance < 1.0) {
        return Err(Error::InvalidArgument("proposal probabilities must lie in [0, 1]".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::stats::{ks_p_value, ks_statistic};
    use super::*;
    use crate::quadrature::Rule;

    #[test]
    fn single_angle_is_uniform_when_flat() {
        let w = WeightSpec::pure(0.0).unwrap();
        let thetas: Vec<f64> = sample_mcmc(&w, 1, 10_000, 11).unwrap().map(|s| s.thetas[0]).collect();
        let d = ks_statistic(&thetas, |t| (t + PI) / (2.0 * PI));
        let p = ks_p_value(d, thetas.len());
        assert!(p > 0.01, "KS p = {p}");
    }

    #[test]
    fn two_angles_match_quadrature() {
        let w = WeightSpec::pure(0.0).unwrap();
        let (a, b) = (-0.4, 1.3);
        // P(both in A) = ∫∫_{A²} (2 − 2cos(s − t)) / ∫∫ (2 − 2cos(s − t))
        let r = Rule::gauss_legendre(40, a, b);
        let mut num = 0.0;
        for (&s, &ws) in r.nodes.iter().zip(&r.weights) {
            for (&t, &wt) in r.nodes.iter().zip(&r.weights) {
                num += ws * wt * (2.0 - 2.0 * (s - t).cos());
            }
        }
        let exact = num / (8.0 * PI * PI);
        let m = 20_000;
        let hits = sample_mcmc(&w, 2, m, 5).unwrap().filter(|s| s.count_in(a, b) == 2).count();
        let p = hits as f64 / m as f64;
        let se = (exact * (1.0 - exact) / m as f64).sqrt();
        assert!((p - exact).abs() < 3.0 * se, "{p} vs {exact} (σ = {se})");
    }

    #[test]
    fn stream_is_reproducible() {
        let w = WeightSpec::pure(0.2).unwrap();
        let a: Vec<EnsembleSample> = sample_mcmc(&w, 6, 50, 99).unwrap().collect();
        let b: Vec<EnsembleSample> = sample_mcmc(&w, 6, 50, 99).unwrap().collect();
        let c: Vec<EnsembleSample> = sample_mcmc(&w, 6, 50, 100).unwrap().collect();
        let bits = |v: &[EnsembleSample]| -> Vec<u64> { v.iter().flat_map(|s| s.thetas.iter().map(|t| t.to_bits())).collect() };
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn diagnostics_are_reported() {
        let w = WeightSpec::pure(-0.3).unwrap();
        let mut config = McmcConfig::new(200, 3);
        config.chains = 2;
        let run = McmcRun::new(&w, 16, &config).unwrap();
        let samples: Vec<EnsembleSample> = run.clone().collect();
        assert_eq!(samples.len(), 200);
        assert!(samples.iter().all(|s| s.n == 16 && s.thetas.windows(2).all(|p| p[0] <= p[1])));
        let d = run.diagnostics();
        assert!(d.acceptance_rate > 0.1 && d.acceptance_rate < 0.9, "{d:?}");
        assert!(d.autocorrelation_time >= 1.0);
        assert!(d.effective_sample_size >= 200.0 - 1e-9, "{d:?}");
    }

    #[test]
    fn rejects_oversized_ensembles() {
        let w = WeightSpec::pure(0.1).unwrap();
        assert!(sample_mcmc(&w, MAX_N + 1, 10, 0).is_err());
        assert!(sample_mcmc(&w, 0, 10, 0).is_err());
    }
}
