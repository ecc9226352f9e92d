//! Exact sampling of the rank-`N` projection kernel `K_N` discretized on a
//! panel quadrature grid.
//!
//! Grid node `g` carries the feature row
//! `√(ω_g r(θ_g)) Φ_m(e^{iθ_g})/√h_m`, `m < N`, whose Gram matrix is the
//! identity up to quadrature error. After a Cholesky correction the rows span
//! an exact rank-`N` projection and points are drawn one at a time from the
//! residual norms.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::EnsembleSample;
use crate::opuc::CDKernelExact;
use crate::quadrature::{CircleRule, PanelLayout};
use crate::toeplitz::levinson_first_column;
use crate::weights::WeightSpec;
use crate::{Error, Result, C64};

pub const MAX_N: usize = 128;
pub const MIN_GRID: usize = 512;
/// Largest tolerated entry of `|V*V − I|` before the grid is rejected.
pub const GRAM_TOL: f64 = 1e-9;

const NODES_PER_PANEL: usize = 8;

#[derive(Debug, Clone)]
pub struct DppSampler {
    n: usize,
    nodes: Vec<f64>,
    /// Row-major `nodes.len() × n` orthonormal features.
    features: Vec<C64>,
    gram_deviation: f64,
}

impl DppSampler {
    /// `breakpoints` become panel boundaries, so counts in intervals with
    /// those endpoints are resolved exactly by the grid.
    pub fn new(w: &WeightSpec, n: usize, grid_size: usize, breakpoints: &[f64]) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidArgument(format!("ensemble size {n} outside 1..={MAX_N}")));
        }
        if grid_size < MIN_GRID {
            return Err(Error::InvalidArgument(format!("grid size {grid_size} below {MIN_GRID}")));
        }
        let rule = CircleRule::new(
            2.0 * w.alpha(),
            &PanelLayout {
                nodes_per_panel: NODES_PER_PANEL,
                max_width: 2.0 * std::f64::consts::PI * NODES_PER_PANEL as f64 / grid_size as f64,
                refine_levels: 0,
                breakpoints: breakpoints.to_vec(),
            },
        );
        let p = levinson_first_column(w, n)?;
        let kernel = CDKernelExact::new(&p, w);
        let g = rule.len();
        let mut v = DMatrix::<C64>::zeros(g, n);
        for (row, (&t, &om)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let s = (om * w.regular_part(t)).sqrt();
            for (m, phi) in kernel.polynomial_values(t).into_iter().enumerate() {
                v[(row, m)] = phi * s;
            }
        }
        let gram = v.adjoint() * &v;
        let deviation = (&gram - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > GRAM_TOL || !deviation.is_finite() {
            return Err(Error::RankDeficient { rank: n, deviation });
        }
        let chol = gram
            .cholesky()
            .ok_or(Error::RankDeficient { rank: n, deviation })?;
        // V L^{-*}: columns become exactly orthonormal
        let y = chol
            .l()
            .solve_lower_triangular(&v.adjoint())
            .ok_or(Error::RankDeficient { rank: n, deviation })?;
        let mut features = Vec::with_capacity(g * n);
        for row in 0..g {
            for m in 0..n {
                features.push(y[(m, row)].conj());
            }
        }
        Ok(DppSampler {
            n,
            nodes: rule.nodes,
            features,
            gram_deviation: deviation,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn gram_deviation(&self) -> f64 {
        self.gram_deviation
    }

    fn row(&self, g: usize) -> &[C64] {
        &self.features[g * self.n..(g + 1) * self.n]
    }

    /// Inclusion probability of each node: the discretized `K_N(θ,θ) ω/2π`.
    pub fn intensity(&self) -> Vec<f64> {
        (0..self.nodes.len())
            .map(|g| self.row(g).iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// One draw of exactly `n` distinct grid nodes.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> EnsembleSample {
        let n = self.n;
        let mut residual = self.intensity();
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut chosen = Vec::with_capacity(n);
        for _ in 0..n {
            let total: f64 = residual.iter().sum();
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = residual.len() - 1;
            for (g, &r) in residual.iter().enumerate() {
                acc += r;
                if acc > target && r > 0.0 {
                    pick = g;
                    break;
                }
            }
            // Gram-Schmidt step against the rows already selected
            let mut e: Vec<C64> = self.row(pick).to_vec();
            for b in &basis {
                let ip: C64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                for (ek, bk) in e.iter_mut().zip(b) {
                    *ek -= ip * bk;
                }
            }
            let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in e.iter_mut() {
                *z /= norm;
            }
            for (g, r) in residual.iter_mut().enumerate() {
                let ip: C64 = e.iter().zip(self.row(g)).map(|(x, y)| x.conj() * y).sum();
                *r = (*r - ip.norm_sqr()).max(0.0);
            }
            residual[pick] = 0.0;
            basis.push(e);
            chosen.push(self.nodes[pick]);
        }
        EnsembleSample::new(chosen)
    }

    /// Endless stream of draws from a seeded ChaCha20 generator.
    pub fn samples(&self, seed: u64) -> impl Iterator<Item = EnsembleSample> + '_ {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        std::iter::repeat_with(move || self.sample(&mut rng))
    }
}

/// A single draw with no extra breakpoints.
pub fn sample_dpp(w: &WeightSpec, n: usize, grid_size: usize, seed: u64) -> Result<EnsembleSample> {
    let sampler = DppSampler::new(w, n, grid_size, &[])?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok(sampler.sample(&mut rng))
}

#[cfg(test)]
mod tests {
    use super::super::stats::chi_square_test;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn draws_have_exactly_n_distinct_points() {
        let w = WeightSpec::new(0.25, vec![C64::new(1.0, 0.0), C64::new(0.2, 0.1)]).unwrap();
        let s = DppSampler::new(&w, 12, 512, &[0.5, 1.0]).unwrap();
        for d in s.samples(4).take(50) {
            assert_eq!(d.thetas.len(), 12);
            assert!(d.thetas.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn intensity_sums_to_rank() {
        let w = WeightSpec::pure(-0.3).unwrap();
        let s = DppSampler::new(&w, 20, 1024, &[]).unwrap();
        let total: f64 = s.intensity().iter().sum();
        assert!((total - 20.0).abs() < 1e-10, "{total}");
        assert!(s.gram_deviation() < GRAM_TOL);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let w = WeightSpec::pure(0.25).unwrap();
        match DppSampler::new(&w, 128, 512, &[]) {
            Err(Error::RankDeficient { rank, .. }) => assert_eq!(rank, 128),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn intensity_matches_kernel_diagonal() {
        let w = WeightSpec::new(0.2, vec![C64::new(1.0, 0.0), C64::new(-0.25, 0.0)]).unwrap();
        let n = 10;
        let s = DppSampler::new(&w, n, 512, &[0.3, 1.1]).unwrap();
        let p = levinson_first_column(&w, n).unwrap();
        let k = CDKernelExact::new(&p, &w);
        let in_bin: f64 = s
            .nodes()
            .iter()
            .zip(s.intensity())
            .filter(|(t, _)| (0.3..=1.1).contains(*t))
            .map(|(_, i)| i)
            .sum();
        let rule = crate::quadrature::Rule::gauss_legendre(60, 0.3, 1.1);
        let exact = rule.integrate(|t| k.diagonal(t)) / (2.0 * PI);
        assert!((in_bin - exact).abs() < 1e-9, "{in_bin} vs {exact}");
    }

    #[test]
    fn flat_weight_shows_level_repulsion() {
        // nearest-neighbour spacings of 8 points against the Poisson law
        let w = WeightSpec::pure(0.0).unwrap();
        let n = 8;
        let s = DppSampler::new(&w, n, 1024, &[]).unwrap();
        let bins = 10;
        let width = 0.25;
        let mut observed = vec![0u64; bins + 1];
        let mut total = 0u64;
        for d in s.samples(21).take(10_000) {
            let t = &d.thetas;
            for j in 0..n {
                let next = if j + 1 < n { t[j + 1] } else { t[0] + 2.0 * PI };
                // spacing in units of the mean spacing
                let x = (next - t[j]) * n as f64 / (2.0 * PI);
                let b = ((x / width) as usize).min(bins);
                observed[b] += 1;
                total += 1;
            }
        }
        let expected: Vec<f64> = (0..=bins)
            .map(|b| {
                let lo = b as f64 * width;
                let p = if b == bins { (-lo).exp() } else { (-lo).exp() - (-(lo + width)).exp() };
                p * total as f64
            })
            .collect();
        let (_, p) = chi_square_test(&observed, &expected);
        assert!(p < 1e-3, "p = {p}");
        // and few tiny gaps
        assert!((observed[0] as f64) < 0.2 * expected[0]);
    }

    #[test]
    fn seeded_draws_repeat() {
        let w = WeightSpec::pure(0.1).unwrap();
        let a = sample_dpp(&w, 6, 512, 8).unwrap();
        let b = sample_dpp(&w, 6, 512, 8).unwrap();
        assert_eq!(a, b);
    }
}
