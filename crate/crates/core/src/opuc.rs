//! Orthogonal polynomials `Φ_N` and predictor polynomials `Φ_N*` built from
//! the inverse Toeplitz column, and the exact Christoffel–Darboux kernel.

use crate::toeplitz::{weighted_norm_sq, PredictorColumn, NormCheck};
use crate::weights::WeightSpec;
use crate::{Error, Result, C64};

const NORM_TOL: f64 = 1e-8;
/// Below this separation the kernel is evaluated on the diagonal.
pub const COINCIDENCE: f64 = 1e-8;

/// Scaling applied to the inverse column to obtain `Φ_N*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `Φ_N* = col / (T_N^{−1})_{1,1}`: `Φ_N*(0) = 1`, `Φ_N` monic.
    Monic,
    /// `Φ_N* = col / √(T_N^{−1})_{1,1}`: orthonormal.
    Predictor,
    /// `Φ_N*` has the column entries themselves as coefficients.
    Raw,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::Monic => "monic",
            Normalization::Predictor => "predictor",
            Normalization::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Phi,
    PhiStar,
}

/// `Φ_N` and `Φ_N*` in a chosen normalization.
#[derive(Debug, Clone)]
pub struct OrthogonalPair {
    pub n: usize,
    pub normalization: Normalization,
    pub phi_star_coeffs: Vec<C64>,
    pub phi_coeffs: Vec<C64>,
    /// `h_N = ‖Φ_N‖²` of the monic polynomial.
    pub h: f64,
}

impl OrthogonalPair {
    /// Rescale the column without re-checking `h`.
    pub fn from_column(p: &PredictorColumn, normalization: Normalization) -> Self {
        let scale = match normalization {
            Normalization::Monic => 1.0 / p.norm11,
            Normalization::Predictor => 1.0 / p.norm11.sqrt(),
            Normalization::Raw => 1.0,
        };
        let phi_star_coeffs: Vec<C64> = p.first_col.iter().map(|z| z * scale).collect();
        let phi_coeffs = star(&phi_star_coeffs);
        OrthogonalPair {
            n: p.n,
            normalization,
            phi_star_coeffs,
            phi_coeffs,
            h: p.h(),
        }
    }

    pub fn coeffs(&self, which: Which) -> &[C64] {
        match which {
            Which::Phi => &self.phi_coeffs,
            Which::PhiStar => &self.phi_star_coeffs,
        }
    }
}

/// Build both polynomials and confirm `h_N` by quadrature of `f|Φ_N|²`.
pub fn build_pair(p: &PredictorColumn, w: &WeightSpec, normalization: Normalization) -> Result<OrthogonalPair> {
    let check = NormCheck {
        m: p.n,
        from_column: p.h(),
        from_quadrature: weighted_norm_sq(w, &p.monic),
    };
    if check.relative_gap() > NORM_TOL {
        return Err(Error::NormInconsistency {
            m: p.n,
            from_column: check.from_column,
            from_quadrature: check.from_quadrature,
        });
    }
    Ok(OrthogonalPair::from_column(p, normalization))
}

/// Coefficients of `p*(z) = z^N conj(p(1/conj z))`.
pub fn star(coeffs: &[C64]) -> Vec<C64> {
    coeffs.iter().rev().map(|z| z.conj()).collect()
}

/// `j`-th derivative of `Σ a_l z^l` at `z` by Horner's scheme.
pub fn eval_derivative(coeffs: &[C64], j: usize, z: C64) -> C64 {
    if j >= coeffs.len() {
        return C64::new(0.0, 0.0);
    }
    let mut acc = C64::new(0.0, 0.0);
    for l in (j..coeffs.len()).rev() {
        let mut ff = 1.0;
        for r in 0..j {
            ff *= (l - r) as f64;
        }
        acc = acc * z + coeffs[l] * ff;
    }
    acc
}

pub fn eval_poly(pair: &OrthogonalPair, which: Which, j: usize, z: C64) -> C64 {
    eval_derivative(pair.coeffs(which), j, z)
}

/// Monic `Φ_0(z), …, Φ_{count−1}(z)` and the matching `Φ_m*(z)` by the
/// pointwise Szegő recursion.
pub fn monic_values(verblunsky: &[C64], z: C64, count: usize) -> (Vec<C64>, Vec<C64>) {
    assert!(count <= verblunsky.len() + 1);
    let mut phi = Vec::with_capacity(count);
    let mut phis = Vec::with_capacity(count);
    let (mut a, mut b) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    for m in 0..count {
        phi.push(a);
        phis.push(b);
        if m + 1 < count {
            let g = verblunsky[m];
            let za = z * a;
            a = za - g.conj() * b;
            b -= g * za;
        }
    }
    (phi, phis)
}

/// `K_N(θ, θ′) = √(f(θ)f(θ′)) Σ_{m<N} conj(Φ_m(e^{iθ}))Φ_m(e^{iθ′}) / h_m`,
/// the reproducing kernel of the first `N` polynomials under `f dθ/2π`.
#[derive(Debug, Clone)]
pub struct CDKernelExact {
    pub n: usize,
    /// Monic pair of degree `n`.
    pub pair: OrthogonalPair,
    pub weight: WeightSpec,
    verblunsky: Vec<C64>,
    norms: Vec<f64>,
}

impl CDKernelExact {
    pub fn new(p: &PredictorColumn, w: &WeightSpec) -> Self {
        CDKernelExact {
            n: p.n,
            pair: OrthogonalPair::from_column(p, Normalization::Monic),
            weight: w.clone(),
            verblunsky: p.verblunsky.clone(),
            norms: p.norms.clone(),
        }
    }

    /// Christoffel–Darboux form; the diagonal uses the derivative of the
    /// numerator.
    pub fn eval(&self, theta: f64, theta_prime: f64) -> C64 {
        let delta = theta_prime - theta;
        if delta.abs() < COINCIDENCE {
            return C64::new(self.diagonal(theta), 0.0);
        }
        let z = C64::from_polar(1.0, theta);
        let w = C64::from_polar(1.0, theta_prime);
        let ps = &self.pair.phi_star_coeffs;
        let p = &self.pair.phi_coeffs;
        let num = eval_derivative(ps, 0, z).conj() * eval_derivative(ps, 0, w)
            - eval_derivative(p, 0, z).conj() * eval_derivative(p, 0, w);
        // 1 − e^{iδ} = −2i sin(δ/2) e^{iδ/2}
        let den = C64::new(0.0, -2.0 * (0.5 * delta).sin()) * C64::from_polar(1.0, 0.5 * delta);
        let sf = (self.weight.eval(theta) * self.weight.eval(theta_prime)).sqrt();
        num / den * (sf / self.pair.h)
    }

    /// `K_N(θ, θ)`.
    pub fn diagonal(&self, theta: f64) -> f64 {
        let z = C64::from_polar(1.0, theta);
        let ps = &self.pair.phi_star_coeffs;
        let p = &self.pair.phi_coeffs;
        let d = eval_derivative(ps, 0, z).conj() * eval_derivative(ps, 1, z)
            - eval_derivative(p, 0, z).conj() * eval_derivative(p, 1, z);
        let v = -(z * d).re;
        self.weight.eval(theta) * v / self.pair.h
    }

    /// The defining sum over `m < N`, evaluated by the Szegő recursion.
    pub fn eval_sum(&self, theta: f64, theta_prime: f64) -> C64 {
        let z = C64::from_polar(1.0, theta);
        let w = C64::from_polar(1.0, theta_prime);
        let (pz, _) = monic_values(&self.verblunsky, z, self.n);
        let (pw, _) = monic_values(&self.verblunsky, w, self.n);
        let s: C64 = (0..self.n).map(|m| pz[m].conj() * pw[m] / self.norms[m]).sum();
        s * (self.weight.eval(theta) * self.weight.eval(theta_prime)).sqrt()
    }

    /// `√f(θ) Φ_m(e^{iθ}) / √h_m` for `m < N`.
    pub fn orthonormal_values(&self, theta: f64) -> Vec<C64> {
        let z = C64::from_polar(1.0, theta);
        let (pz, _) = monic_values(&self.verblunsky, z, self.n);
        let sf = self.weight.eval(theta).sqrt();
        pz.iter()
            .zip(&self.norms)
            .map(|(v, h)| v * (sf / h.sqrt()))
            .collect()
    }

    /// `Φ_m(e^{iθ}) / √h_m` for `m < N`, without the weight factor.
    pub fn polynomial_values(&self, theta: f64) -> Vec<C64> {
        let z = C64::from_polar(1.0, theta);
        let (pz, _) = monic_values(&self.verblunsky, z, self.n);
        pz.iter().zip(&self.norms).map(|(v, h)| v / h.sqrt()).collect()
    }
}
