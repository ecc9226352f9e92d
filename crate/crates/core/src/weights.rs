//! Fisher–Hartwig symbols `f(θ) = (2 − 2cos θ)^α c(θ)`, their Fourier
//! coefficients and the outer factor `g_α = (1 − z)^α c₁(z)`.

use std::f64::consts::PI;
use std::path::Path;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::special::{binomial_series, gamma};
use crate::{Error, Result, C64};

/// Number of grid points used to validate positivity of `c`.
pub const POSITIVITY_GRID: usize = 4096;

/// Base grid of the log-FFT factorization.
const OUTER_BASE_GRID: usize = 1 << 13;
const OUTER_MAX_GRID: usize = 1 << 21;
const OUTER_TOL: f64 = 1e-12;

/// The symbol `f`: exponent `α` and the smooth factor `c` as a Hermitian
/// Fourier series `c(θ) = Σ_{|k|≤M} ĉ(k) e^{ikθ}`.
///
/// Only `ĉ(0..=M)` is stored; `ĉ(−k) = conj(ĉ(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    alpha: f64,
    c: Vec<C64>,
    beurling_mu: Option<f64>,
}

impl WeightSpec {
    pub fn new(alpha: f64, c: Vec<C64>) -> Result<Self> {
        if !alpha.is_finite() || alpha.abs() >= 0.5 {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if c.is_empty() {
            return Err(Error::InvalidWeight("c needs at least the constant coefficient".into()));
        }
        if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidWeight("non-finite Fourier coefficient".into()));
        }
        let scale: f64 = c.iter().map(|z| z.norm()).sum();
        if c[0].im.abs() > 1e-14 * scale {
            return Err(Error::InvalidWeight(format!(
                "constant coefficient must be real for a Hermitian series, got {}",
                c[0]
            )));
        }
        let mut c = c;
        c[0].im = 0.0;
        while c.len() > 1 && c[c.len() - 1] == C64::new(0.0, 0.0) {
            c.pop();
        }
        let w = WeightSpec {
            alpha,
            c,
            beurling_mu: None,
        };
        w.check_positive()?;
        Ok(w)
    }

    /// `c ≡ 1`.
    pub fn pure(alpha: f64) -> Result<Self> {
        WeightSpec::new(alpha, vec![C64::new(1.0, 0.0)])
    }

    /// Attach a Beurling exponent `μ`; only its sign is validated.
    pub fn with_beurling_mu(mut self, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidWeight(format!("Beurling exponent must be >= 0, got {mu}")));
        }
        self.beurling_mu = Some(mu);
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beurling_mu(&self) -> Option<f64> {
        self.beurling_mu
    }

    /// Degree `M` of the trigonometric polynomial `c`.
    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    /// `ĉ(0..=M)`.
    pub fn c_coefficients(&self) -> &[C64] {
        &self.c
    }

    /// `ĉ(k)` for any integer `k`.
    pub fn c_hat(&self, k: i64) -> C64 {
        let idx = k.unsigned_abs() as usize;
        match self.c.get(idx) {
            None => C64::new(0.0, 0.0),
            Some(&z) if k >= 0 => z,
            Some(&z) => z.conj(),
        }
    }

    pub fn is_pure(&self) -> bool {
        self.c.len() == 1 && self.c[0].re == 1.0
    }

    /// True when `c` is even in `θ` (all coefficients real).
    pub fn is_even(&self) -> bool {
        self.c.iter().all(|z| z.im == 0.0)
    }

    /// Weighted norm `Σ_k |ĉ(k)| (1 + |k|)^μ`.
    pub fn beurling_norm(&self) -> Option<f64> {
        let mu = self.beurling_mu?;
        let head = self.c[0].norm();
        let rest: f64 = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, z)| 2.0 * z.norm() * (1.0 + k as f64).powf(mu))
            .sum();
        Some(head + rest)
    }

    /// `c(e^{iθ})`.
    pub fn c_eval(&self, theta: f64) -> f64 {
        let mut acc = self.c[0].re;
        for (k, z) in self.c.iter().enumerate().skip(1) {
            let e = C64::from_polar(1.0, k as f64 * theta);
            acc += 2.0 * (z * e).re;
        }
        acc
    }

    /// `f(e^{iθ})`; `+∞` at `θ = 0` when `α < 0`.
    pub fn eval(&self, theta: f64) -> f64 {
        let c = self.c_eval(theta);
        if self.alpha == 0.0 {
            return c;
        }
        let s = (0.5 * theta).sin();
        if s == 0.0 {
            return if self.alpha > 0.0 { 0.0 } else { f64::INFINITY };
        }
        (4.0 * s * s).powf(self.alpha) * c
    }

    /// Smooth part `r` with `f(θ) = |θ|^{2α} r(θ)` on `(−π, π]`.
    pub fn regular_part(&self, theta: f64) -> f64 {
        let half = 0.5 * theta;
        let sinc = if half.abs() < 1e-8 {
            1.0 - half * half / 6.0
        } else {
            half.sin() / half
        };
        sinc.powf(2.0 * self.alpha) * self.c_eval(theta)
    }

    fn check_positive(&self) -> Result<()> {
        for j in 0..POSITIVITY_GRID {
            let theta = -PI + 2.0 * PI * (j as f64 + 0.5) / POSITIVITY_GRID as f64;
            let v = self.c_eval(theta);
            if !(v > 0.0) {
                return Err(Error::NonPositiveSymbol { theta, value: v });
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> std::result::Result<Self, WeightFileError> {
        let file: WeightFile = serde_json::from_str(text).map_err(WeightFileError::Parse)?;
        file.into_spec().map_err(WeightFileError::Invalid)
    }

    /// Read a weight file (see [`WeightFile`]).
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        match WeightSpec::from_json_str(&text) {
            Ok(w) => Ok(w),
            Err(WeightFileError::Parse(source)) => Err(Error::Json {
                path: path.to_path_buf(),
                source,
            }),
            Err(WeightFileError::Invalid(e)) => Err(e),
        }
    }

    pub fn to_file(&self) -> WeightFile {
        WeightFile {
            alpha: self.alpha,
            c: self.c.iter().map(|z| [z.re, z.im]).collect(),
            beurling_mu: self.beurling_mu,
        }
    }
}

/// On-disk form of a [`WeightSpec`]: `c` lists `[re, im]` for `k = 0..=M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFile {
    pub alpha: f64,
    pub c: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beurling_mu: Option<f64>,
}

impl WeightFile {
    pub fn into_spec(self) -> Result<WeightSpec> {
        let c = self.c.iter().map(|p| C64::new(p[0], p[1])).collect();
        let w = WeightSpec::new(self.alpha, c)?;
        match self.beurling_mu {
            Some(mu) => w.with_beurling_mu(mu),
            None => Ok(w),
        }
    }
}

#[derive(Debug)]
pub enum WeightFileError {
    Parse(serde_json::Error),
    Invalid(Error),
}

/// Two-sided sequence `a(−K..=K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSided {
    k_max: usize,
    data: Vec<C64>,
}

impl TwoSided {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn get(&self, k: i64) -> C64 {
        let idx = k + self.k_max as i64;
        assert!(
            idx >= 0 && (idx as usize) < self.data.len(),
            "index {k} outside ±{}",
            self.k_max
        );
        self.data[idx as usize]
    }

    /// Entries from `−K` to `K`.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

/// Fourier coefficients `ŝ(0..=k_max)` of `(2 − 2cos θ)^α`, which are real
/// and even: `ŝ(0) = Γ(2α+1)/Γ(α+1)²`, `ŝ(k+1) = ŝ(k)(k − α)/(k + α + 1)`.
pub fn singular_coefficients(alpha: f64, k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    if alpha == 0.0 {
        out.resize(k_max + 1, 0.0);
        out[0] = 1.0;
        return out;
    }
    let mut s = gamma(2.0 * alpha + 1.0) / gamma(alpha + 1.0).powi(2);
    for k in 0..=k_max {
        out.push(s);
        let kf = k as f64;
        s *= (kf - alpha) / (kf + alpha + 1.0);
    }
    out
}

/// `f̂(−k_max..=k_max)` under `dθ/2π`, as the convolution `ŝ ⊛ ĉ`.
pub fn fourier_coefficients(w: &WeightSpec, k_max: usize) -> TwoSided {
    let m = w.degree();
    let s = singular_coefficients(w.alpha, k_max + m);
    let s_at = |k: i64| s[k.unsigned_abs() as usize];
    let mut data = Vec::with_capacity(2 * k_max + 1);
    for k in -(k_max as i64)..=(k_max as i64) {
        let mut acc = C64::new(0.0, 0.0);
        for j in -(m as i64)..=(m as i64) {
            acc += w.c_hat(j) * s_at(k - j);
        }
        data.push(acc);
    }
    TwoSided { k_max, data }
}

/// Outer factorization `c = |c₁|²` with `c₁ ∈ H⁺`, `c₁(0) > 0`, and the
/// Taylor coefficients of `1/g_{α+s}`, `s ∈ {0, 1, 2}`.
#[derive(Debug, Clone)]
pub struct OuterData {
    pub alpha: f64,
    pub n_terms: usize,
    /// Taylor coefficients of `c₁`.
    pub c1_fourier: Vec<C64>,
    /// Taylor coefficients of `1/c₁`.
    pub inv_c1_fourier: Vec<C64>,
    pub c1_at_1: C64,
    /// FFT grid size at which the factorization converged.
    pub grid: usize,
    beta: [Vec<C64>; 3],
}

impl OuterData {
    /// `β_k^{(α+shift)}`, the `k`-th Taylor coefficient of `(1−z)^{−α−shift}/c₁(z)`.
    pub fn beta(&self, shift: usize, k: usize) -> Result<C64> {
        beta_coefficient(self, shift, k)
    }

    pub fn beta_sequence(&self, shift: usize) -> &[C64] {
        &self.beta[shift]
    }

    /// `|c₁(1)|² = c(1)`.
    pub fn c1_at_1_sq(&self) -> f64 {
        self.c1_at_1.norm_sqr()
    }

    /// `c₁(0)`, real and positive.
    pub fn c1_at_0(&self) -> f64 {
        self.c1_fourier[0].re
    }

    /// `c₁(z)` for `|z| ≤ 1`.
    pub fn c1_eval(&self, z: C64) -> C64 {
        horner(&self.c1_fourier, z)
    }
}

/// `β_k^{(α+shift)}`, `shift ∈ {0, 1, 2}`.
pub fn beta_coefficient(d: &OuterData, shift: usize, k: usize) -> Result<C64> {
    if shift > 2 {
        return Err(Error::InvalidArgument(format!("beta shift must be 0, 1 or 2, got {shift}")));
    }
    d.beta[shift]
        .get(k)
        .copied()
        .ok_or(Error::OutOfRange { index: k, available: d.n_terms })
}

/// Log-FFT spectral factorization of `c`, doubling the grid until the
/// aliasing tail is below `1e−12`.
pub fn outer_factor(w: &WeightSpec, n_terms: usize) -> Result<OuterData> {
    let n_terms = n_terms.max(1);
    let mut grid = OUTER_BASE_GRID.max((4 * (n_terms + w.degree())).next_power_of_two());
    let mut last_tail;
    loop {
        let (c1, inv, at1, tail) = factor_on_grid(w, grid);
        last_tail = tail;
        if tail <= OUTER_TOL {
            let take = |v: &[C64]| -> Vec<C64> {
                (0..n_terms)
                    .map(|k| v.get(k).copied().unwrap_or(C64::new(0.0, 0.0)))
                    .collect()
            };
            let c1 = take(&c1);
            let inv = take(&inv);
            let beta = [0usize, 1, 2].map(|s| {
                let b = binomial_series(w.alpha + s as f64, n_terms);
                convolve_real_complex(&b, &inv, n_terms)
            });
            return Ok(OuterData {
                alpha: w.alpha,
                n_terms,
                c1_fourier: c1,
                inv_c1_fourier: inv,
                c1_at_1: at1,
                grid,
                beta,
            });
        }
        if grid >= OUTER_MAX_GRID {
            break;
        }
        grid *= 2;
    }
    Err(Error::FactorizationFailed { grid, tail: last_tail })
}

/// Returns `(c₁ coefficients, 1/c₁ coefficients, c₁(1), tail)` on an `l`-point grid.
fn factor_on_grid(w: &WeightSpec, l: usize) -> (Vec<C64>, Vec<C64>, C64, f64) {
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(l);
    let inv = planner.plan_fft_inverse(l);
    let scale = 1.0 / l as f64;

    let mut buf: Vec<C64> = (0..l)
        .map(|j| C64::new(w.c_eval(2.0 * PI * j as f64 / l as f64).ln(), 0.0))
        .collect();
    fwd.process(&mut buf);
    let cep: Vec<C64> = buf.iter().map(|z| z * scale).collect();

    let half = l / 2;
    let mut h = vec![C64::new(0.0, 0.0); l];
    h[0] = C64::new(0.5 * cep[0].re, 0.0);
    h[1..half].copy_from_slice(&cep[1..half]);
    let at1_log: C64 = h.iter().sum();
    let cep_tail = cep[half - half / 4..half + half / 4]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let mut hv = h.clone();
    inv.process(&mut hv);
    let mut pos: Vec<C64> = hv.iter().map(|z| z.exp()).collect();
    let mut neg: Vec<C64> = hv.iter().map(|z| (-z).exp()).collect();
    fwd.process(&mut pos);
    fwd.process(&mut neg);
    for z in pos.iter_mut().chain(neg.iter_mut()) {
        *z *= scale;
    }
    pos[0] = C64::new(h[0].re.exp(), 0.0);
    neg[0] = C64::new((-h[0].re).exp(), 0.0);
    let a0 = pos[0].norm().max(neg[0].norm()).max(1.0);
    let alias = pos[half..]
        .iter()
        .chain(&neg[half..])
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        / a0;
    pos.truncate(half);
    neg.truncate(half);
    (pos, neg, at1_log.exp(), cep_tail.max(alias))
}

/// First `n` Taylor coefficients of the product of two series.
pub(crate) fn convolve_real_complex(a: &[f64], b: &[C64], n: usize) -> Vec<C64> {
    let nb = b.iter().rposition(|z| z.norm() > 0.0).map_or(0, |p| p + 1);
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(nb.saturating_sub(1));
            (lo..=k.min(a.len().saturating_sub(1)))
                .filter(|&j| k - j < nb)
                .map(|j| b[k - j] * a[j])
                .sum()
        })
        .collect()
}

/// `Σ a_k z^k`.
pub(crate) fn horner(a: &[C64], z: C64) -> C64 {
    a.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}
