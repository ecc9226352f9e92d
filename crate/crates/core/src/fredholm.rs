//! Fredholm determinants `det(I − γK)` on `L²(I)` by Nyström discretization,
//! and the counting probabilities they generate.
//!
//! The operator acts on `L²(I, du)` with kernel `K(u, v)/2π`, so that a
//! kernel normalized against `dθ/2π` produces the counting statistics of
//! the rescaled angles `Nθ`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::limit_kernels::IntegralKernel;
use crate::quadrature::singular_line_rule;
use crate::{Error, Result, C64};

pub const MIN_NODES: usize = 8;
pub const MAX_NODES: usize = 512;
/// Eigenvalues closer than this to 1 are reported.
pub const NEAR_ONE: f64 = 1e-12;

/// Nyström matrix `√W_i K(x_i, x_j) √W_j / 2π` and its spectrum.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub interval: [f64; 2],
    pub nodes: Vec<f64>,
    /// Quadrature weights including the kernel's `|u|^p` factor.
    pub weights: Vec<f64>,
    pub matrix: DMatrix<C64>,
    /// Real spectrum of the Hermitian part, ascending.
    pub eigenvalues: Vec<f64>,
    /// `max |M − M^H|`, zero for an exactly Hermitian kernel.
    pub hermitian_defect: f64,
    /// The interval contains the singular point in its interior.
    pub straddles_origin: bool,
}

/// Discretize `K/2π` on `[lo, hi]` with about `n_nodes` Gauss nodes.
pub fn discretize<K: IntegralKernel + ?Sized>(k: &K, interval: [f64; 2], n_nodes: usize) -> Result<DiscretizedOperator> {
    let [lo, hi] = interval;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
    }
    if !(MIN_NODES..=MAX_NODES).contains(&n_nodes) {
        return Err(Error::InvalidArgument(format!(
            "n_nodes must lie in [{MIN_NODES}, {MAX_NODES}], got {n_nodes}"
        )));
    }
    let rule = singular_line_rule(lo, hi, n_nodes, k.singular_power());
    let n = rule.len();
    let sw: Vec<f64> = rule.weights.iter().map(|w| (w / (2.0 * PI)).sqrt()).collect();
    let mut matrix = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            matrix[(i, j)] = k.reduced(rule.nodes[i], rule.nodes[j]) * (sw[i] * sw[j]);
        }
    }
    Ok(from_matrix(interval, rule.nodes, rule.weights, matrix, lo < 0.0 && hi > 0.0))
}

/// Wrap an explicit Nyström matrix.
pub fn from_matrix(
    interval: [f64; 2],
    nodes: Vec<f64>,
    weights: Vec<f64>,
    matrix: DMatrix<C64>,
    straddles_origin: bool,
) -> DiscretizedOperator {
    let adj = matrix.adjoint();
    let hermitian_defect = (&matrix - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let eigenvalues = if matrix.nrows() == 0 {
        Vec::new()
    } else {
        let h = (&matrix + &adj) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    };
    DiscretizedOperator {
        interval,
        nodes,
        weights,
        matrix,
        eigenvalues,
        hermitian_defect,
        straddles_origin,
    }
}

impl DiscretizedOperator {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Tr K = Σ λ_i`.
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Direct trace of the matrix (no eigen-decomposition).
    pub fn matrix_trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `det(I − γM)` by complex LU.
    pub fn det_direct(&self, gamma: f64) -> C64 {
        let n = self.len();
        if n == 0 {
            return C64::new(1.0, 0.0);
        }
        let a = DMatrix::<C64>::identity(n, n) - &self.matrix * C64::new(gamma, 0.0);
        a.lu().determinant()
    }

    pub fn has_near_one_eigenvalue(&self) -> bool {
        self.eigenvalues.iter().any(|l| (1.0 - l).abs() < NEAR_ONE)
    }
}

/// `det(I − γK) = Π(1 − γλ_i)`.
pub fn det_gamma(op: &DiscretizedOperator, gamma: f64) -> f64 {
    op.eigenvalues.iter().map(|l| 1.0 - gamma * l).product()
}

/// `det(I − γK) = exp(−Σ_{m≥1} γ^m Tr(K^m)/m)` truncated at `m_max`, with the
/// traces taken from matrix powers. Returns `None` when the series is not
/// safely convergent (`ρ(γK) ≥ 1/2`).
pub fn det_trace_expansion(op: &DiscretizedOperator, gamma: f64, m_max: usize) -> Option<f64> {
    let radius = op.eigenvalues.iter().map(|l| (gamma * l).abs()).fold(0.0, f64::max);
    if radius >= 0.5 {
        return None;
    }
    let n = op.len();
    if n == 0 {
        return Some(1.0);
    }
    let mut power = op.matrix.clone();
    let mut log = 0.0;
    let mut g = gamma;
    for m in 1..=m_max {
        let tr: f64 = power.diagonal().iter().map(|z| z.re).sum();
        log -= g * tr / m as f64;
        g *= gamma;
        power = &power * &op.matrix;
    }
    Some(log.exp())
}

/// Coefficients of `Π_i ((1 − λ_i) + λ_i z)` up to `z^{m_max}`.
pub fn generating_coefficients(eigenvalues: &[f64], m_max: usize) -> Vec<f64> {
    let mut p = vec![0.0; m_max + 1];
    p[0] = 1.0;
    for &l in eigenvalues {
        for m in (0..=m_max).rev() {
            let lower = if m > 0 { p[m - 1] } else { 0.0 };
            p[m] = p[m] * (1.0 - l) + lower * l;
        }
    }
    p
}

/// Coefficients `c_k` of `det(I − γK) = Σ_k c_k γ^k`.
pub fn determinant_polynomial(eigenvalues: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; eigenvalues.len() + 1];
    c[0] = 1.0;
    for (i, &l) in eigenvalues.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            c[k] -= l * c[k - 1];
        }
    }
    c
}

/// `P(exactly m points in I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingProbability {
    pub interval: [f64; 2],
    pub m: usize,
    pub value: f64,
}

/// `((−1)^m/m!) (d/dγ)^m det(I − γK)` at `γ = 1`, i.e. the coefficient of
/// `z^m` in `det(I − (1 − z)K)`.
pub fn counting_probability(op: &DiscretizedOperator, m: usize) -> Result<CountingProbability> {
    if m > 12 {
        return Err(Error::InvalidArgument(format!("m must be at most 12, got {m}")));
    }
    let p = generating_coefficients(&op.eigenvalues, m);
    Ok(CountingProbability {
        interval: op.interval,
        m,
        value: p[m],
    })
}

/// `P(m)` for `m = 0..=m_max`.
pub fn counting_probabilities(op: &DiscretizedOperator, m_max: usize) -> Vec<f64> {
    generating_coefficients(&op.eigenvalues, m_max)
}

/// Log–log decay of the counting probabilities on shrinking intervals.
#[derive(Debug, Clone)]
pub struct Proba3Report {
    pub p: u32,
    pub base_interval: [f64; 2],
    pub n_grid: Vec<usize>,
    /// `P(≥ 1)` for each `N`.
    pub at_least_one: Vec<f64>,
    /// `P(m)` for `m = 0, 1, 2` and each `N`.
    pub by_count: Vec<[f64; 3]>,
    /// Least-squares slope of `log P(≥ 1)` against `log N`.
    pub slope: f64,
    /// Slopes for `m = 1` and `m = 2`.
    pub slope_by_count: [f64; 2],
    pub monotone: bool,
}

/// Counting probabilities on `[u/N^{p−1}, v/N^{p−1}]` for the limit kernel.
///
/// For a kernel whose diagonal vanishes like `|u|^{2α}` the leading decay of
/// `P(≥ 1)` is `N^{(1−p)(1+2α)}`.
pub fn proba3_scaling<K: IntegralKernel + ?Sized>(
    k: &K,
    base_interval: [f64; 2],
    p: u32,
    n_grid: &[usize],
    n_nodes: usize,
) -> Result<Proba3Report> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!("p must be at least 2, got {p}")));
    }
    let mut at_least_one = Vec::with_capacity(n_grid.len());
    let mut by_count = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let s = (n as f64).powi(p as i32 - 1);
        let op = discretize(k, [base_interval[0] / s, base_interval[1] / s], n_nodes)?;
        let probs = counting_probabilities(&op, 2);
        // 1 − det(I − K) without cancellation: 1 − Π(1−λ) = −expm1(Σ ln(1−λ))
        let log_det: f64 = op.eigenvalues.iter().map(|l| (-l).ln_1p()).sum();
        at_least_one.push(-log_det.exp_m1());
        by_count.push([probs[0], probs[1], probs[2]]);
    }
    let logs: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let fit = |ys: Vec<f64>| least_squares_slope(&logs, &ys);
    let slope = fit(at_least_one.iter().map(|v| v.ln()).collect());
    let slope_by_count = [
        fit(by_count.iter().map(|v| v[1].ln()).collect()),
        fit(by_count.iter().map(|v| v[2].abs().ln()).collect()),
    ];
    let monotone = at_least_one.windows(2).all(|w| w[1] < w[0]);
    Ok(Proba3Report {
        p,
        base_interval,
        n_grid: n_grid.to_vec(),
        at_least_one,
        by_count,
        slope,
        slope_by_count,
        monotone,
    })
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
