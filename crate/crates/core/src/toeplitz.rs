//! Exact finite-`N` Toeplitz computations: `T_N(f) = (f̂(i − j))_{0≤i,j≤N}`,
//! the first and last columns of its inverse by the Szegő (Levinson)
//! recursion, and a dense LU oracle.

use nalgebra::{DMatrix, DVector};

use crate::quadrature::{CircleRule, PanelLayout};
use crate::weights::{fourier_coefficients, TwoSided, WeightSpec};
use crate::{Error, Result, C64};

/// Largest size accepted by the dense oracle.
pub const DENSE_MAX_N: usize = 2048;
const DENSE_RESIDUAL_LIMIT: f64 = 1e-6;
const NORM_TOL: f64 = 1e-8;

/// `T_n(f)` of size `(n+1) × (n+1)`, stored through `f̂(−n..=n)`.
#[derive(Debug, Clone)]
pub struct ToeplitzSystem {
    pub n: usize,
    pub diag_coeffs: TwoSided,
}

impl ToeplitzSystem {
    pub fn new(w: &WeightSpec, n: usize) -> Self {
        ToeplitzSystem {
            n,
            diag_coeffs: fourier_coefficients(w, n),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.diag_coeffs.get(i as i64 - j as i64)
    }

    pub fn dense(&self) -> DMatrix<C64> {
        let m = self.n + 1;
        DMatrix::from_fn(m, m, |i, j| self.entry(i, j))
    }

    /// `T x` in `O(n²)`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n + 1);
        (0..=self.n)
            .map(|i| (0..=self.n).map(|j| self.entry(i, j) * x[j]).sum())
            .collect()
    }

    /// `‖T x − e_k‖_∞`.
    pub fn residual(&self, x: &[C64], k: usize) -> f64 {
        self.apply(x)
            .iter()
            .enumerate()
            .map(|(i, v)| (v - if i == k { 1.0 } else { 0.0 }).norm())
            .fold(0.0, f64::max)
    }
}

/// Exact first column of `T_n(f)^{−1}` together with the recursion data.
#[derive(Debug, Clone)]
pub struct PredictorColumn {
    pub n: usize,
    /// `(T_n^{−1})_{k+1,1}` for `k = 0..=n`.
    pub first_col: Vec<C64>,
    /// Verblunsky coefficients `γ_0..γ_{n−1}`.
    pub verblunsky: Vec<C64>,
    /// `(T_n^{−1})_{1,1}`.
    pub norm11: f64,
    /// `h_m = ‖Φ_m‖²` for `m = 0..=n`.
    pub norms: Vec<f64>,
    /// Coefficients of the monic `Φ_n`, constant term first.
    pub monic: Vec<C64>,
}

impl PredictorColumn {
    /// `h_n = 1/(T_n^{−1})_{1,1}`.
    pub fn h(&self) -> f64 {
        self.norms[self.n]
    }
}

/// Szegő recursion `Φ_{k+1} = zΦ_k − conj(γ_k) Φ_k*` in `O(n²)`.
pub fn levinson_first_column(w: &WeightSpec, n: usize) -> Result<PredictorColumn> {
    let f = fourier_coefficients(w, n + 1);
    levinson_from_coefficients(&f, n)
}

/// As [`levinson_first_column`] with precomputed `f̂`, `k_max ≥ n`.
pub fn levinson_from_coefficients(f: &TwoSided, n: usize) -> Result<PredictorColumn> {
    assert!(f.k_max() >= n, "need f̂ up to index {n}");
    let h0 = f.get(0).re;
    if !(h0 > 0.0) {
        return Err(Error::LevinsonBreakdown { step: 0, modulus: f64::NAN });
    }
    let mut a = Vec::with_capacity(n + 1);
    a.push(C64::new(1.0, 0.0));
    let mut h = h0;
    let mut norms = Vec::with_capacity(n + 1);
    norms.push(h);
    let mut verblunsky = Vec::with_capacity(n);
    let mut next = Vec::with_capacity(n + 1);
    for k in 0..n {
        let s: C64 = a
            .iter()
            .enumerate()
            .map(|(j, &aj)| aj * f.get(-(j as i64) - 1))
            .sum();
        let gbar = s / h;
        let modulus = gbar.norm();
        if !(modulus < 1.0) {
            return Err(Error::LevinsonBreakdown { step: k, modulus });
        }
        verblunsky.push(gbar.conj());
        // Φ_{k+1}[j] = Φ_k[j−1] − conj(γ) conj(Φ_k[k−j])
        next.clear();
        next.push(-gbar * a[k].conj());
        for j in 1..=k {
            next.push(a[j - 1] - gbar * a[k - j].conj());
        }
        next.push(a[k]);
        std::mem::swap(&mut a, &mut next);
        h *= 1.0 - modulus * modulus;
        norms.push(h);
    }
    let first_col = (0..=n).map(|k| a[n - k].conj() / h).collect();
    Ok(PredictorColumn {
        n,
        first_col,
        verblunsky,
        norm11: 1.0 / h,
        norms,
        monic: a,
    })
}

/// Which column of the inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    First,
    Last,
}

/// Column of `T_n(f)^{−1}` by dense pivoted LU. Refuses `n > 2048` and
/// solutions whose residual exceeds `1e−6`.
pub fn dense_inverse_column(w: &WeightSpec, n: usize, which: Column) -> Result<Vec<C64>> {
    if n > DENSE_MAX_N {
        return Err(Error::DenseOracle(format!("n = {n} exceeds the memory guard {DENSE_MAX_N}")));
    }
    let sys = ToeplitzSystem::new(w, n);
    let k = match which {
        Column::First => 0,
        Column::Last => n,
    };
    let mut rhs = DVector::<C64>::zeros(n + 1);
    rhs[k] = C64::new(1.0, 0.0);
    let x = sys
        .dense()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::DenseOracle("singular Toeplitz matrix".into()))?;
    let x: Vec<C64> = x.iter().copied().collect();
    let res = sys.residual(&x, k);
    if !(res <= DENSE_RESIDUAL_LIMIT) {
        return Err(Error::DenseOracle(format!("residual {res:.3e} above {DENSE_RESIDUAL_LIMIT:e}")));
    }
    Ok(x)
}

/// Last column of `T_n^{−1}`: the reversed conjugate of the first.
pub fn last_column_via_symmetry(p: &PredictorColumn) -> Vec<C64> {
    p.first_col.iter().rev().map(|z| z.conj()).collect()
}

/// Both determinations of `h_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormCheck {
    pub m: usize,
    /// `1/(T_m^{−1})_{1,1}`.
    pub from_column: f64,
    /// `∫ f |Φ_m|² dθ/2π` by Gauss–Jacobi panels.
    pub from_quadrature: f64,
}

impl NormCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.from_column - self.from_quadrature).abs() / self.from_column
    }
}

/// `h_m = ‖Φ_m‖²`, computed from the column and by quadrature; errors when
/// the two disagree beyond `1e−8` relative.
pub fn norm_h(w: &WeightSpec, m: usize) -> Result<f64> {
    let check = norm_h_check(w, m)?;
    if check.relative_gap() > NORM_TOL {
        return Err(Error::NormInconsistency {
            m,
            from_column: check.from_column,
            from_quadrature: check.from_quadrature,
        });
    }
    Ok(check.from_column)
}

pub fn norm_h_check(w: &WeightSpec, m: usize) -> Result<NormCheck> {
    let p = levinson_first_column(w, m)?;
    let from_quadrature = weighted_norm_sq(w, &p.monic);
    Ok(NormCheck {
        m,
        from_column: 1.0 / p.norm11,
        from_quadrature,
    })
}

/// Circle rule that integrates `f · |trigonometric polynomial of degree d|²`.
pub(crate) fn weight_rule(w: &WeightSpec, degree: usize) -> CircleRule {
    let freq = (2 * degree + w.degree() + 1) as f64;
    CircleRule::new(
        2.0 * w.alpha(),
        &PanelLayout {
            nodes_per_panel: 24,
            max_width: (12.0 / freq).min(0.5),
            refine_levels: 0,
            breakpoints: Vec::new(),
        },
    )
}

/// `∫ f |p|² dθ/2π` for a polynomial `p`.
pub(crate) fn weighted_norm_sq(w: &WeightSpec, coeffs: &[C64]) -> f64 {
    let rule = weight_rule(w, coeffs.len());
    rule.integrate(|t| {
        let z = C64::from_polar(1.0, t);
        w.regular_part(t) * crate::weights::horner(coeffs, z).norm_sqr()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bumpy(alpha: f64) -> WeightSpec {
        WeightSpec::new(alpha, vec![C64::new(1.0, 0.0), C64::new(0.3, 0.2), C64::new(-0.1, 0.05)]).unwrap()
    }

    fn max_rel(a: &[C64], b: &[C64]) -> f64 {
        let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        a.iter().zip(b).map(|(x, y)| (x - y).norm() / scale).fold(0.0, f64::max)
    }

    #[test]
    fn identity_for_flat_weight() {
        let p = levinson_first_column(&WeightSpec::pure(0.0).unwrap(), 10).unwrap();
        assert_eq!(p.first_col[0], C64::new(1.0, 0.0));
        assert!(p.first_col[1..].iter().all(|z| *z == C64::new(0.0, 0.0)));
        assert!(p.verblunsky.iter().all(|z| *z == C64::new(0.0, 0.0)));
        let last = last_column_via_symmetry(&p);
        assert_eq!(last[10], C64::new(1.0, 0.0));
        let d = dense_inverse_column(&WeightSpec::pure(0.0).unwrap(), 4, Column::First).unwrap();
        assert!((d[0] - 1.0).norm() < 1e-15 && d[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn levinson_matches_dense() {
        for (alpha, tol) in [(0.25, 1e-10), (-0.4, 1e-9)] {
            let w = WeightSpec::pure(alpha).unwrap();
            let p = levinson_first_column(&w, 32).unwrap();
            let d = dense_inverse_column(&w, 32, Column::First).unwrap();
            assert!(max_rel(&p.first_col, &d) < tol, "alpha {alpha}");
        }
    }

    #[test]
    fn dense_residual_and_persymmetry() {
        let w = bumpy(0.2);
        let sys = ToeplitzSystem::new(&w, 16);
        let first = dense_inverse_column(&w, 16, Column::First).unwrap();
        let last = dense_inverse_column(&w, 16, Column::Last).unwrap();
        assert!(sys.residual(&first, 0) < 1e-11);
        assert!(sys.residual(&last, 16) < 1e-11);
        let p = levinson_first_column(&w, 16).unwrap();
        let sym = last_column_via_symmetry(&p);
        assert!(max_rel(&sym, &last) < 1e-10);
        // Hermitian inverse: entry (N+1, 1) is the conjugate of (1, N+1)
        assert!((first[16] - last[0].conj()).norm() < 1e-13);
        let pq = levinson_first_column(&WeightSpec::pure(0.25).unwrap(), 16).unwrap();
        let dl = dense_inverse_column(&WeightSpec::pure(0.25).unwrap(), 16, Column::Last).unwrap();
        assert!(max_rel(&last_column_via_symmetry(&pq), &dl) < 1e-10);
    }

    #[test]
    fn verblunsky_from_next_polynomial() {
        let w = bumpy(-0.3);
        let n = 12;
        let next = dense_inverse_column(&w, n + 1, Column::First).unwrap();
        // monic Φ_{n+1}(0) = conj(first_col[n+1]) / norm11
        let phi0 = next[n + 1].conj() / next[0].re;
        let p1 = levinson_first_column(&w, n + 1).unwrap();
        assert!((p1.verblunsky[n] - (-phi0.conj())).norm() < 1e-10);
    }

    #[test]
    fn norms_agree_between_column_and_quadrature() {
        assert_eq!(norm_h(&WeightSpec::pure(0.0).unwrap(), 7).unwrap(), 1.0);
        let c = norm_h_check(&WeightSpec::pure(0.25).unwrap(), 8).unwrap();
        assert!(c.relative_gap() < 1e-8, "{c:?}");
        for alpha in [-0.4, 0.4] {
            let c = norm_h_check(&bumpy(alpha), 24).unwrap();
            assert!(c.relative_gap() < 1e-8, "{c:?}");
        }
    }

    #[test]
    fn norms_decrease() {
        let p = levinson_first_column(&bumpy(0.3), 40).unwrap();
        assert!(p.norms.windows(2).all(|w| w[1] < w[0]));
        assert!((p.h() * p.norm11 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dense_guard() {
        let w = WeightSpec::pure(0.1).unwrap();
        assert!(matches!(dense_inverse_column(&w, 4096, Column::First), Err(Error::DenseOracle(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn levinson_residual_is_small(alpha in -0.45f64..0.45, re in -0.3f64..0.3, im in -0.3f64..0.3, n in 1usize..80) {
            let w = WeightSpec::new(alpha, vec![C64::new(1.0, 0.0), C64::new(re, im)]).unwrap();
            let p = levinson_first_column(&w, n).unwrap();
            let sys = ToeplitzSystem::new(&w, n);
            prop_assert!(sys.residual(&p.first_col, 0) <= 1e-9 * p.norm11);
            prop_assert!(p.norm11 > 0.0);
            prop_assert!(p.verblunsky.iter().all(|g| g.norm() < 1.0));
        }
    }
}
