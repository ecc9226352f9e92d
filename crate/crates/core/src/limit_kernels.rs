//! Limit Christoffel–Darboux kernels near the Fisher–Hartwig point.
//!
//! With `ρ = ψ` for `α > 0` and `ρ(u) = ψ̃(α, −u)` for `α < 0`,
//!
//! ```text
//! K(u, v) = |u|^α |v|^α [ρ(−u)ρ(v) − ρ(u)ρ(−v)e^{i(v−u)}] / (Γ(α)² i(u − v))
//! ```
//!
//! is the limit of `K_N(e^{iu/N}, e^{iv/N}) / N` for the kernel normalized
//! against `dθ/2π`. Both branches share `ρ′ = iτ`.

use crate::opuc::CDKernelExact;
use crate::quadrature::Rule;
use crate::special::{beta_integral, gamma, subtracted_beta_integral};
use crate::{Error, Result, C64};

/// Gauss–Jacobi order for `ψ`, `τ` and `ψ̃`.
pub const JACOBI_NODES: usize = 64;
/// Below this separation the kernel is evaluated on the diagonal.
pub const COINCIDENCE: f64 = 1e-8;

fn check_alpha(alpha: f64) {
    assert!(alpha.abs() < 0.5, "alpha must lie in (-1/2, 1/2)");
}

/// `ψ(α, u) = ∫₀¹ x^{α−1}(1 − x)^α e^{iux} dx`, `0 < α < 1/2`.
pub fn psi(alpha: f64, u: f64) -> C64 {
    assert!(alpha > 0.0 && alpha < 0.5, "psi needs 0 < alpha < 1/2");
    let r = Rule::gauss_jacobi(JACOBI_NODES, alpha, alpha - 1.0, 0.0, 1.0);
    fourier_sum(&r, u)
}

/// `τ(α, u) = ∫₀¹ x^α (1 − x)^α e^{iux} dx`.
pub fn tau(alpha: f64, u: f64) -> C64 {
    check_alpha(alpha);
    let r = Rule::gauss_jacobi(JACOBI_NODES, alpha, alpha, 0.0, 1.0);
    fourier_sum(&r, u)
}

/// `ψ̃(α, u) = ∫₀¹ x^{α−1}((1 − x)^α e^{−iux} − 1) dx + 1/α`, `−1/2 < α < 0`.
pub fn psi_tilde(alpha: f64, u: f64) -> C64 {
    assert!(alpha < 0.0 && alpha > -0.5, "psi_tilde needs -1/2 < alpha < 0");
    let r = Rule::gauss_jacobi(JACOBI_NODES, alpha, alpha, 0.0, 1.0);
    subtracted_beta_integral(alpha, alpha) + oscillatory_part(&r, -u)
}

fn fourier_sum(r: &Rule, u: f64) -> C64 {
    r.nodes
        .iter()
        .zip(&r.weights)
        .map(|(&x, &w)| C64::from_polar(w, u * x))
        .sum()
}

/// `∫ x^α(1−x)^α (e^{iux} − 1)/x dx` with the Jacobi rule for `x^α(1−x)^α`.
fn oscillatory_part(r: &Rule, u: f64) -> C64 {
    r.nodes
        .iter()
        .zip(&r.weights)
        .map(|(&x, &w)| {
            let s = (0.5 * u * x).sin();
            C64::new(-2.0 * s * s, (u * x).sin()) * (w / x)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    PositiveAlpha,
    NegativeAlpha,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::PositiveAlpha => "positive_alpha",
            Branch::NegativeAlpha => "negative_alpha",
        }
    }
}

/// Diagonal phase convention. Gauges differ by `e^{iφ(u)} e^{−iφ(v)}` and give
/// identical Fredholm determinants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    /// `N(uv)^α K(u,v) / (i(u − v))` with the bracket as written above.
    Proof,
    /// The same kernel conjugated by `e^{iu/2}`, the form whose numerator is
    /// symmetric under `u ↔ −v`.
    Statement,
}

impl Gauge {
    pub fn name(self) -> &'static str {
        match self {
            Gauge::Proof => "proof",
            Gauge::Statement => "statement",
        }
    }

    fn phase(self, u: f64, v: f64) -> C64 {
        match self {
            Gauge::Proof => C64::new(1.0, 0.0),
            Gauge::Statement => C64::from_polar(1.0, 0.5 * (u - v)),
        }
    }
}

/// Which constant divides the kernel besides `Γ(α)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CNormalization {
    /// No further factor: the limit of the rescaled exact kernel for every `c`.
    Universal,
    /// Divide by `|c₁(1)|²`, as the closed forms are written.
    AsPrinted,
}

impl CNormalization {
    pub fn name(self) -> &'static str {
        match self {
            CNormalization::Universal => "universal",
            CNormalization::AsPrinted => "as_printed",
        }
    }
}

/// The limit kernel with its quadrature data precomputed.
#[derive(Debug, Clone)]
pub struct LimitKernel {
    pub alpha: f64,
    /// `|c₁(1)|² = c(1)`.
    pub c1_at_1_sq: f64,
    pub branch: Branch,
    pub gauge: Gauge,
    pub c_normalization: CNormalization,
    rho0: f64,
    prefactor: f64,
    rule_rho: Rule,
    rule_tau: Rule,
}

impl LimitKernel {
    /// Kernel for `c(1) = 1`, proof gauge.
    pub fn new(alpha: f64) -> Result<Self> {
        LimitKernel::with_options(alpha, 1.0, Gauge::Proof, CNormalization::Universal)
    }

    pub fn with_options(alpha: f64, c1_at_1_sq: f64, gauge: Gauge, c_normalization: CNormalization) -> Result<Self> {
        if !alpha.is_finite() || alpha.abs() >= 0.5 {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if alpha == 0.0 {
            return Err(Error::InvalidArgument("the limit kernel needs alpha != 0".into()));
        }
        if !(c1_at_1_sq > 0.0 && c1_at_1_sq.is_finite()) {
            return Err(Error::InvalidArgument(format!("c(1) must be positive, got {c1_at_1_sq}")));
        }
        let branch = if alpha > 0.0 { Branch::PositiveAlpha } else { Branch::NegativeAlpha };
        let rule_tau = Rule::gauss_jacobi(JACOBI_NODES, alpha, alpha, 0.0, 1.0);
        let (rho0, rule_rho) = match branch {
            Branch::PositiveAlpha => (0.0, Rule::gauss_jacobi(JACOBI_NODES, alpha, alpha - 1.0, 0.0, 1.0)),
            Branch::NegativeAlpha => (subtracted_beta_integral(alpha, alpha), rule_tau.clone()),
        };
        let c = match c_normalization {
            CNormalization::Universal => 1.0,
            CNormalization::AsPrinted => c1_at_1_sq,
        };
        Ok(LimitKernel {
            alpha,
            c1_at_1_sq,
            branch,
            gauge,
            c_normalization,
            rho0,
            prefactor: 1.0 / (gamma(alpha).powi(2) * c),
            rule_rho,
            rule_tau,
        })
    }

    pub fn with_gauge(&self, gauge: Gauge) -> Self {
        LimitKernel { gauge, ..self.clone() }
    }

    /// `ρ(u)`: `ψ(α, u)` or `ψ̃(α, −u)`.
    pub fn rho(&self, u: f64) -> C64 {
        match self.branch {
            Branch::PositiveAlpha => fourier_sum(&self.rule_rho, u),
            Branch::NegativeAlpha => self.rho0 + oscillatory_part(&self.rule_rho, u),
        }
    }

    pub fn tau(&self, u: f64) -> C64 {
        fourier_sum(&self.rule_tau, u)
    }

    /// `K(u, v) / (|u|^α |v|^α)`, finite at the origin.
    pub fn reduced(&self, u: f64, v: f64) -> C64 {
        if (u - v).abs() < COINCIDENCE {
            return C64::new(self.reduced_diagonal(u), 0.0);
        }
        let (ru, rv) = (self.rho(u), self.rho(v));
        let (rmu, rmv) = (self.rho(-u), self.rho(-v));
        let num = rmu * rv - ru * rmv * C64::from_polar(1.0, v - u);
        let den = C64::new(0.0, u - v);
        num / den * self.prefactor * self.gauge.phase(u, v)
    }

    /// `K(u, u) / |u|^{2α} = (|ρ(u)|² − 2 Re(ρ(u) τ(−u))) / Γ(α)²`.
    pub fn reduced_diagonal(&self, u: f64) -> f64 {
        let r = self.rho(u);
        let t = self.tau(-u);
        (r.norm_sqr() - 2.0 * (r * t).re) * self.prefactor
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<C64> {
        if u == 0.0 || v == 0.0 {
            return Err(Error::KernelAtOrigin { u, v });
        }
        Ok(self.reduced(u, v) * (u.abs() * v.abs()).powf(self.alpha))
    }

    pub fn diagonal(&self, u: f64) -> Result<f64> {
        if u == 0.0 {
            return Err(Error::KernelAtOrigin { u, v: u });
        }
        Ok(self.reduced_diagonal(u) * u.abs().powf(2.0 * self.alpha))
    }

    /// The statement's off-diagonal display taken literally, including its
    /// `1/e^{−iu}` prefactor. It equals `−e^{2iu}` times the proof-gauge
    /// kernel, which is not a diagonal gauge change; kept as a diagnostic.
    pub fn literal_statement(&self, u: f64, v: f64) -> Result<C64> {
        if u == 0.0 || v == 0.0 {
            return Err(Error::KernelAtOrigin { u, v });
        }
        let num = C64::from_polar(1.0, u) * self.rho(-u) * self.rho(v)
            - self.rho(u) * self.rho(-v) * C64::from_polar(1.0, v);
        let den = C64::new(0.0, v - u);
        let pre = C64::from_polar(1.0, u);
        Ok(pre * num / den * self.prefactor * (u.abs() * v.abs()).powf(self.alpha))
    }

    /// The two printed closed diagonals, reduced by `|u|^{2α}`:
    /// `|ρ|² − 2Re(ρ(u)τ(−u))` and `|ρ|² − 2Re(ρ(u)τ(u))`.
    pub fn printed_diagonals(&self, u: f64) -> [f64; 2] {
        let r = self.rho(u);
        [
            (r.norm_sqr() - 2.0 * (r * self.tau(-u)).re) * self.prefactor,
            (r.norm_sqr() - 2.0 * (r * self.tau(u)).re) * self.prefactor,
        ]
    }
}

/// `∫₀¹ x^{a−1}(1 − x)^b dx` by quadrature, re-exported for the `u = 0` checks.
pub fn psi_at_zero(alpha: f64) -> f64 {
    beta_integral(alpha, alpha)
}

/// A kernel on the line written as `|u|^{p/2} |v|^{p/2} R(u, v)`.
pub trait IntegralKernel {
    /// Power `p` of `|u|` carried by the diagonal.
    fn singular_power(&self) -> f64;
    /// The smooth factor `R(u, v)`.
    fn reduced(&self, u: f64, v: f64) -> C64;
}

impl IntegralKernel for LimitKernel {
    fn singular_power(&self) -> f64 {
        2.0 * self.alpha
    }

    fn reduced(&self, u: f64, v: f64) -> C64 {
        LimitKernel::reduced(self, u, v)
    }
}

/// `K_N(e^{iu/N^q}, e^{iv/N^q}) / N^q` on the line, the finite-`N` object
/// approximated by the limit kernel (`q = 1`).
#[derive(Debug, Clone)]
pub struct RescaledExactKernel<'a> {
    pub kernel: &'a CDKernelExact,
    pub scale: f64,
}

impl<'a> RescaledExactKernel<'a> {
    pub fn new(kernel: &'a CDKernelExact) -> Self {
        RescaledExactKernel {
            kernel,
            scale: kernel.n as f64,
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> C64 {
        self.kernel.eval(u / self.scale, v / self.scale) / self.scale
    }
}

impl IntegralKernel for RescaledExactKernel<'_> {
    fn singular_power(&self) -> f64 {
        2.0 * self.kernel.weight.alpha()
    }

    fn reduced(&self, u: f64, v: f64) -> C64 {
        let a = self.kernel.weight.alpha();
        let (tu, tv) = (u / self.scale, v / self.scale);
        // f(θ) = |θ|^{2α} r(θ); the |θ|^α parts are rescaled to |u|^α
        let w = &self.kernel.weight;
        let k = if (tu - tv).abs() < crate::opuc::COINCIDENCE {
            C64::new(self.kernel.diagonal(tu) / w.eval(tu), 0.0)
        } else {
            self.kernel.eval(tu, tv) / (w.eval(tu) * w.eval(tv)).sqrt()
        };
        k * (w.regular_part(tu) * w.regular_part(tv)).sqrt() * self.scale.powf(-2.0 * a) / self.scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::beta;
    use proptest::prelude::*;

    /// Composite midpoint sum of `∫₀¹ g(x) dx` for `g` with algebraic
    /// endpoint singularities `x^{p}` and `(1−x)^{q}`, after the substitutions
    /// `x = t^{1/(1+p)}` on `[0, 1/2]` and `1 − x = s^{1/(1+q)}` on `[1/2, 1]`.
    fn brute_force<G: Fn(f64) -> C64>(g: G, p: f64, q: f64, n: usize) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let ep = 1.0 / (1.0 + p);
        let eq = 1.0 / (1.0 + q);
        let tmax = 0.5f64.powf(1.0 + p);
        let smax = 0.5f64.powf(1.0 + q);
        for i in 0..n {
            let t = tmax * (i as f64 + 0.5) / n as f64;
            let x = t.powf(ep);
            acc += g(x) * (ep * t.powf(ep - 1.0) * tmax / n as f64);
            let s = smax * (i as f64 + 0.5) / n as f64;
            let y = s.powf(eq);
            acc += g(1.0 - y) * (eq * s.powf(eq - 1.0) * smax / n as f64);
        }
        acc
    }

    #[test]
    fn psi_at_zero_is_beta() {
        let v = psi(0.25, 0.0);
        assert!((v.re - beta(0.25, 1.25)).abs() < 1e-12);
        assert!((v.re - psi_at_zero(0.25)).abs() < 1e-12);
        assert!(v.im == 0.0);
    }

    #[test]
    fn psi_matches_brute_force() {
        let a = 0.25;
        let got = psi(a, 1.0);
        let g = |x: f64| C64::from_polar(x.powf(a - 1.0) * (1.0 - x).powf(a), x);
        let want = brute_force(g, a - 1.0, a, 500_000);
        assert!((got - want).norm() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn tau_values() {
        let t0 = tau(0.25, 0.0).re;
        let want = gamma(1.25).powi(2) / gamma(2.5);
        assert!((t0 - want).abs() < 1e-13);
        assert!((t0 - 0.618022).abs() < 5e-6, "{t0}");
        let a = 0.1;
        let got = tau(a, 2.0);
        let g = |x: f64| C64::from_polar((x * (1.0 - x)).powf(a), 2.0 * x);
        let bf = brute_force(g, a, a, 500_000);
        assert!((got - bf).norm() < 1e-8);
    }

    #[test]
    fn psi_tilde_values() {
        let a = -0.25;
        let v0 = psi_tilde(a, 0.0);
        let want = gamma(-0.25) * gamma(0.75) / gamma(0.5);
        assert!((v0.re - want).abs() < 1e-10 && v0.im.abs() < 1e-15);
        let got = psi_tilde(a, 1.0);
        let g = |x: f64| (C64::from_polar((1.0 - x).powf(a), -x) - 1.0) * x.powf(a - 1.0);
        let bf = brute_force(g, a, a, 500_000) + 1.0 / a;
        assert!((got - bf).norm() < 1e-8, "{got} vs {bf}");
    }

    #[test]
    fn negative_branch_rho_is_reflected_psi_tilde() {
        let k = LimitKernel::new(-0.3).unwrap();
        for u in [-2.0, 0.4, 3.0] {
            assert!((k.rho(u) - psi_tilde(-0.3, -u)).norm() < 1e-12);
        }
        let kp = LimitKernel::new(0.3).unwrap();
        assert!((kp.rho(1.7) - psi(0.3, 1.7)).norm() < 1e-14);
    }

    #[test]
    fn rho_derivative_is_i_tau() {
        for alpha in [0.25, -0.25] {
            let k = LimitKernel::new(alpha).unwrap();
            let (u, h) = (1.3, 1e-5);
            let d = (k.rho(u + h) - k.rho(u - h)) / (2.0 * h);
            assert!((d - C64::new(0.0, 1.0) * k.tau(u)).norm() < 1e-8);
        }
    }

    #[test]
    fn diagonal_is_limit_of_off_diagonal() {
        for alpha in [0.25, -0.25] {
            let k = LimitKernel::new(alpha).unwrap();
            let u = 1.4;
            // Richardson on h and h/2
            let f = |h: f64| k.eval(u, u + h).unwrap() * 0.5 + k.eval(u, u - h).unwrap() * 0.5;
            let h = 1e-3;
            let r = (f(h / 2.0) * 4.0 - f(h)) / 3.0;
            let d = k.diagonal(u).unwrap();
            assert!((r - d).norm() < 1e-6, "alpha {alpha}: {r} vs {d}");
            assert!(k.eval(u, u).unwrap().im.abs() < 1e-10);
        }
    }

    #[test]
    fn printed_diagonal_variants() {
        let k = LimitKernel::new(0.25).unwrap();
        let [first, second] = k.printed_diagonals(1.1);
        assert!((first - k.reduced_diagonal(1.1)).abs() < 1e-14);
        assert!((second - k.reduced_diagonal(1.1)).abs() > 1e-3);
    }

    #[test]
    fn origin_rejected() {
        let k = LimitKernel::new(0.25).unwrap();
        assert!(matches!(k.eval(0.0, 1.0), Err(Error::KernelAtOrigin { .. })));
        assert!(LimitKernel::new(0.0).is_err());
        assert!(LimitKernel::new(0.6).is_err());
    }

    #[test]
    fn literal_statement_is_not_a_gauge() {
        let k = LimitKernel::new(0.25).unwrap();
        let (u, v) = (0.8, 2.1);
        let lit = k.literal_statement(u, v).unwrap();
        let pf = k.eval(u, v).unwrap();
        let want = -C64::from_polar(1.0, 2.0 * u) * pf;
        assert!((lit - want).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn gauged_kernels_are_hermitian(alpha in -0.45f64..0.45, u in -4.0f64..4.0, v in -4.0f64..4.0) {
            prop_assume!(alpha.abs() > 0.01 && u.abs() > 1e-3 && v.abs() > 1e-3);
            for gauge in [Gauge::Proof, Gauge::Statement] {
                let k = LimitKernel::with_options(alpha, 1.0, gauge, CNormalization::Universal).unwrap();
                let a = k.eval(u, v).unwrap();
                let b = k.eval(v, u).unwrap();
                prop_assert!((a - b.conj()).norm() <= 1e-10 * a.norm().max(1.0));
            }
        }

        #[test]
        fn conjugation_symmetries(alpha in 0.01f64..0.45, u in -10.0f64..10.0) {
            prop_assert!((psi(alpha, -u) - psi(alpha, u).conj()).norm() < 1e-13);
            prop_assert!((tau(alpha, -u) - tau(alpha, u).conj()).norm() < 1e-13);
            prop_assert!((psi_tilde(-alpha, -u) - psi_tilde(-alpha, u).conj()).norm() < 1e-12);
        }
    }
}
