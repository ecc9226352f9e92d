//! Large-`N` predictions for the inverse Toeplitz column and for `Φ_N`,
//! `Φ_N*` and their derivatives at `z = 1`.
//!
//! The column formulas carry the factor `β_0 = 1/c₁(0)`, which is `1` for
//! `c ≡ 1`. The values at `z = 1` are stated for the orthonormal
//! ([`Normalization::Predictor`]) polynomials; the other normalizations
//! rescale by `c₁(0)^{±1}`.

use crate::opuc::Normalization;
use crate::special::{beta, beta_integral, gamma, subtracted_beta_integral};
use crate::weights::OuterData;
use crate::{Error, Result, C64};

/// Agreement required between the integral and Gamma forms of a constant.
pub const CLOSED_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    EdgeLowK,
    EdgeHighK,
    Bulk,
    AtOne,
    DerivativeAtOne,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::EdgeLowK => "edge_low_k",
            Regime::EdgeHighK => "edge_high_k",
            Regime::Bulk => "bulk",
            Regime::AtOne => "at_one",
            Regime::DerivativeAtOne => "derivative_at_one",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPrediction {
    pub value: C64,
    /// Exponent of `N` in the remainder, when one is stated.
    pub order_exponent: Option<f64>,
    pub regime: Regime,
}

/// Two evaluations of the same constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantForms {
    pub integral: f64,
    pub closed_form: f64,
}

impl ConstantForms {
    pub fn difference(&self) -> f64 {
        (self.integral - self.closed_form).abs()
    }

    fn checked(self) -> Result<f64> {
        if self.difference() > CLOSED_FORM_TOL * self.closed_form.abs().max(1.0) {
            return Err(Error::ClosedFormMismatch {
                integral: self.integral,
                closed_form: self.closed_form,
            });
        }
        Ok(self.closed_form)
    }
}

fn beta0(d: &OuterData) -> C64 {
    d.beta_sequence(0)[0]
}

fn seq(d: &OuterData, shift: usize, k: usize) -> Result<C64> {
    d.beta(shift, k)
}

/// `(T_N^{−1})_{k+1,1} ≈ β_0 (β_k^{(α)} − (α²/N) β_k^{(α+1)})`, remainder `O(k^{α+1}/N²)`.
pub fn edge_column_asym(d: &OuterData, k: usize, n: usize) -> Result<AsymptoticPrediction> {
    let a = d.alpha;
    let value = beta0(d) * (seq(d, 0, k)? - seq(d, 1, k)? * (a * a / n as f64));
    Ok(AsymptoticPrediction {
        value,
        order_exponent: Some(-2.0),
        regime: Regime::EdgeLowK,
    })
}

/// One-term version `β_0 β_k^{(α)}`.
pub fn edge_column_leading(d: &OuterData, k: usize) -> Result<C64> {
    Ok(beta0(d) * seq(d, 0, k)?)
}

/// `(T_N^{−1})_{N+1−k,1} ≈ β_0 · conj((c₁(1)/conj c₁(1)) β_k^{(α+1)}) · α/N`, remainder `o(1/N)`.
///
/// For real even `c` the conjugation is immaterial.
pub fn far_edge_column_asym(d: &OuterData, k: usize, n: usize) -> Result<AsymptoticPrediction> {
    let phase = d.c1_at_1 / d.c1_at_1.conj();
    let value = beta0(d) * (phase * seq(d, 1, k)?).conj() * (d.alpha / n as f64);
    Ok(AsymptoticPrediction {
        value,
        order_exponent: Some(-1.0),
        regime: Regime::EdgeHighK,
    })
}

/// `K_α(x) = x^{α−1}(1 − x)^α / Γ(α)`.
pub fn bulk_profile(alpha: f64, x: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    x.powf(alpha - 1.0) * (1.0 - x).powf(alpha) / gamma(alpha)
}

/// `(T_N^{−1})_{⌊xN⌉+1,1} ≈ β_0 K_α(x) N^{α−1} / c₁(1)` for `0 < x < 1`.
pub fn bulk_column_asym(d: &OuterData, x: f64, n: usize) -> Result<AsymptoticPrediction> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidArgument(format!("bulk position must lie in (0, 1), got {x}")));
    }
    let value = beta0(d) * bulk_profile(d.alpha, x) * (n as f64).powf(d.alpha - 1.0) / d.c1_at_1;
    Ok(AsymptoticPrediction {
        value,
        order_exponent: None,
        regime: Regime::Bulk,
    })
}

/// Bulk column index for position `x`.
pub fn bulk_index(x: f64, n: usize) -> usize {
    (x * n as f64).round() as usize
}

/// `Φ_N(z) = Σ β̃_u z^u` with `Φ_N` the starred raw column:
/// `β̃_{N−k} ≈ conj(β_0(β_k^{(α)} − (α²/N) β_k^{(α+1)}))`.
pub fn corollary_tail_asym(d: &OuterData, k: usize, n: usize) -> Result<AsymptoticPrediction> {
    let mut p = edge_column_asym(d, k, n)?;
    p.value = p.value.conj();
    Ok(p)
}

/// Constant of `(Φ_N*)^{(j)}(1)`: `∫₀¹ x^{α+j−1}(1−x)^α dx` (endpoint-subtracted
/// for `α < 0`, `j = 0`) against `Γ(α+j)Γ(α+1)/Γ(2α+j+1)`.
pub fn phi_star_constant(alpha: f64, j: usize) -> ConstantForms {
    let jf = j as f64;
    let integral = if j == 0 && alpha < 0.0 {
        subtracted_beta_integral(alpha, alpha)
    } else {
        beta_integral(alpha + jf, alpha)
    };
    ConstantForms {
        integral,
        closed_form: beta(alpha + jf, alpha + 1.0),
    }
}

/// Constant of `Φ_N^{(j)}(1)`: `∫₀¹ x^{α−1}(1−x)^{α+j} dx` (endpoint-subtracted
/// for `α < 0`) against `Γ(α)Γ(α+j+1)/Γ(2α+j+1)`.
pub fn phi_constant(alpha: f64, j: usize) -> ConstantForms {
    let jf = j as f64;
    let integral = if alpha < 0.0 {
        subtracted_beta_integral(alpha, alpha + jf)
    } else {
        beta_integral(alpha, alpha + jf)
    };
    ConstantForms {
        integral,
        closed_form: beta(alpha, alpha + jf + 1.0),
    }
}

/// For `α < 0`, `j = 0`: the endpoint-subtracted integral against the Gamma
/// form continued from `α > 0`. Their difference is reported, not assumed.
pub fn negative_branch_tension(alpha: f64) -> Option<ConstantForms> {
    (alpha < 0.0).then(|| phi_star_constant(alpha, 0))
}

/// `B(α+j, α+1)/Γ(α) = Γ(α+1) (α)_j / Γ(2α+j+1)`, regular at `α = 0`.
fn star_ratio(alpha: f64, j: usize) -> f64 {
    let rising: f64 = (0..j).map(|r| alpha + r as f64).product();
    gamma(alpha + 1.0) * rising / gamma(2.0 * alpha + j as f64 + 1.0)
}

/// `B(α, α+j+1)/Γ(α) = Γ(α+j+1)/Γ(2α+j+1)`.
fn phi_ratio(alpha: f64, j: usize) -> f64 {
    gamma(alpha + j as f64 + 1.0) / gamma(2.0 * alpha + j as f64 + 1.0)
}

fn normalization_scale(d: &OuterData, normalization: Normalization) -> f64 {
    match normalization {
        Normalization::Predictor => 1.0,
        Normalization::Monic => d.c1_at_0(),
        Normalization::Raw => 1.0 / d.c1_at_0(),
    }
}

fn regime_for(j: usize) -> Regime {
    if j == 0 {
        Regime::AtOne
    } else {
        Regime::DerivativeAtOne
    }
}

/// `(Φ_N*)^{(j)}(1) ≈ N^{α+j} Γ(α+j)Γ(α+1) / (Γ(2α+j+1) Γ(α) c₁(1))`.
///
/// The integral and Gamma forms of the constant must agree to `1e−10`.
pub fn phi_star_at_one_asym(
    d: &OuterData,
    n: usize,
    j: usize,
    normalization: Normalization,
) -> Result<AsymptoticPrediction> {
    let a = d.alpha;
    if a != 0.0 {
        phi_star_constant(a, j).checked()?;
    }
    let scale = normalization_scale(d, normalization) * (n as f64).powf(a + j as f64);
    Ok(AsymptoticPrediction {
        value: C64::new(star_ratio(a, j) * scale, 0.0) / d.c1_at_1,
        order_exponent: None,
        regime: regime_for(j),
    })
}

/// `Φ_N^{(j)}(1) ≈ N^{α+j} Γ(α+j+1) / (Γ(2α+j+1) conj(c₁(1)))`.
pub fn phi_at_one_asym(
    d: &OuterData,
    n: usize,
    j: usize,
    normalization: Normalization,
) -> Result<AsymptoticPrediction> {
    let a = d.alpha;
    if a != 0.0 {
        phi_constant(a, j).checked()?;
    }
    let scale = normalization_scale(d, normalization) * (n as f64).powf(a + j as f64);
    Ok(AsymptoticPrediction {
        value: C64::new(phi_ratio(a, j) * scale, 0.0) / d.c1_at_1.conj(),
        order_exponent: None,
        regime: regime_for(j),
    })
}

/// Exact `Φ_N(1)` for `c ≡ 1` (monic):
/// `Γ(N+2α+1)Γ(α+1) / (Γ(2α+1)Γ(N+α+1))`.
pub fn pure_phi_at_one(alpha: f64, n: usize) -> f64 {
    let ln = statrs::function::gamma::ln_gamma;
    let nf = n as f64;
    (ln(nf + 2.0 * alpha + 1.0) - ln(nf + alpha + 1.0)).exp() * gamma(alpha + 1.0) / gamma(2.0 * alpha + 1.0)
}

/// `log₂(err(N)/err(2N))`.
pub fn estimated_order(err_n: f64, err_2n: f64) -> f64 {
    (err_n / err_2n).log2()
}
