//! Special functions and endpoint-singular integration on `[0, 1]`.

use std::f64::consts::FRAC_PI_2;

/// Γ(x), including negative non-integer arguments (reflection).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Euler Beta function `Γ(a)Γ(b)/Γ(a+b)`, analytically continued to negative
/// non-integer arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 && a + b > 20.0 {
        let ln = statrs::function::gamma::ln_gamma;
        return (ln(a) + ln(b) - ln(a + b)).exp();
    }
    gamma(a) * gamma(b) / gamma(a + b)
}

/// First `n` Taylor coefficients of `(1 − z)^{−a}`, i.e. `(a)_k / k!`.
pub fn binomial_series(a: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut term = 1.0;
    for k in 0..n {
        out.push(term);
        term *= (k as f64 + a) / (k as f64 + 1.0);
    }
    out
}

/// `ln(1 - x)` given both `x` and `1 - x`, using whichever is accurate.
pub(crate) fn ln_complement(x: f64, one_minus_x: f64) -> f64 {
    if x < 0.5 {
        (-x).ln_1p()
    } else {
        one_minus_x.ln()
    }
}

/// Double-exponential (tanh–sinh) quadrature on `[0, 1]`.
///
/// The integrand receives `(x, 1 − x)` with both values computed without
/// cancellation, so algebraic singularities at either endpoint can be
/// evaluated to full relative precision.
pub fn tanh_sinh<F>(f: F, tol: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    // Node at t: x = 1/(1+e^{-2s}), 1-x = 1/(1+e^{2s}), s = (π/2) sinh t.
    let eval = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let (x, xc) = if s >= 0.0 {
            let e = (-2.0 * s).exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            let e = (2.0 * s).exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        if x <= 0.0 || xc <= 0.0 {
            return 0.0;
        }
        let ch = (s.abs()).min(700.0).cosh();
        let w = FRAC_PI_2 * t.cosh() / (2.0 * ch * ch);
        let v = f(x, xc) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let t_max = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 0..12 {
        h *= 0.5;
        let mut k = 1;
        let mut add = 0.0;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let next = sum * h;
        let done = (next - estimate).abs() <= tol * next.abs().max(1e-300);
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// `∫₀¹ x^{a−1} g(x, 1−x) dx` for `a > 0`.
///
/// The substitution `x = y^{1/a}` removes the singularity at the origin, so
/// `g` only needs to be integrable at `x = 1`.
pub fn power_weighted_integral<F>(a: f64, g: F, tol: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    assert!(a > 0.0, "power_weighted_integral needs a > 0, got {a}");
    let inner = |y: f64, yc: f64| -> f64 {
        let ly = ln_complement(yc, y);
        let x = (ly / a).exp();
        let xc = -(ly / a).exp_m1();
        g(x, xc)
    };
    tanh_sinh(inner, tol) / a
}

/// `∫₀¹ x^{a−1} (1 − x)^b dx` by direct quadrature (no Gamma functions).
pub fn beta_integral(a: f64, b: f64) -> f64 {
    power_weighted_integral(a, |_, xc| xc.powf(b), 1e-14)
}

/// `∫₀¹ x^{a−1} ((1 − x)^b − 1) dx + 1/a`, the endpoint-subtracted integral
/// that continues `B(a, b + 1)` to `−1 < a < 0`.
pub fn subtracted_beta_integral(a: f64, b: f64) -> f64 {
    assert!(a > -1.0 && a != 0.0);
    // x^{a-1}((1-x)^b - 1) = x^{(a+1)-1} * ((1-x)^b - 1)/x
    let g = |x: f64, xc: f64| -> f64 {
        let l = ln_complement(x, xc);
        (b * l).exp_m1() / x
    };
    power_weighted_integral(a + 1.0, g, 1e-14) + 1.0 / a
}
