//! Acceptance criteria 1–11, one line per criterion.
//!
//! Runs without the libtest harness so that every verdict is printed even
//! when it passes. The process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use opuc_fh::asymptotics::{
    bulk_index, edge_column_asym, edge_column_leading, phi_at_one_asym, phi_constant, phi_star_constant,
};
use opuc_fh::ensemble::{sample_mcmc, CountingAccumulator, DppSampler};
use opuc_fh::fredholm::{
    counting_probabilities, det_gamma, discretize, least_squares_slope, proba3_scaling,
};
use opuc_fh::limit_kernels::{CNormalization, Gauge, IntegralKernel, LimitKernel, RescaledExactKernel};
use opuc_fh::opuc::{build_pair, eval_poly, monic_values, CDKernelExact, Normalization, Which};
use opuc_fh::quadrature::singular_line_rule;
use opuc_fh::toeplitz::{dense_inverse_column, levinson_first_column, Column};
use opuc_fh::weights::{outer_factor, WeightSpec};
use opuc_fh::C64;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use statrs::function::gamma::gamma;

const OUTER_TERMS: usize = 64;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn smooth_c() -> Vec<C64> {
    vec![one(), C64::new(0.2, 0.1), C64::new(-0.05, 0.03)]
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

fn c01_solver_oracle() -> Verdict {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for alpha in [-0.4, -0.25, 0.1, 0.25, 0.4] {
        for c in [vec![one()], smooth_c()] {
            let w = WeightSpec::new(alpha, c).unwrap();
            for n in [8, 16, 32, 64] {
                let lev = levinson_first_column(&w, n).unwrap().first_col;
                let dense = dense_inverse_column(&w, n, Column::First).unwrap();
                let scale = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let err = lev.iter().zip(&dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
                worst = worst.max(err);
            }
        }
    }
    let dt = t0.elapsed();
    verdict(
        worst <= 1e-9 && within(dt, 10.0),
        format!("max relative error {worst:.2e} (limit 1e-9), {:.2} s", dt.as_secs_f64()),
    )
}

fn c02_edge_columns() -> Verdict {
    let t0 = Instant::now();
    let w = WeightSpec::pure(0.25).unwrap();
    let d = outer_factor(&w, OUTER_TERMS).unwrap();
    let ns = [512usize, 1024, 2048];
    let ks = [0usize, 1, 2, 4];
    let cols: Vec<Vec<C64>> = ns.iter().map(|&n| levinson_first_column(&w, n).unwrap().first_col).collect();
    let mut two = [[0.0; 4]; 3];
    let mut single = [[0.0; 4]; 3];
    for (i, &n) in ns.iter().enumerate() {
        for (j, &k) in ks.iter().enumerate() {
            two[i][j] = (cols[i][k] - edge_column_asym(&d, k, n).unwrap().value).norm();
            single[i][j] = (cols[i][k] - edge_column_leading(&d, k).unwrap()).norm();
        }
    }
    let mut orders = Vec::new();
    for i in 0..2 {
        for j in 0..4 {
            orders.push((two[i][j] / two[i + 1][j]).log2());
        }
    }
    let orders_ok = orders.iter().all(|o| (1.5..=2.5).contains(o));
    let dominated = (0..3).all(|i| (0..4).all(|j| single[i][j] > two[i][j]));
    let (lo, hi) = orders.iter().fold((f64::MAX, f64::MIN), |(a, b), &o| (a.min(o), b.max(o)));
    let dt = t0.elapsed();
    verdict(
        orders_ok && dominated && within(dt, 120.0),
        format!(
            "log2 error ratios in [{lo:.3}, {hi:.3}] (band [1.5, 2.5]); one-term error larger everywhere: {dominated}; {:.2} s",
            dt.as_secs_f64()
        ),
    )
}

fn c03_bulk_columns() -> Verdict {
    let t0 = Instant::now();
    let n = 4096usize;
    let mut worst = 0.0f64;
    for alpha in [0.25, -0.25] {
        let w = WeightSpec::pure(alpha).unwrap();
        let p = levinson_first_column(&w, n).unwrap();
        for x in [0.35, 0.5, 0.65] {
            let entry = p.first_col[bulk_index(x, n)].re;
            // c ≡ 1, so c₁(1) = 1
            let profile = x.powf(alpha - 1.0) * (1.0 - x).powf(alpha) / gamma(alpha);
            let ratio = entry * (n as f64).powf(1.0 - alpha) / profile;
            worst = worst.max((ratio - 1.0).abs());
        }
    }
    let dt = t0.elapsed();
    verdict(
        worst <= 0.02 && within(dt, 300.0),
        format!("max |ratio - 1| = {worst:.2e} (limit 0.02), {:.2} s", dt.as_secs_f64()),
    )
}

fn c04_values_at_one() -> Verdict {
    let alpha = 0.25;
    let w = WeightSpec::pure(alpha).unwrap();
    let p = levinson_first_column(&w, 640).unwrap();
    let (phi, _) = monic_values(&p.verblunsky, one(), 641);
    let scaled: Vec<f64> = (400..=640).step_by(6).map(|n| phi[n].re * (n as f64).powf(-alpha)).collect();
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let (lo, hi) = scaled.iter().fold((f64::MAX, f64::MIN), |(a, b), &s| (a.min(s), b.max(s)));
    let spread = (hi - lo) / mean;
    // B(α, α+1)/Γ(α)
    let beta_constant = gamma(alpha + 1.0) / gamma(2.0 * alpha + 1.0);
    let module = phi_at_one_asym(&outer_factor(&w, OUTER_TERMS).unwrap(), 1, 0, Normalization::Monic)
        .unwrap()
        .value
        .re;
    let gap = (mean / beta_constant - 1.0).abs();
    verdict(
        spread <= 5e-4 && gap <= 0.02 && (module - beta_constant).abs() < 1e-10,
        format!("relative spread {spread:.2e} (limit 5e-4), mean {mean:.6} vs Beta constant {beta_constant:.6}, gap {gap:.2e} (limit 0.02)"),
    )
}

fn c05_derivatives_at_one() -> Verdict {
    let n = 4096usize;
    let mut worst = 0.0f64;
    for alpha in [0.25, -0.25] {
        let w = WeightSpec::pure(alpha).unwrap();
        let p = levinson_first_column(&w, n).unwrap();
        let pair = build_pair(&p, &w, Normalization::Predictor).unwrap();
        for j in [1usize, 2] {
            let jf = j as f64;
            let exact = eval_poly(&pair, Which::PhiStar, j, one()).re / (n as f64).powf(alpha + jf);
            let target = gamma(alpha + jf) * gamma(alpha + 1.0) / (gamma(2.0 * alpha + jf + 1.0) * gamma(alpha));
            worst = worst.max((exact / target - 1.0).abs());
        }
    }
    verdict(worst <= 0.03, format!("max relative deviation {worst:.2e} (limit 0.03)"))
}

fn c06_beta_identities() -> Verdict {
    let t0 = Instant::now();
    let beta = |a: f64, b: f64| gamma(a) * gamma(b) / gamma(a + b);
    let mut worst = 0.0f64;
    // 20 exponents avoiding 0, three orders
    for i in 0..20 {
        let alpha = -0.475 + 0.05 * i as f64;
        for j in 0..3usize {
            let jf = j as f64;
            let s = phi_star_constant(alpha, j);
            let p = phi_constant(alpha, j);
            let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
            worst = worst
                .max(rel(s.integral, s.closed_form))
                .max(rel(p.integral, p.closed_form))
                .max(rel(s.closed_form, beta(alpha + jf, alpha + 1.0)))
                .max(rel(p.closed_form, beta(alpha, alpha + jf + 1.0)));
        }
    }
    let mut runner = TestRunner::new(PropConfig {
        cases: 60,
        failure_persistence: None,
        ..PropConfig::default()
    });
    let random = runner.run(&((-0.49f64..0.49), 0usize..3), |(alpha, j)| {
        if alpha.abs() < 1e-3 {
            return Ok(());
        }
        let s = phi_star_constant(alpha, j);
        let p = phi_constant(alpha, j);
        proptest::prop_assert!(s.difference() <= 1e-10 * s.closed_form.abs().max(1.0));
        proptest::prop_assert!(p.difference() <= 1e-10 * p.closed_form.abs().max(1.0));
        Ok(())
    });
    let dt = t0.elapsed();
    verdict(
        worst <= 1e-10 && random.is_ok() && within(dt, 1.0),
        format!(
            "grid max relative gap {worst:.2e} (limit 1e-10), random cases {}, {:.3} s",
            if random.is_ok() { "hold" } else { "fail" },
            dt.as_secs_f64()
        ),
    )
}

fn c07_kernel_limit() -> Verdict {
    let n = 2048usize;
    let mut worst = 0.0f64;
    for alpha in [0.25, -0.25] {
        let w = WeightSpec::pure(alpha).unwrap();
        let p = levinson_first_column(&w, n).unwrap();
        let exact = CDKernelExact::new(&p, &w);
        let rescaled = RescaledExactKernel::new(&exact);
        let limit = LimitKernel::new(alpha).unwrap();
        for (u, v) in [(1.0, 2.0), (0.5, 3.0)] {
            let ratio = rescaled.eval(u, v) / limit.eval(u, v).unwrap();
            worst = worst.max((ratio - 1.0).norm());
        }
    }
    verdict(worst <= 0.05, format!("max |K_N/(N K) - 1| = {worst:.2e} (limit 0.05)"))
}

/// `2π Σ_r φ_r(u) conj(φ_r(v))`, so that the operator is `Σ_r |φ_r⟩⟨φ_r|`.
struct Separable(Vec<Box<dyn Fn(f64) -> C64>>);

impl IntegralKernel for Separable {
    fn singular_power(&self) -> f64 {
        0.0
    }
    fn reduced(&self, u: f64, v: f64) -> C64 {
        self.0.iter().map(|f| f(u) * f(v).conj()).sum::<C64>() * (2.0 * PI)
    }
}

fn c08_fredholm() -> Verdict {
    let mut convergence = 0.0f64;
    for alpha in [0.25, -0.25] {
        let k = LimitKernel::new(alpha).unwrap();
        let d32 = det_gamma(&discretize(&k, [0.5, 3.0], 32).unwrap(), 1.0);
        let d64 = det_gamma(&discretize(&k, [0.5, 3.0], 64).unwrap(), 1.0);
        convergence = convergence.max((d32 - d64).abs());
    }

    // rank one: φ(u) = u e^{iu} on [0, 1], λ = 1/3
    let r1 = Separable(vec![Box::new(|u| C64::from_polar(u, u))]);
    let op1 = discretize(&r1, [0.0, 1.0], 16).unwrap();
    let l = 1.0 / 3.0;
    let mut synthetic = 0.0f64;
    for g in [0.5, 1.0, 2.0] {
        synthetic = synthetic.max((det_gamma(&op1, g) - (1.0 - g * l)).abs());
    }
    let p1 = counting_probabilities(&op1, 2);
    synthetic = synthetic.max((p1[0] - (1.0 - l)).abs()).max((p1[1] - l).abs()).max(p1[2].abs());

    // rank two: orthogonal φ₁ = a, φ₂ = b(u − 1/2) with eigenvalues a², b²/12
    let (l1, l2) = (0.3f64, 0.6f64);
    let (a, b) = (l1.sqrt(), (12.0 * l2).sqrt());
    let r2 = Separable(vec![
        Box::new(move |_| C64::new(a, 0.0)),
        Box::new(move |u| C64::new(0.0, b * (u - 0.5))),
    ]);
    let op2 = discretize(&r2, [0.0, 1.0], 16).unwrap();
    for g in [0.5, 1.0, 1.5] {
        synthetic = synthetic.max((det_gamma(&op2, g) - (1.0 - g * l1) * (1.0 - g * l2)).abs());
    }
    let p2 = counting_probabilities(&op2, 2);
    let expected = [(1.0 - l1) * (1.0 - l2), l1 * (1.0 - l2) + l2 * (1.0 - l1), l1 * l2];
    for m in 0..3 {
        synthetic = synthetic.max((p2[m] - expected[m]).abs());
    }

    let mut gauge = 0.0f64;
    for alpha in [0.25, -0.25] {
        let proof = LimitKernel::with_options(alpha, 1.0, Gauge::Proof, CNormalization::Universal).unwrap();
        let statement = proof.with_gauge(Gauge::Statement);
        for interval in [[0.5, 3.0], [-2.0, 1.5]] {
            let a = discretize(&proof, interval, 48).unwrap();
            let b = discretize(&statement, interval, 48).unwrap();
            for g in [0.5, 1.0] {
                gauge = gauge.max((a.det_direct(g) - b.det_direct(g)).norm());
            }
        }
    }
    verdict(
        convergence < 1e-8 && synthetic <= 1e-10 && gauge <= 1e-10,
        format!(
            "|det32 - det64| = {convergence:.2e} (limit 1e-8), synthetic error {synthetic:.2e}, gauge gap {gauge:.2e} (limits 1e-10)"
        ),
    )
}

fn c09_gap_probability() -> Verdict {
    let t0 = Instant::now();
    let alpha = 0.25;
    let n = 64usize;
    let interval = [0.5, 3.0];
    let w = WeightSpec::pure(alpha).unwrap();
    let k = LimitKernel::new(alpha).unwrap();
    let fredholm = counting_probabilities(&discretize(&k, interval, 64).unwrap(), 1);

    let nf = n as f64;
    let dpp = DppSampler::new(&w, n, 1024, &[interval[0] / nf, interval[1] / nf]).unwrap();
    let mut acc = CountingAccumulator::new(interval, 1).unwrap();
    for s in dpp.samples(9).take(20_000) {
        acc.add(&s);
    }
    let dpp_est = acc.finish();

    let mut acc = CountingAccumulator::new(interval, 1).unwrap();
    for s in sample_mcmc(&w, n, 100_000, 9).unwrap() {
        acc.add(&s);
    }
    let mcmc_est = acc.finish();

    let mut ok = true;
    let mut parts = Vec::new();
    for m in 0..2 {
        let (p, se) = (dpp_est.probability(m), dpp_est.std_error(m));
        let (q, sq) = (mcmc_est.probability(m), mcmc_est.std_error(m));
        let z_dpp = (p - fredholm[m]).abs() / se;
        let z_pair = (p - q).abs() / (se * se + sq * sq).sqrt();
        ok &= z_dpp <= 3.0 && (p - fredholm[m]).abs() <= 0.02 && z_pair <= 3.0;
        parts.push(format!(
            "P({m}): Fredholm {:.5}, DPP {p:.5}±{se:.5} ({z_dpp:.2}σ), MCMC {q:.5}±{sq:.5} ({z_pair:.2}σ apart)",
            fredholm[m]
        ));
    }
    let dt = t0.elapsed();
    ok &= within(dt, 1800.0);
    verdict(ok, format!("{}; {:.1} s", parts.join("; "), dt.as_secs_f64()))
}

fn c10_shrinking_intervals() -> Verdict {
    let alpha = 0.25;
    let interval = [0.5, 3.0];
    let w = WeightSpec::pure(alpha).unwrap();
    let ns = [16usize, 32, 64, 128];
    let mut hits = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        let mut acc = CountingAccumulator::new(interval, 2).unwrap();
        for s in sample_mcmc(&w, n, 400_000, 100 + i as u64).unwrap() {
            acc.add(&s);
        }
        hits.push(acc.finish().at_least(1));
    }
    let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let mc_slope = least_squares_slope(&logs, &hits.iter().map(|h| h.0.ln()).collect::<Vec<_>>());

    let k = LimitKernel::new(alpha).unwrap();
    let grid: Vec<usize> = (6..=12).map(|e| 1usize << e).collect();
    let analytic = proba3_scaling(&k, interval, 2, &grid, 64).unwrap();

    let mc_ok = (mc_slope + 1.0).abs() <= 0.3;
    let an_ok = (analytic.slope + 1.0).abs() <= 0.1;
    let estimates: Vec<String> = ns.iter().zip(&hits).map(|(n, (p, se))| format!("{n}:{p:.2e}±{se:.1e}")).collect();
    verdict(
        mc_ok && an_ok,
        format!(
            "Monte Carlo slope {mc_slope:.3} (band -1±0.3), analytic slope {:.3} (band -1±0.1); P(≥1) {}",
            analytic.slope,
            estimates.join(" ")
        ),
    )
}

fn c11_intensity() -> Verdict {
    let alpha = 0.25;
    let n = 64usize;
    let samples = 100_000usize;
    let w = WeightSpec::pure(alpha).unwrap();
    let k = LimitKernel::new(alpha).unwrap();
    let edges: Vec<f64> = (-4..=4).map(|e| e as f64).collect();
    let bins = edges.len() - 1;
    let mut sum = vec![0.0f64; bins];
    let mut sum_sq = vec![0.0f64; bins];
    for s in sample_mcmc(&w, n, samples, 11).unwrap() {
        let mut counts = vec![0.0f64; bins];
        for &t in &s.thetas {
            let u = t * n as f64;
            if u >= edges[0] && u < edges[bins] {
                counts[((u - edges[0]) as usize).min(bins - 1)] += 1.0;
            }
        }
        for b in 0..bins {
            sum[b] += counts[b];
            sum_sq[b] += counts[b] * counts[b];
        }
    }
    let m = samples as f64;
    let mut worst_z = 0.0f64;
    for b in 0..bins {
        let rule = singular_line_rule(edges[b], edges[b + 1], 40, 2.0 * alpha);
        let limit = rule.integrate(|u| k.reduced_diagonal(u)) / (2.0 * PI);
        let mean = sum[b] / m;
        let var = (sum_sq[b] / m - mean * mean) * m / (m - 1.0);
        worst_z = worst_z.max((mean - limit).abs() / (var / m).sqrt());
    }
    verdict(worst_z <= 3.0, format!("largest deviation {worst_z:.2}σ over {bins} bins (band 3σ)"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 11] = [
        (1, "solver oracle equivalence", c01_solver_oracle),
        (2, "edge columns, two-term order", c02_edge_columns),
        (3, "bulk columns", c03_bulk_columns),
        (4, "values at one, N^alpha sweep", c04_values_at_one),
        (5, "derivatives at one", c05_derivatives_at_one),
        (6, "Beta identities", c06_beta_identities),
        (7, "kernel limit", c07_kernel_limit),
        (8, "Fredholm machinery", c08_fredholm),
        (9, "gap probability end to end", c09_gap_probability),
        (10, "shrinking-interval decay", c10_shrinking_intervals),
        (11, "one-point intensity", c11_intensity),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let v = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!("criterion {id:>2} {}  {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
