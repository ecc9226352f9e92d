//! Subcommand implementations. Each builds a [`Report`] from a validated
//! [`RunConfig`].

use serde_json::{json, Value};

use super::config::RunConfig;
use super::emit::{json_num, Cell, Report, Table};
use crate::asymptotics::{
    bulk_column_asym, bulk_index, edge_column_asym, estimated_order, far_edge_column_asym, phi_at_one_asym,
    phi_star_at_one_asym,
};
use crate::ensemble::{counting_statistics, CountingAccumulator, CountingEstimate, DppSampler, McmcConfig, McmcRun};
use crate::fredholm::{counting_probabilities, det_gamma, discretize};
use crate::limit_kernels::{CNormalization, Gauge, LimitKernel, RescaledExactKernel};
use crate::opuc::{build_pair, eval_poly, monic_values, CDKernelExact, Normalization, Which};
use crate::toeplitz::{dense_inverse_column, last_column_via_symmetry, levinson_first_column, Column};
use crate::weights::{outer_factor, WeightSpec};
use crate::{Error, Result, C64};

/// Exponents `d` of the tabulated appendix weights; the body's `α` is `−d`.
pub const APPENDIX_D: [f64; 5] = [-0.275, -0.150, -0.025, 0.100, 0.225];

/// Coefficients of the outer factor kept for the edge predictions.
const OUTER_TERMS: usize = 64;

pub fn columns(config: &RunConfig, n: usize, which: Column, check: bool) -> Result<Report> {
    let w = &config.weight;
    let p = levinson_first_column(w, n)?;
    let col = match which {
        Column::First => p.first_col.clone(),
        Column::Last => last_column_via_symmetry(&p),
    };
    let mut r = Report::new(config);
    r.meta("n", n);
    r.meta("column", column_name(which));
    r.meta("convention", "(T_n^-1)_{k+1,1}, k = 0..n");
    if check {
        r.field("dense_relative_gap", json_num(column_oracle_gap(w, n)?));
    }
    let mut t = Table::new("columns", &["k", "re", "im"]);
    for (k, z) in col.iter().enumerate() {
        t.push(vec![Cell::int(k), Cell::num(z.re), Cell::num(z.im)]);
    }
    r.tables.push(t);
    Ok(r)
}

fn column_name(c: Column) -> &'static str {
    match c {
        Column::First => "first",
        Column::Last => "last",
    }
}

/// Exact and predicted `Φ_N^{(j)}(1)`, `(Φ_N*)^{(j)}(1)` in every normalization.
pub fn phi(config: &RunConfig, n: usize, j_max: usize) -> Result<Report> {
    let w = &config.weight;
    let p = levinson_first_column(w, n)?;
    let d = outer_factor(w, OUTER_TERMS)?;
    let mut r = Report::new(config);
    r.meta("n", n);
    r.field("h_n", json_num(p.h()));
    let mut t = Table::new(
        "phi",
        &["normalization", "polynomial", "j", "re", "im", "predicted_re", "predicted_im"],
    );
    let one = C64::new(1.0, 0.0);
    for norm in [Normalization::Monic, Normalization::Predictor, Normalization::Raw] {
        let pair = build_pair(&p, w, norm)?;
        for (which, label) in [(Which::Phi, "phi"), (Which::PhiStar, "phi_star")] {
            for j in 0..=j_max {
                let exact = eval_poly(&pair, which, j, one);
                let pred = match which {
                    Which::Phi => phi_at_one_asym(&d, n, j, norm)?,
                    Which::PhiStar => phi_star_at_one_asym(&d, n, j, norm)?,
                };
                t.push(vec![
                    Cell::text(norm.name()),
                    Cell::text(label),
                    Cell::int(j),
                    Cell::num(exact.re),
                    Cell::num(exact.im),
                    Cell::num(pred.value.re),
                    Cell::num(pred.value.im),
                ]);
            }
        }
    }
    r.tables.push(t);
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Edge,
    FarEdge,
    Bulk,
    AtOne,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::Edge, Theorem::FarEdge, Theorem::Bulk, Theorem::AtOne];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Edge => "edge",
            Theorem::FarEdge => "far-edge",
            Theorem::Bulk => "bulk",
            Theorem::AtOne => "at-one",
        }
    }
}

/// One exact-versus-predicted comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckRow {
    pub n: usize,
    pub k_or_x: f64,
    pub quantity: &'static str,
    pub exact: C64,
    pub predicted: C64,
}

impl CheckRow {
    pub fn abs_err(&self) -> f64 {
        (self.exact - self.predicted).norm()
    }

    pub fn rel_err(&self) -> f64 {
        self.abs_err() / self.exact.norm()
    }
}

/// Exact entries against the asymptotic formulas for every `N` in `ns`.
pub fn theorem_rows(w: &WeightSpec, theorem: Theorem, ns: &[usize], normalization: Normalization) -> Result<Vec<CheckRow>> {
    let d = outer_factor(w, OUTER_TERMS)?;
    let one = C64::new(1.0, 0.0);
    let mut rows = Vec::new();
    for &n in ns {
        let p = levinson_first_column(w, n)?;
        match theorem {
            Theorem::Edge => {
                for k in [0usize, 1, 2, 4].into_iter().filter(|&k| k <= n) {
                    let pred = edge_column_asym(&d, k, n)?;
                    rows.push(CheckRow {
                        n,
                        k_or_x: k as f64,
                        quantity: "first_column",
                        exact: p.first_col[k],
                        predicted: pred.value,
                    });
                }
            }
            Theorem::FarEdge => {
                for k in [0usize, 1, 2, 4].into_iter().filter(|&k| k <= n) {
                    let pred = far_edge_column_asym(&d, k, n)?;
                    rows.push(CheckRow {
                        n,
                        k_or_x: k as f64,
                        quantity: "first_column_from_end",
                        exact: p.first_col[n - k],
                        predicted: pred.value,
                    });
                }
            }
            Theorem::Bulk => {
                for x in [0.35, 0.5, 0.65] {
                    let pred = bulk_column_asym(&d, x, n)?;
                    rows.push(CheckRow {
                        n,
                        k_or_x: x,
                        quantity: "first_column",
                        exact: p.first_col[bulk_index(x, n)],
                        predicted: pred.value,
                    });
                }
            }
            Theorem::AtOne => {
                let pair = build_pair(&p, w, normalization)?;
                for j in 0..=2usize {
                    rows.push(CheckRow {
                        n,
                        k_or_x: j as f64,
                        quantity: "phi",
                        exact: eval_poly(&pair, Which::Phi, j, one),
                        predicted: phi_at_one_asym(&d, n, j, normalization)?.value,
                    });
                    rows.push(CheckRow {
                        n,
                        k_or_x: j as f64,
                        quantity: "phi_star",
                        exact: eval_poly(&pair, Which::PhiStar, j, one),
                        predicted: phi_star_at_one_asym(&d, n, j, normalization)?.value,
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub fn verify_theorems(config: &RunConfig, theorems: &[Theorem], ns: &[usize], normalization: Normalization) -> Result<Report> {
    let mut r = Report::new(config);
    r.meta("normalization", normalization.name());
    r.meta("n_list", ns.to_vec());
    for &th in theorems {
        let rows = theorem_rows(&config.weight, th, ns, normalization)?;
        let mut t = Table::new(
            th.name(),
            &[
                "n",
                "k_or_x",
                "quantity",
                "exact_re",
                "exact_im",
                "predicted_re",
                "predicted_im",
                "abs_err",
                "rel_err",
                "estimated_order",
            ],
        );
        for row in &rows {
            // order from the matching row at 2N, when present
            let order = rows
                .iter()
                .find(|o| o.n == 2 * row.n && o.k_or_x == row.k_or_x && o.quantity == row.quantity)
                .map(|o| estimated_order(row.abs_err(), o.abs_err()));
            t.push(vec![
                Cell::int(row.n),
                Cell::num(row.k_or_x),
                Cell::text(row.quantity),
                Cell::num(row.exact.re),
                Cell::num(row.exact.im),
                Cell::num(row.predicted.re),
                Cell::num(row.predicted.im),
                Cell::num(row.abs_err()),
                Cell::num(row.rel_err()),
                Cell::opt(order),
            ]);
        }
        r.tables.push(t);
    }
    Ok(r)
}

pub struct KernelGrid {
    pub u_min: f64,
    pub u_max: f64,
    pub points: usize,
}

impl KernelGrid {
    /// `points` equispaced values in `[u_min, u_max]`, zero excluded.
    pub fn values(&self) -> Vec<f64> {
        let m = self.points.max(1);
        (0..m)
            .map(|i| {
                if m == 1 {
                    self.u_min
                } else {
                    self.u_min + (self.u_max - self.u_min) * i as f64 / (m - 1) as f64
                }
            })
            .filter(|&u| u != 0.0)
            .collect()
    }
}

pub fn kernel(
    config: &RunConfig,
    grid: &KernelGrid,
    gauge: Gauge,
    c_normalization: CNormalization,
    compare_n: Option<usize>,
) -> Result<Report> {
    let w = &config.weight;
    let c1sq = w.c_eval(0.0);
    let k = LimitKernel::with_options(w.alpha(), c1sq, gauge, c_normalization)?;
    let mut r = Report::new(config);
    r.meta("branch", k.branch.name());
    r.meta("gauge", gauge.name());
    r.meta("c_normalization", c_normalization.name());
    let exact = match compare_n {
        Some(n) => {
            let p = levinson_first_column(w, n)?;
            r.meta("compare_n", n);
            Some(CDKernelExact::new(&p, w))
        }
        None => None,
    };
    let rescaled = exact.as_ref().map(RescaledExactKernel::new);
    let mut cols = vec!["u", "v", "re", "im"];
    if rescaled.is_some() {
        cols.extend(["exact_re", "exact_im"]);
    }
    let mut t = Table::new("kernel", &cols);
    let us = grid.values();
    for &u in &us {
        for &v in &us {
            let kv = k.eval(u, v)?;
            let mut row = vec![Cell::num(u), Cell::num(v), Cell::num(kv.re), Cell::num(kv.im)];
            if let Some(e) = &rescaled {
                // the exact kernel is computed in the proof gauge
                let z = e.eval(u, v) * gauge_phase(gauge, u, v);
                row.push(Cell::num(z.re));
                row.push(Cell::num(z.im));
            }
            t.push(row);
        }
    }
    r.tables.push(t);
    Ok(r)
}

fn gauge_phase(gauge: Gauge, u: f64, v: f64) -> C64 {
    match gauge {
        Gauge::Proof => C64::new(1.0, 0.0),
        Gauge::Statement => C64::from_polar(1.0, 0.5 * (u - v)),
    }
}

pub fn gap(config: &RunConfig, interval: [f64; 2], m_max: usize, nodes: usize, gauge: Gauge) -> Result<Report> {
    let w = &config.weight;
    let k = LimitKernel::with_options(w.alpha(), w.c_eval(0.0), gauge, CNormalization::Universal)?;
    let op = discretize(&k, interval, nodes)?;
    let probs = counting_probabilities(&op, m_max);
    let mut r = Report::new(config);
    r.meta("gauge", gauge.name());
    r.meta("branch", k.branch.name());
    r.meta("nodes", op.len());
    r.meta("straddles_origin", op.straddles_origin);
    r.field("interval", vec![json_num(interval[0]), json_num(interval[1])]);
    r.field("alpha", json_num(w.alpha()));
    r.field("probabilities", probs.iter().map(|&p| json_num(p)).collect::<Vec<Value>>());
    r.field("trace", json_num(op.trace()));
    r.field("det", json_num(det_gamma(&op, 1.0)));
    let mut t = Table::new("gap", &["m", "probability"]);
    for (m, p) in probs.iter().enumerate() {
        t.push(vec![Cell::int(m), Cell::num(*p)]);
    }
    r.tables.push(t);
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mcmc,
    Dpp,
}

pub struct SampleSettings {
    pub n: usize,
    pub samples: usize,
    pub method: Method,
    pub interval: [f64; 2],
    pub scale: u32,
    pub grid: usize,
    pub chains: usize,
}

pub fn sample(config: &RunConfig, s: &SampleSettings) -> Result<Report> {
    let w = &config.weight;
    let mut r = Report::new(config);
    r.meta("n", s.n);
    r.meta("samples", s.samples);
    r.meta("scale", s.scale);
    let (estimate, diagnostics): (CountingEstimate, Value) = match s.method {
        Method::Mcmc => {
            let mut mc = McmcConfig::new(s.samples, config.seed);
            mc.chains = s.chains;
            let mut stream = McmcRun::new(w, s.n, &mc)?;
            let mut acc = CountingAccumulator::new(s.interval, s.scale)?;
            for x in stream.by_ref() {
                acc.add(&x);
            }
            let d = stream.diagnostics();
            let diag = json!({
                "method": "mcmc",
                "chains": d.chains,
                "acceptance_rate": json_num(d.acceptance_rate),
                "rotation_acceptance": json_num(d.rotation_acceptance),
                "local_step": json_num(d.local_step),
                "autocorrelation_time": json_num(d.autocorrelation_time),
                "autocorrelation_times": d.autocorrelation_times.iter().map(|&x| json_num(x)).collect::<Vec<_>>(),
                "thinning": d.thinning,
                "effective_sample_size": json_num(d.effective_sample_size),
                "sweeps": d.sweeps,
            });
            (acc.finish(), diag)
        }
        Method::Dpp => {
            let scale = (s.n as f64).powi(s.scale as i32);
            let cuts = [s.interval[0] / scale, s.interval[1] / scale];
            let sampler = DppSampler::new(w, s.n, s.grid, &cuts)?;
            let draws: Vec<_> = sampler.samples(config.seed).take(s.samples).collect();
            let diag = json!({
                "method": "dpp",
                "grid_nodes": sampler.nodes().len(),
                "gram_deviation": json_num(sampler.gram_deviation()),
            });
            (counting_statistics(&draws, s.interval, s.scale)?, diag)
        }
    };
    r.field("interval", vec![json_num(s.interval[0]), json_num(s.interval[1])]);
    r.field("counts", estimate.counts.clone());
    r.field(
        "probabilities",
        (0..estimate.counts.len()).map(|m| json_num(estimate.probability(m))).collect::<Vec<_>>(),
    );
    r.field("std_errors", estimate.std_errors.iter().map(|&x| json_num(x)).collect::<Vec<_>>());
    r.field("n_samples", estimate.n_samples);
    r.field("diagnostics", diagnostics);
    let mut t = Table::new("sample", &["m", "count", "probability", "std_error"]);
    for (m, &c) in estimate.counts.iter().enumerate() {
        t.push(vec![
            Cell::int(m),
            Cell::Int(c as i64),
            Cell::num(estimate.probability(m)),
            Cell::num(estimate.std_errors[m]),
        ]);
    }
    r.tables.push(t);
    Ok(r)
}

/// One line of an appendix table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixRow {
    pub d: f64,
    pub alpha: f64,
    pub n: usize,
    /// Exact monic `Φ_N(1)`.
    pub exact: f64,
    /// `A N^{−d}` with `A` fitted at the first `N`.
    pub predicted: f64,
    /// `|Φ_N(1) N^{−α} / A − 1|`.
    pub deviation: f64,
    /// Large-`N` constant `Γ(α+1)c₁(0) / (Γ(2α+1) conj c₁(1))` of the monic `Φ_N(1) N^{−α}`.
    pub theory_amplitude: f64,
    /// `|Φ_N(1) N^{−α} / A_th − 1|`, which decays like `1/N`.
    pub theory_deviation: f64,
}

/// `Φ_N(1)` for `N` in `n_range` (inclusive, stride `step`) and each `d`,
/// using the smooth factor `c` with `α = −d`.
pub fn run_appendix_tables(c: &[C64], ds: &[f64], n_range: [usize; 2], step: usize) -> Result<Vec<AppendixRow>> {
    let [lo, hi] = n_range;
    if step == 0 || lo == 0 || lo > hi {
        return Err(Error::InvalidArgument(format!("bad sweep {lo}..={hi} step {step}")));
    }
    let mut rows = Vec::new();
    for &d in ds {
        let alpha = 0.0 - d;
        let w = WeightSpec::new(alpha, c.to_vec())?;
        let p = levinson_first_column(&w, hi)?;
        let (phi, _) = monic_values(&p.verblunsky, C64::new(1.0, 0.0), hi + 1);
        let outer = outer_factor(&w, OUTER_TERMS)?;
        let theory = phi_at_one_asym(&outer, 1, 0, Normalization::Monic)?.value.re;
        let mut amplitude = None;
        for n in (lo..=hi).step_by(step) {
            let exact = phi[n].re;
            let scaled = exact * (n as f64).powf(-alpha);
            let a = *amplitude.get_or_insert(scaled);
            rows.push(AppendixRow {
                d,
                alpha,
                n,
                exact,
                predicted: a * (n as f64).powf(alpha),
                deviation: (scaled / a - 1.0).abs(),
                theory_amplitude: theory,
                theory_deviation: (scaled / theory - 1.0).abs(),
            });
        }
    }
    Ok(rows)
}

pub fn appendix(config: &RunConfig, ds: &[f64], n_range: [usize; 2], step: usize) -> Result<Report> {
    let rows = run_appendix_tables(config.weight.c_coefficients(), ds, n_range, step)?;
    let mut r = Report::new(config);
    r.meta("d_list", ds.to_vec());
    r.meta("n_range", n_range.to_vec());
    r.meta("step", step);
    r.meta("anchor", "A fitted at the first N of each sweep");
    let mut t = Table::new(
        "appendix",
        &[
            "d",
            "alpha",
            "n",
            "phi_n_1",
            "a_n_minus_d",
            "deviation",
            "a_theory",
            "theory_deviation",
        ],
    );
    for row in &rows {
        t.push(vec![
            Cell::num(row.d),
            Cell::num(row.alpha),
            Cell::int(row.n),
            Cell::num(row.exact),
            Cell::num(row.predicted),
            Cell::num(row.deviation),
            Cell::num(row.theory_amplitude),
            Cell::num(row.theory_deviation),
        ]);
    }
    r.tables.push(t);
    Ok(r)
}

/// Largest entry gap between the Levinson and LU first columns, relative
/// to the largest entry.
pub fn column_oracle_gap(w: &WeightSpec, n: usize) -> Result<f64> {
    let p = levinson_first_column(w, n)?;
    let dense = dense_inverse_column(w, n, Column::First)?;
    let scale = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(p.first_col
        .iter()
        .zip(&dense)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale)
}
