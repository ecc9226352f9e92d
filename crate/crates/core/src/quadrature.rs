//! Gaussian quadrature rules built by the Golub–Welsch method, and composite
//! rules on the circle that absorb the `|θ|^p` singularity of the weight.

use std::f64::consts::PI;

use crate::special::gamma;

/// A set of nodes and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Gauss–Jacobi rule for `∫ₗₒʰⁱ (hi − x)^a (x − lo)^b g(x) dx`.
    pub fn gauss_jacobi(n: usize, a: f64, b: f64, lo: f64, hi: f64) -> Rule {
        let (t, w) = gauss_jacobi_reference(n, a, b);
        let half = 0.5 * (hi - lo);
        let scale = half.powf(a + b + 1.0);
        Rule {
            nodes: t.iter().map(|&t| lo + half * (t + 1.0)).collect(),
            weights: w.iter().map(|&w| w * scale).collect(),
        }
    }

    /// Gauss–Legendre rule on `[lo, hi]`.
    pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Rule {
        Rule::gauss_jacobi(n, 0.0, 0.0, lo, hi)
    }
}

/// Rule for `∫ₗₒʰⁱ |x|^p g(x) dx` with smooth `g`, using about `n` nodes.
///
/// Intervals containing the origin are split there, with Gauss–Jacobi panels
/// on each side. Intervals that approach the origin closely are graded
/// geometrically toward it.
pub fn singular_line_rule(lo: f64, hi: f64, n: usize, power: f64) -> Rule {
    assert!(lo <= hi);
    let mut out = Rule {
        nodes: Vec::new(),
        weights: Vec::new(),
    };
    if lo == hi || n == 0 {
        return out;
    }
    let mut push = |r: Rule| {
        out.nodes.extend(r.nodes);
        out.weights.extend(r.weights);
    };
    if power == 0.0 {
        push(Rule::gauss_legendre(n, lo, hi));
        return out;
    }
    if lo < 0.0 && hi > 0.0 {
        let n_left = ((n as f64 * -lo / (hi - lo)).round() as usize).clamp(n.min(8), n.saturating_sub(8).max(1));
        let left = singular_line_rule(lo, 0.0, n_left, power);
        let right = singular_line_rule(0.0, hi, n - n_left.min(n - 1), power);
        push(left);
        push(right);
        return out;
    }
    if lo == 0.0 {
        push(Rule::gauss_jacobi(n, 0.0, power, 0.0, hi));
        return out;
    }
    if hi == 0.0 {
        push(Rule::gauss_jacobi(n, power, 0.0, lo, 0.0));
        return out;
    }
    // one-signed interval away from 0: grade toward the nearer end
    let (near, far) = if lo > 0.0 { (lo, hi) } else { (-hi, -lo) };
    let mut cuts = vec![near];
    while cuts[cuts.len() - 1] * 2.0 < far && far - near > 4.0 * near {
        let next = cuts[cuts.len() - 1] * 2.0;
        cuts.push(next);
    }
    cuts.push(far);
    let panels = cuts.len() - 1;
    let q = (n / panels).max(8);
    let mut pieces: Vec<Rule> = cuts
        .windows(2)
        .map(|w| {
            let mut r = Rule::gauss_legendre(q, w[0], w[1]);
            for (wt, &x) in r.weights.iter_mut().zip(&r.nodes) {
                *wt *= x.abs().powf(power);
            }
            r
        })
        .collect();
    if lo < 0.0 {
        pieces.reverse();
        for r in &mut pieces {
            r.nodes.reverse();
            r.weights.reverse();
            for x in &mut r.nodes {
                *x = -*x;
            }
        }
    }
    for r in pieces {
        push(r);
    }
    out
}

/// Nodes and weights on `[−1, 1]` for the weight `(1 − t)^a (1 + t)^b`.
pub fn gauss_jacobi_reference(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    diag[0] = (b - a) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        diag[k] = (b * b - a * a) / (s * (s + 2.0));
        off[k - 1] = if k == 1 {
            (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt()
        } else {
            (4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
        };
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(ab + 2.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut z);
    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(z)
        .map(|(x, v)| (x, mu0 * v * v))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

/// Implicit QL iteration on a symmetric tridiagonal matrix.
///
/// On exit `diag` holds the eigenvalues and `z` the first components of the
/// matching normalized eigenvectors. `off[i]` couples rows `i` and `i + 1`.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], z: &mut [f64]) {
    let n = diag.len();
    if n > 0 {
        off[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "QL iteration failed to converge");
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
}

/// Composite rule on `(−π, π]` for integrals `∫ |θ|^p g(θ) dθ/2π` with a
/// smooth `g`.
///
/// Panels adjacent to `θ = 0` use Gauss–Jacobi rules carrying `|θ|^p`;
/// all other panels are Gauss–Legendre with the factor folded into the
/// weights. Breakpoints are always panel boundaries, so counting indicators
/// of intervals ending at breakpoints are integrated exactly.
#[derive(Debug, Clone)]
pub struct CircleRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub power: f64,
}

/// Layout parameters for [`CircleRule`].
#[derive(Debug, Clone)]
pub struct PanelLayout {
    pub nodes_per_panel: usize,
    pub max_width: f64,
    /// Number of dyadic refinement points `±π/2^j` toward the origin.
    pub refine_levels: usize,
    pub breakpoints: Vec<f64>,
}

impl PanelLayout {
    pub fn uniform(nodes_per_panel: usize, max_width: f64) -> Self {
        PanelLayout {
            nodes_per_panel,
            max_width,
            refine_levels: 0,
            breakpoints: Vec::new(),
        }
    }
}

impl CircleRule {
    pub fn new(power: f64, layout: &PanelLayout) -> CircleRule {
        assert!(power > -1.0, "singular power must exceed -1");
        let mut cuts: Vec<f64> = vec![-PI, 0.0, PI];
        for j in 1..=layout.refine_levels {
            let x = PI / 2f64.powi(j as i32);
            cuts.push(x);
            cuts.push(-x);
        }
        for &b in &layout.breakpoints {
            if b > -PI && b < PI {
                cuts.push(b);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

        let q = layout.nodes_per_panel;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let pieces = ((hi - lo) / layout.max_width).ceil().max(1.0) as usize;
            let step = (hi - lo) / pieces as f64;
            for p in 0..pieces {
                let a = lo + p as f64 * step;
                let b = if p + 1 == pieces { hi } else { a + step };
                let rule = if power != 0.0 && a == 0.0 {
                    Rule::gauss_jacobi(q, 0.0, power, a, b)
                } else if power != 0.0 && b == 0.0 {
                    Rule::gauss_jacobi(q, power, 0.0, a, b)
                } else {
                    let mut r = Rule::gauss_legendre(q, a, b);
                    for (w, &x) in r.weights.iter_mut().zip(&r.nodes) {
                        *w *= x.abs().powf(power);
                    }
                    r
                };
                nodes.extend(rule.nodes);
                weights.extend(rule.weights.into_iter().map(|w| w / (2.0 * PI)));
            }
        }
        CircleRule {
            nodes,
            weights,
            power,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
        F: Fn(f64) -> T,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }
}
