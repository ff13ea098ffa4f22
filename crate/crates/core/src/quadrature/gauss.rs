use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on [-1, 1].
pub(crate) struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn legendre_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    Rule { nodes, weights }
}

pub(crate) fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(ORDER))
}

/// Accumulated panel values of one integral.
#[derive(Debug, Default, Clone)]
pub(crate) struct Panels {
    pub values: Vec<Complex64>,
    pub error: f64,
    pub l1: f64,
    pub nodes: usize,
}

impl Panels {
    pub fn push(&mut self, value: Complex64, error: f64) {
        self.values.push(value);
        self.error += error;
    }

    pub fn append(&mut self, other: Panels) {
        self.values.extend(other.values);
        self.error += other.error;
        self.l1 += other.l1;
        self.nodes += other.nodes;
    }

    pub fn total(&self) -> Complex64 {
        pairwise(&self.values)
    }
}

/// Pairwise summation in fixed order.
pub(crate) fn pairwise(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise(&v[..n / 2]) + pairwise(&v[n / 2..]),
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_depth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-13, abs: 1e-300, max_depth: 40 }
    }
}

pub(crate) type Integrand<'a> = dyn FnMut(f64) -> Result<Complex64> + 'a;

/// One fixed-order panel on [a, b]; returns value and L1 mass.
pub(crate) fn panel(h: &mut Integrand<'_>, a: f64, b: f64, nodes: &mut usize) -> Result<(Complex64, f64)> {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        let t = mid + half * x;
        let v = h(t)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(Complex64::new(t, 0.0)));
        }
        sum += *w * v;
        l1 += w * v.norm();
    }
    *nodes += ORDER;
    Ok((sum * half, l1 * half.abs()))
}

/// Adaptive bisection of [a, b] until halving changes the panel by less than the tolerance.
pub(crate) fn adaptive(h: &mut Integrand<'_>, a: f64, b: f64, tol: Tolerance, acc: &mut Panels) -> Result<()> {
    let mut nodes = 0;
    let whole = panel(h, a, b, &mut nodes)?;
    acc.nodes += nodes;
    let budget = acc.nodes + MAX_NODES;
    refine(h, a, b, whole, f64::INFINITY, 0, tol, budget, acc)
}

// Per adaptive call; the remaining differences stay in the error estimate.
const MAX_NODES: usize = 400_000;

fn refine(
    h: &mut Integrand<'_>,
    a: f64,
    b: f64,
    whole: (Complex64, f64),
    parent_diff: f64,
    depth: u32,
    tol: Tolerance,
    budget: usize,
    acc: &mut Panels,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let mut nodes = 0;
    let left = panel(h, a, m, &mut nodes)?;
    let right = panel(h, m, b, &mut nodes)?;
    acc.nodes += nodes;
    let sum = left.0 + right.0;
    let l1 = left.1 + right.1;
    let diff = (whole.0 - sum).norm();
    let converged = diff <= tol.abs.max(tol.rel * l1);
    // smooth integrands shrink the difference by orders of magnitude per halving;
    // a small difference that stays put is noise in the integrand; a large one
    // is an unresolved feature such as a nearby pole
    let stalled = depth >= 6 && diff > 0.5 * parent_diff && diff <= 1e-6 * l1;
    if converged || stalled || depth >= tol.max_depth || m == a || m == b || acc.nodes >= budget {
        acc.push(sum, diff);
        acc.l1 += l1;
        return Ok(());
    }
    refine(h, a, m, left, diff, depth + 1, tol, budget, acc)?;
    refine(h, m, b, right, diff, depth + 1, tol, budget, acc)
}
