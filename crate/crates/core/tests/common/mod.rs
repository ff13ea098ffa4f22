//! Integrands with independently known values, shared by several test targets.
#![allow(dead_code)]

use std::f64::consts::PI;

use resum::complexfn::{BranchedFunction, Cut};
use resum::kernels::{exp_sqrt_growth_coefficient, KernelId};
use resum::quadrature::*;
use resum::{Complex64, Result};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub struct Case {
    pub name: String,
    pub result: Result<QuadratureResult>,
    pub truth: Complex64,
}

impl Case {
    fn new(name: impl Into<String>, result: Result<QuadratureResult>, truth: Complex64) -> Self {
        Case { name: name.into(), result, truth }
    }

    /// `Some(ratio)` of the actual error to the reported estimate.
    pub fn ratio(&self) -> Option<f64> {
        let r = self.result.as_ref().ok()?;
        let e = (r.value - self.truth).norm();
        Some(if e == 0.0 { 0.0 } else { e / r.error_estimate })
    }
}

fn neg_cut() -> Cut {
    Cut::new(c(0.0, 0.0), c(-1.0, 0.0)).unwrap()
}

fn pos(src: &str) -> BranchedFunction {
    BranchedFunction::parse(src, Cut::positive_real()).unwrap()
}

fn neg(src: &str) -> BranchedFunction {
    BranchedFunction::parse(src, neg_cut()).unwrap()
}

/// Twelve elementary integrals across every quadrature entry point.
pub fn quadrature_suite() -> Vec<Case> {
    let lc = LoopContour::default();
    let two_pi_i = c(0.0, 2.0 * PI);
    vec![
        Case::new("laplace 1 at 3", laplace_integral(&neg("1"), c(3.0, 0.0)), c(1.0 / 3.0, 0.0)),
        Case::new("laplace 1/sqrt(pi p) at 4", laplace_integral(&neg("1/sqrt(p*pi)"), c(4.0, 0.0)), c(0.5, 0.0)),
        Case::new("laplace p e^-p at 1", laplace_integral(&neg("exp(-p)*p"), c(1.0, 0.0)), c(0.25, 0.0)),
        Case::new("laplace e^{ip} at 1", laplace_integral(&neg("exp(1i*p)"), c(1.0, 0.0)), c(0.5, 0.5)),
        Case::new(
            "loop sqrt",
            loop_integral(&pos("exp(-p)/(2*sqrt_slit(pi*p))"), &lc, TailDecay::Exponential(1.0)),
            c(1.0, 0.0),
        ),
        // 1/p edges only cancel to O(epsilon / T), so the tail bound is loose
        Case::new(
            "loop pole",
            loop_integral(&pos("1/(p-0.5)"), &LoopContour { tolerance: 1e-2, ..lc }, TailDecay::Algebraic(2.0)),
            -two_pi_i,
        ),
        Case::new("loop log", loop_integral(&pos("ln_slit(p)*exp(-p)"), &lc, TailDecay::Exponential(1.0)), -two_pi_i),
        Case::new("circle exp n=3", circle_coeff_integral(|z| Ok(z.exp()), 3, 1.0, None), c(1.0 / 6.0, 0.0)),
        Case::new("circle geometric n=7", circle_coeff_integral(|z| Ok(1.0 / (1.0 - z)), 7, 0.5, Some(1.0)), c(1.0, 0.0)),
        Case::new(
            "half line e^-t/sqrt t",
            half_line_integral(|t| Ok(c((-t).exp() / t.sqrt(), 0.0)), HalfLine::new(1.0, TailDecay::Exponential(1.0))),
            c(PI.sqrt(), 0.0),
        ),
        Case::new(
            "C1 e^-p/p",
            bent_path_integral(
                |p, _| Ok((-p).exp() / p),
                &BentPath { start: PathStart::Infinity, ..BentPath::c1() },
                TailDecay::Exponential(1.0),
            ),
            -two_pi_i,
        ),
        Case::new(
            "C e^-p/sqrt p",
            contour_c_integral(&neg("exp(-p)/sqrt(p)"), &BentPath::c(false), TailDecay::Exponential(1.0)),
            c(PI.sqrt(), 0.0),
        ),
    ]
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// Coefficients generated by every built-in kernel, k = 1..=kmax.
pub fn kernel_suite(kmax: u32) -> Vec<Case> {
    type Truth = Box<dyn Fn(f64) -> f64>;
    let seqs: Vec<(&str, Truth)> = vec![
        ("power_law:0.5", Box::new(|k| 1.0 / k.sqrt())),
        ("power_law:1.5", Box::new(|k| k.powf(-1.5))),
        ("exp_sqrt:1.5", Box::new(|k| (-1.5 * k.sqrt()).exp())),
        ("f2", Box::new(|k| 1.0 / (k.powf(PI) + k.ln()))),
        // k! / k^{k+1} e^{-k}, as a product to stay in range
        ("stirling_g", Box::new(|k| (1..=k as u32).map(|j| j as f64 / k * 1f64.exp()).product::<f64>() / k)),
        ("recip_gamma", Box::new(|k| 1.0 / factorial(k as u32 - 1))),
    ];
    let mut out = Vec::new();
    for (name, truth) in &seqs {
        let kernel = KernelId::from_name(name).unwrap();
        for k in 1..=kmax {
            let kf = k as f64;
            out.push(Case::new(format!("{name} k={k}"), kernel.coefficient(c(kf, 0.0)), c(truth(kf), 0.0)));
        }
    }
    for k in 1..=kmax {
        let kf = k as f64;
        out.push(Case::new(format!("exp_sqrt growth k={k}"), exp_sqrt_growth_coefficient(kf), c(kf.sqrt().exp(), 0.0)));
    }
    out
}

/// sum z^k / sqrt(k), |z| < 1
pub fn f1_direct(z: Complex64) -> Complex64 {
    let mut s = c(0.0, 0.0);
    let mut zk = z;
    for k in 1..5000 {
        s += zk / (k as f64).sqrt();
        zk *= z;
        if zk.norm() < 1e-20 {
            break;
        }
    }
    s
}

/// sum (-x)^k / sqrt(k) = -(2/sqrt(pi)) * integral_0^inf du / (e^{u^2}/x + 1).
/// The integrand is even and analytic, so the trapezoid rule converges geometrically.
pub fn f1_negative_oracle(x: f64) -> f64 {
    let h = 0.01;
    let g = |u: f64| 1.0 / ((u * u - x.ln()).exp() + 1.0);
    let mut s = 0.5 * g(0.0);
    let mut i = 1;
    loop {
        let v = g(i as f64 * h);
        s += v;
        if v < 1e-18 {
            break;
        }
        i += 1;
    }
    -2.0 / PI.sqrt() * s * h
}

/// sum z^n / n^{n+1}
pub fn f3_direct(z: Complex64) -> Complex64 {
    let mut d = c(0.0, 0.0);
    for n in 1..200 {
        let nf = n as f64;
        d += (z.ln() * nf - (nf + 1.0) * nf.ln()).exp();
    }
    d
}

/// sum e^{i sqrt k} k^{-a}: partial sum to N - 1, then Euler-Maclaurin with the
/// tail integral taken along u = sqrt N + i s after u = sqrt x.
pub fn eqsum_oracle(a: f64) -> Complex64 {
    let n = 10_000u64;
    let f = |x: f64| Complex64::new(0.0, x.sqrt()).exp() * x.powf(-a);
    let df = |x: f64| f(x) * (Complex64::new(0.0, 0.5 / x.sqrt()) - a / x);
    let mut s = c(0.0, 0.0);
    for k in 1..n {
        s += f(k as f64);
    }
    let root = (n as f64).sqrt();
    let g = |t: f64| {
        let u = c(root, t);
        2.0 * Complex64::i() * (Complex64::i() * u).exp() * u.powf(1.0 - 2.0 * a)
    };
    let m = 40_000;
    let h = 60.0 / m as f64;
    let mut tail = g(0.0) + g(60.0);
    for i in 1..m {
        tail += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    tail *= h / 3.0;
    s + tail + 0.5 * f(n as f64) - df(n as f64) / 12.0
}
