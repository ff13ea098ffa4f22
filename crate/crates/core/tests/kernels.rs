use std::f64::consts::{E, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use resum::kernels::*;
use resum::quadrature::laplace_integral;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

#[test]
fn power_law_examples() {
    let f = power_law_kernel(c(0.5, 0.0)).unwrap();
    assert!((laplace_integral(&f, c(9.0, 0.0)).unwrap().value - 1.0 / 3.0).norm() < 1e-13);
    let one = power_law_kernel(c(1.0, 0.0)).unwrap();
    assert!((laplace_integral(&one, c(2.0, 0.0)).unwrap().value - 0.5).norm() < 1e-14);
    assert!(power_law_kernel(c(0.0, 1.0)).is_err());
    assert!(power_law_kernel(c(-0.5, 0.0)).is_err());
}

#[test]
fn stirling_examples() {
    for p in [1e-6, 1e-8] {
        let g = stirling_g(c(p, 0.0)).unwrap();
        assert!((p.sqrt() * g - 2f64.sqrt()).norm() < 1e-5, "p={p}: {g}");
    }
    let seven = KernelId::StirlingG.coefficient(c(7.0, 0.0)).unwrap().value;
    let v = seven * 7f64.powi(8) * (-7.0f64).exp();
    assert!((v - 5040.0).norm() < 1e-8 * 5040.0, "{v}");
    // G -> s2' -> 1 at large p
    let g100 = stirling_g(c(100.0, 0.0)).unwrap();
    let g1e4 = stirling_g(c(1e4, 0.0)).unwrap();
    assert!((g100 - 1.0).norm() < 0.02 && (g1e4 - 1.0).norm() < (g100 - 1.0).norm(), "{g100} {g1e4}");
    assert!(stirling_g(c(0.0, 0.0)).is_err());
}

#[test]
fn stirling_factorials() {
    for n in 1..=20u32 {
        let nf = n as f64;
        let l = KernelId::StirlingG.coefficient(c(nf, 0.0)).unwrap();
        let v = l.value * (nf.ln() * (nf + 1.0) - nf).exp();
        let t = factorial(n);
        assert!((v - t).norm() < 1e-8 * t, "n={n}: {v} vs {t}");
    }
}

#[test]
fn exp_sqrt_decay_examples() {
    for (g, n, t) in [(2.0, 1.0, (-2.0f64).exp()), (1.0, 4.0, (-2.0f64).exp()), (3.0, 2.0, (-3.0 * 2f64.sqrt()).exp())] {
        let f = exp_sqrt_decay_kernel(c(g, 0.0)).unwrap();
        let v = laplace_integral(&f, c(n, 0.0)).unwrap().value;
        assert!((v - t).norm() < 1e-12 * t, "gamma={g} n={n}: {v}");
        let k = KernelId::ExpSqrtDecay(c(g, 0.0)).coefficient(c(n, 0.0)).unwrap().value;
        assert!((k - t).norm() < 1e-12 * t);
    }
    assert!(exp_sqrt_decay_kernel(c(-1.0, 0.0)).is_err());
}

#[test]
fn exp_sqrt_growth_examples() {
    for (n, t) in [(1.0, E), (4.0, E * E), (9.0, E.powi(3))] {
        let r = exp_sqrt_growth_coefficient(n).unwrap();
        assert!((r.value - t).norm() < 1e-10 * t, "n={n}: {}", r.value);
        assert!((r.value - t).norm() <= 3.0 * r.error_estimate.max(1e-15 * t));
    }
}

#[test]
fn f2_examples() {
    let k = KernelId::F2Nested;
    for n in [2.0f64, 5.0, 10.0] {
        let v = k.coefficient(c(n, 0.0)).unwrap().value;
        let t = 1.0 / (n.powf(PI) + n.ln());
        assert!((v - t).norm() < 1e-10 * t, "k={n}: {v} vs {t}");
    }
    assert!(f2_kernel(c(-1.0, 0.0)).is_err());
}

#[test]
fn reciprocal_gamma_examples() {
    let g15 = PI.sqrt() / 2.0;
    let cases = [(c(4.0, 0.0), 1.0 / 6.0), (c(0.5, 0.0), 1.0 / PI.sqrt()), (c(5.5, 0.0), 1.0 / (4.5 * 3.5 * 2.5 * 1.5 * g15))];
    for (z, t) in cases {
        let r = reciprocal_gamma(z).unwrap();
        assert!((r.value - t).norm() < 1e-12 * t, "{z}: {}", r.value);
    }
    assert!(reciprocal_gamma(c(-2.0, 0.0)).is_err());
}

#[test]
fn laplace_fidelity() {
    let seqs: Vec<(KernelId, Box<dyn Fn(f64) -> f64>)> = vec![
        (KernelId::PowerLaw(c(0.5, 0.0)), Box::new(|k: f64| 1.0 / k.sqrt())),
        (KernelId::ExpSqrtDecay(c(1.5, 0.0)), Box::new(|k: f64| (-1.5 * k.sqrt()).exp())),
        (KernelId::F2Nested, Box::new(|k: f64| 1.0 / (k.powf(PI) + k.ln()))),
        (KernelId::StirlingG, Box::new(|k: f64| factorial(k as u32) / (k.ln() * (k + 1.0) - k).exp())),
    ];
    for (kernel, truth) in &seqs {
        for k in 1..=20u32 {
            let v = kernel.coefficient(c(k as f64, 0.0)).unwrap().value;
            let t = truth(k as f64);
            assert!((v - t).norm() < 1e-7 * t, "{kernel:?} k={k}: {v} vs {t}");
        }
    }
}

#[test]
fn bounded_away_from_origin() {
    for name in ["power_law:0.5", "stirling_g", "exp_sqrt:2", "f2"] {
        let k = KernelId::from_name(name).unwrap();
        let g = k.growth_rate();
        let sup = (0..=99)
            .map(|i| 1.0 + i as f64)
            .map(|p| (k.density(c(p, 0.0)).unwrap() * (-g * p).exp()).norm())
            .fold(0.0f64, f64::max);
        assert!(sup.is_finite() && sup < 1e6, "{name}: {sup}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    // s1 ~ e^{-1-p} underflows past p ~ 700
    fn stirling_branches_separate(lp in -6.0f64..2.8) {
        let p = 10f64.powf(lp);
        let r = stirling_roots(c(p, 0.0)).unwrap();
        prop_assert!(r.s1.re > 0.0 && r.s1.re < 1.0 && r.s1.im.abs() < 1e-12, "{:?}", r);
        prop_assert!(r.s2.re > 1.0 && r.s2.im.abs() < 1e-12, "{:?}", r);
        prop_assert!(r.residual < 1e-12);
        for s in [r.s1, r.s2] {
            prop_assert!((s - s.ln() - 1.0 - p).norm() < 1e-11 * (1.0 + p));
        }
    }
}

mod common;

#[test]
fn coefficient_errors_are_honest() {
    for case in common::kernel_suite(20) {
        let ratio = case.ratio().unwrap_or_else(|| panic!("{}: {:?}", case.name, case.result));
        assert!(ratio <= 3.0, "{}: {:?} vs {} (ratio {ratio})", case.name, case.result, case.truth);
    }
}
