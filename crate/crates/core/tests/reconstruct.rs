use std::f64::consts::PI;

use num_complex::Complex64;
use resum::complexfn::{Cut, Side};
use resum::models::{bundled, CoefficientModel, ModelKind, SingularTerm};
use resum::reconstruct::*;
use resum::kernels::KernelId;

mod common;

use common::{c, f1_direct, f1_negative_oracle, f3_direct};

#[test]
fn f1_inside_disk() {
    let m = bundled("f1").unwrap();
    assert_eq!(reconstruct_finite_radius(&m, c(0.0, 0.0), Side::Off).unwrap().value, c(0.0, 0.0));
    for z in [c(0.5, 0.0), c(-0.9, 0.0), c(0.3, 0.8), c(0.0, -0.9), c(-0.6, 0.6)] {
        let r = reconstruct_finite_radius(&m, z, Side::Off).unwrap();
        let d = f1_direct(z);
        assert!((r.value - d).norm() < 1e-10, "z={z}: {} vs {d}", r.value);
        assert!((r.value - d).norm() <= 3.0 * r.error_estimate.max(1e-15), "z={z} err {}", r.error_estimate);
    }
}

#[test]
fn path_independence_outside_disk() {
    let m = bundled("f1").unwrap();
    for z in [c(2.0, 1.0), c(2.0, 0.5)] {
        let a = reconstruct_finite_radius_with(&m, z, Side::Off, &ReconOptions { route: Route::Ray, ..Default::default() })
            .unwrap();
        let b = reconstruct_finite_radius_with(
            &m,
            z,
            Side::Off,
            &ReconOptions { route: Route::Ray, max_rotation: 0.12, ..Default::default() },
        )
        .unwrap();
        let l = reconstruct_finite_radius_with(
            &m,
            z,
            Side::Off,
            &ReconOptions { route: Route::Lemma, lemma_width: 0.9, ..Default::default() },
        )
        .unwrap();
        assert!((a.value - b.value).norm() < 1e-10, "{} {}", a.value, b.value);
        assert!((a.value - l.value).norm() < 1e-10, "{} {}", a.value, l.value);
    }
}

#[test]
fn f1_large_negative() {
    let m = bundled("f1").unwrap();
    for x in [10.0, 1e2, 1e3, 1e4] {
        let r = reconstruct_finite_radius(&m, c(-x, 0.0), Side::Off).unwrap();
        let o = f1_negative_oracle(x);
        assert!((r.value - o).norm() < 1e-9 * o.abs(), "x={x}: {} vs {o}", r.value);
        assert!((r.value - o).norm() <= 3.0 * r.error_estimate.max(1e-14 * o.abs()), "x={x}: {} vs {o}, err {}", r.value, r.error_estimate);
    }
}

#[test]
fn cut_requires_side_and_branch_point_errors() {
    let m = bundled("f1").unwrap();
    assert!(matches!(reconstruct_finite_radius(&m, c(2.0, 0.0), Side::Off), Err(resum::Error::SideRequired(_))));
    assert!(matches!(reconstruct_finite_radius(&m, c(1.0, 0.0), Side::Upper), Err(resum::Error::BranchPoint(_))));
}

#[test]
fn jump_matches_density() {
    let m = bundled("f1").unwrap();
    for off in [0.05, 0.2, 0.5, 2.0] {
        let r = singularity_report(&m, 0, off).unwrap();
        assert!((r.measured_jump - r.predicted_jump).norm() < 1e-8, "{r:?}");
        // -ln-type term: jump 2 pi i F(ln z) = 2 pi i / sqrt(pi ln z)
        let w = (1.0f64 + off).ln();
        let expect = c(0.0, 2.0 * PI) / (PI * w).sqrt();
        assert!((r.predicted_jump - expect).norm() < 1e-12);
    }
    // near route agrees with the ray route on both sides
    for side in [Side::Upper, Side::Lower] {
        let z = c(1.05, 0.0);
        let near = reconstruct_finite_radius(&m, z, side).unwrap();
        let ray = reconstruct_finite_radius_with(&m, z, side, &ReconOptions { route: Route::Ray, ..Default::default() })
            .unwrap();
        assert!((near.value - ray.value).norm() < 1e-9, "{side:?}: {} {}", near.value, ray.value);
    }
}

#[test]
fn log_model_jump() {
    // sum z^k / k = -ln(1 - z)
    let m = CoefficientModel::single(ModelKind::FiniteRadius, c(1.0, 0.0), KernelId::PowerLaw(c(1.0, 0.0))).unwrap();
    for z in [c(3.0, 0.0), c(1.02, 0.0)] {
        let u = reconstruct_finite_radius(&m, z, Side::Upper).unwrap().value;
        let l = reconstruct_finite_radius(&m, z, Side::Lower).unwrap().value;
        // 1 - z is on the negative axis; upper side of z maps to lower side of 1 - z
        let eu = -(c(1.0, 0.0) - z + c(0.0, -1e-300)).ln();
        let el = -(c(1.0, 0.0) - z + c(0.0, 1e-300)).ln();
        assert!((u - eu).norm() < 1e-9, "{u} {eu}");
        assert!((l - el).norm() < 1e-9, "{l} {el}");
    }
}

#[test]
fn f3_entire() {
    let m = bundled("f3-stirling").unwrap();
    assert_eq!(reconstruct_entire(&m, c(0.0, 0.0)).unwrap().value, c(0.0, 0.0));
    for z in [c(-5.0, 0.0), c(1.0, 0.0), c(10.0, 0.0), c(0.0, 20.0), c(-20.0, 0.0)] {
        let d = f3_direct(z);
        let r = reconstruct_entire(&m, z).unwrap();
        assert!((r.value - d).norm() < 1e-8 * d.norm().max(1.0), "z={z}: {} vs {d}", r.value);
    }
}

#[test]
fn borel_sum_vs_ei_and_truncation() {
    let m = bundled("borel-sqrt").unwrap();
    assert!(matches!(borel_sum(&m, c(0.1, 0.0), Lateral::Direct), Err(resum::Error::SingularDirection(_))));
    for z in [0.1, 0.05, 0.02] {
        let b = borel_sum(&m, c(z, 0.0), Lateral::Median).unwrap();
        let e = borel_sum_ei(&m, z).unwrap();
        assert!((b.value - e.value).norm() < 1e-10 * e.value.norm(), "z={z}: {} {}", b.value, e.value);
        assert!(b.value.im.abs() < 1e-14);
    }
    // off the singular ray the lateral choice is irrelevant
    let z = c(0.1, 0.05);
    let u = borel_sum(&m, z, Lateral::Direct).unwrap();
    let v = borel_sum(&m, z, Lateral::Median).unwrap();
    assert!((u.value - v.value).norm() < 1e-12);
}

#[test]
fn coeffs_from_log_function() {
    let f = one_sided(|z: Complex64| Ok((c(1.0, 0.0) - z).ln() / (z * z)), vec![Cut::outward_from(c(1.0, 0.0)).unwrap()]);
    for k in 1..=10u32 {
        let r = coeffs_from_function(&f, &[c(1.0, 0.0)], k).unwrap();
        let exact = -1.0 / (k as f64 + 2.0);
        assert!((r.value - exact).norm() < 1e-9, "k={k}: {}", r.value);
    }
}

#[test]
fn coeffs_two_cuts() {
    let cuts = vec![Cut::outward_from(c(1.0, 0.0)).unwrap(), Cut::outward_from(c(-2.0, 0.0)).unwrap()];
    let g = |z: Complex64| Ok((c(1.0, 0.0) - z).ln() * (c(1.0, 0.0) + z / 2.0).ln() / (z * z * z));
    let f = one_sided(g, cuts);
    for k in 1..=6u32 {
        let r = coeffs_from_function(&f, &[c(1.0, 0.0), c(-2.0, 0.0)], k).unwrap();
        let t = taylor_coeffs_numeric(g, k, 0.5).unwrap();
        assert!((r.value - t.value).norm() < 1e-9 * t.value.norm().max(1e-3), "k={k}: {} {}", r.value, t.value);
    }
}

#[test]
fn roundtrip_f1() {
    let m = bundled("f1").unwrap();
    let f = |z: Complex64, s: Side| reconstruct_finite_radius(&m, z, s).map(|r| r.value);
    for k in [1u32, 2, 5, 10] {
        let r = coeffs_from_function(&f, &[c(1.0, 0.0)], k).unwrap();
        let exact = 1.0 / (k as f64).sqrt();
        assert!((r.value - exact).norm() < 1e-6 * exact, "k={k}: {}", r.value);
    }
}

#[test]
fn two_term_model() {
    let terms = vec![
        SingularTerm { a: c(1.0, 0.0), kernel: KernelId::PowerLaw(c(0.5, 0.0)), decay: KernelId::PowerLaw(c(0.5, 0.0)).default_decay() },
        SingularTerm { a: c(-2.0, 0.0), kernel: KernelId::PowerLaw(c(1.5, 0.0)), decay: KernelId::PowerLaw(c(1.5, 0.0)).default_decay() },
    ];
    let m = CoefficientModel::new(ModelKind::FiniteRadius, c(0.25, 0.0), terms).unwrap();
    let z = c(0.3, -0.4);
    let mut d = m.f0;
    for k in 1..400u32 {
        d += z.powu(k) * ((k as f64).powf(-0.5) + (-0.5f64).powi(k as i32) * (k as f64).powf(-1.5));
    }
    let r = reconstruct_finite_radius(&m, z, Side::Off).unwrap();
    assert!((r.value - d).norm() < 1e-10, "{} {d}", r.value);
}

#[test]
fn singular_part_local() {
    let m = bundled("f1").unwrap();
    let s = singular_part(&m, 0, c(1.01, 0.0), Side::Upper).unwrap();
    // pi i times (1/sqrt(pi)) (ln 1.01)^{-1/2}
    let t = 1.0 / (PI * 1.01f64.ln()).sqrt();
    assert!((s - c(0.0, PI * t)).norm() < 1e-10 * t, "{s}");
    assert!(singular_part(&m, 0, c(3.0, 1.0), Side::Off).is_err());
}

mod series_agreement {
    use super::*;
    use proptest::prelude::*;

    fn f2_coeff(k: u32) -> f64 {
        let kf = k as f64;
        1.0 / (kf.powf(PI) + kf.ln())
    }

    fn check(name: &str, coeff: fn(u32) -> f64, z: Complex64) -> Result<(), TestCaseError> {
        let m = bundled(name).unwrap();
        let partial: Complex64 = (1..=200u32).map(|k| z.powu(k) * coeff(k)).sum();
        // coefficients are at most 1 here, so the remainder is a geometric tail
        let tail = z.norm().powi(201) / (1.0 - z.norm());
        let r = reconstruct_finite_radius(&m, z, Side::Off).unwrap();
        let d = (r.value - partial).norm();
        prop_assert!(d <= tail + 3.0 * r.error_estimate, "{name} z={z}: {d} (err {})", r.error_estimate);
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn f1_matches_partial_sums(rho in 0.0f64..0.5, theta in 0.0f64..std::f64::consts::TAU) {
            check("f1", |k| 1.0 / (k as f64).sqrt(), Complex64::from_polar(rho, theta))?;
        }

        #[test]
        fn f2_matches_partial_sums(rho in 0.0f64..0.5, theta in 0.0f64..std::f64::consts::TAU) {
            check("f2", f2_coeff, Complex64::from_polar(rho, theta))?;
        }
    }
}
