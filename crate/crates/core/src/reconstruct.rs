//! Reconstruction of functions from coefficient models, singular parts, and
//! the inverse direction (function to coefficients).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexfn::{Cut, Side};
use crate::error::{Error, Result};
use crate::kernels::KernelId;
use crate::models::{CoefficientModel, ModelKind, SingularTerm};
use crate::quadrature::{
    adaptive, circle_coeff_integral, half_line_integral, half_line_panels, loop_integral_fn, panel, HalfLine,
    LoopContour, Panels, QuadratureResult, TailDecay, Tolerance,
};
use crate::special;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// How the integral of one term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Local decomposition near a singularity when available, rotated ray otherwise.
    Auto,
    /// Always integrate along a (possibly rotated) ray.
    Ray,
    /// Always use singular part plus a wide-loop remainder (loop-density kernels only).
    Lemma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconOptions {
    /// Largest rotation of the integration ray, in radians.
    pub max_rotation: f64,
    /// |z - a| / |a| below which `Route::Auto` uses the local decomposition.
    pub near_radius: f64,
    /// Half-width of the wide loop used for the remainder.
    pub lemma_width: f64,
    pub route: Route,
    /// Tail truncation for the remainder loop.
    pub tail_length: f64,
}

impl Default for ReconOptions {
    fn default() -> Self {
        ReconOptions { max_rotation: 0.35, near_radius: 0.1, lemma_width: 0.5, route: Route::Auto, tail_length: 40.0 }
    }
}

fn check_point(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("evaluation point {z} is not finite")));
    }
    Ok(())
}

/// Local variable w = ln(z/a), made one-sided when z lies on the cut from a.
fn local_variable(term: &SingularTerm, z: Complex64, side: Side) -> Result<(Complex64, Option<Side>)> {
    let cut = Cut::outward_from(term.a)?;
    if cut.is_branch_point(z) {
        return Err(Error::BranchPoint(z));
    }
    let mut w = (z / term.a).ln();
    if cut.contains(z) {
        if side == Side::Off {
            return Err(Error::SideRequired(z));
        }
        w.im = if side == Side::Upper { 1e-300 } else { -1e-300 };
        return Ok((w, Some(side)));
    }
    Ok((w, None))
}

/// z * integral over p of F(p) / (a e^p - z), along a ray rotated away from the pole.
fn term_ray(term: &SingularTerm, z: Complex64, side: Side, opts: &ReconOptions) -> Result<QuadratureResult> {
    let (w, on_cut) = local_variable(term, z, side)?;
    let sign = match on_cut {
        Some(Side::Upper) => -1.0,
        Some(_) => 1.0,
        None if w.im < 0.0 => 1.0,
        None => -1.0,
    };
    let theta = sign * opts.max_rotation.min(0.5 * (PI / w.re.max(1.0)).atan());
    let dir = Complex64::from_polar(1.0, theta);
    let growth = term.kernel.growth_rate();
    let rate = theta.cos() - growth;
    if !(rate > 0.0) {
        return Err(Error::Divergent(format!("kernel growth {growth} too large for the integration ray")));
    }
    let rate = match term.decay {
        TailDecay::Exponential(r) => rate.min(r.max(1e-3)),
        TailDecay::Algebraic(_) => rate,
    };
    let a = term.a;
    let kernel = &term.kernel;
    let r = match kernel {
        // p = dir t^{1/b} turns p^{b-1} dp into a constant times dt; for b <= 1 the
        // integrand still decays at least like e^{-rate t} beyond t = 1
        KernelId::PowerLaw(b) if b.im == 0.0 && b.re > 0.0 && b.re <= 1.0 => {
            let b = b.re;
            let scale = Complex64::from_polar(1.0, b * theta) * special::rgamma(Complex64::new(b + 1.0, 0.0));
            let h = |t: f64| {
                let p = t.powf(1.0 / b) * dir;
                Ok(scale / (a * p.exp() - z))
            };
            let opts = HalfLine { grade_origin: false, ..HalfLine::new((1.0 / rate).max(1.0), TailDecay::Exponential(rate)) };
            half_line_integral(h, opts)?
        }
        _ => {
            let h = |t: f64| {
                let p = t * dir;
                Ok(kernel.density(p)? / (a * p.exp() - z) * dir)
            };
            half_line_integral(h, HalfLine::new(1.0 / rate, TailDecay::Exponential(rate)))?
        }
    };
    Ok(QuadratureResult { value: z * r.value, error_estimate: z.norm() * r.error_estimate, ..r })
}

/// True if w lies inside the wide hairpin of half-width `width`, clear of its boundary.
fn inside_wide_loop(w: Complex64, width: f64) -> bool {
    let margin = 0.1 * width;
    if w.re > 0.0 {
        w.im.abs() < width - margin
    } else {
        w.norm() < width - margin
    }
}

fn loop_density_at(term: &SingularTerm, w: Complex64) -> Result<Complex64> {
    term.kernel.loop_density(w).ok_or_else(|| {
        Error::Unsupported(format!(
            "kernel `{}` has no closed-form loop density; singular part unavailable",
            term.kernel.name().unwrap_or_else(|| "expr".into())
        ))
    })
}

/// 2 pi i G(w), the non-analytic local part of term j at z.
fn term_singular_part(term: &SingularTerm, z: Complex64, side: Side) -> Result<Complex64> {
    let (w, _) = local_variable(term, z, side)?;
    Ok(2.0 * PI * I * loop_density_at(term, w)?)
}

/// Singular part plus the remainder over a loop wide enough to keep clear of the pole.
fn term_lemma(term: &SingularTerm, z: Complex64, side: Side, opts: &ReconOptions) -> Result<QuadratureResult> {
    let (w, _) = local_variable(term, z, side)?;
    term_lemma_at(term, z, w, opts)
}

/// As `term_lemma`, with the local variable w = ln(z/a) supplied by the caller
/// (already made one-sided on the cut).
fn term_lemma_at(term: &SingularTerm, z: Complex64, w: Complex64, opts: &ReconOptions) -> Result<QuadratureResult> {
    if !inside_wide_loop(w, opts.lemma_width) {
        return Err(Error::InvalidParameter(format!(
            "point {z} is outside the local region of the singularity at {}",
            term.a
        )));
    }
    let s = 2.0 * PI * I * loop_density_at(term, w)?;
    let a = term.a;
    let kernel = &term.kernel;
    let contour = LoopContour {
        epsilon: opts.lemma_width,
        tail_length: opts.tail_length.max(10.0 * opts.lemma_width + 1.0),
        ..LoopContour::default()
    };
    let density = kernel.loop_density_fn().expect("checked above");
    let g = |p: Complex64| Ok(density.eval(p) * z / (a * p.exp() - z));
    let rate = 1.0 - kernel.growth_rate();
    let r = loop_integral_fn(g, &contour, TailDecay::Exponential(rate))?;
    Ok(QuadratureResult {
        value: s + r.value,
        error_estimate: r.error_estimate + 1e-15 * s.norm(),
        nodes_used: r.nodes_used,
    })
}

fn term_value(term: &SingularTerm, z: Complex64, side: Side, opts: &ReconOptions) -> Result<QuadratureResult> {
    let near = (z - term.a).norm() < opts.near_radius * term.a.norm();
    match opts.route {
        Route::Ray => term_ray(term, z, side, opts),
        Route::Lemma => term_lemma(term, z, side, opts),
        Route::Auto if near && term.kernel.loop_density_fn().is_some() => {
            term_lemma(term, z, side, opts)
        }
        Route::Auto => term_ray(term, z, side, opts),
    }
}

/// Analytic continuation of f(z) = f0 + sum f_k z^k.
pub fn reconstruct_finite_radius(model: &CoefficientModel, z: Complex64, side: Side) -> Result<QuadratureResult> {
    reconstruct_finite_radius_with(model, z, side, &ReconOptions::default())
}

pub fn reconstruct_finite_radius_with(
    model: &CoefficientModel,
    z: Complex64,
    side: Side,
    opts: &ReconOptions,
) -> Result<QuadratureResult> {
    if model.kind != ModelKind::FiniteRadius {
        return Err(Error::InvalidParameter("model is not of kind finite_radius".into()));
    }
    check_point(z)?;
    let mut value = model.f0;
    let mut err = 0.0;
    let mut nodes = 0;
    if z == zero() {
        return Ok(QuadratureResult { value, error_estimate: 0.0, nodes_used: 1 });
    }
    for term in &model.terms {
        let r = term_value(term, z, side, opts)?;
        value += r.value;
        err += r.error_estimate;
        nodes += r.nodes_used;
    }
    Ok(QuadratureResult { value, error_estimate: err, nodes_used: nodes })
}

/// The non-analytic local term of term `j` at z: 2 pi i G_j(ln(z/a_j)), with G_j
/// a function whose jump across the positive reals is F_j.
pub fn singular_part(model: &CoefficientModel, j: usize, z: Complex64, side: Side) -> Result<Complex64> {
    let term = model.terms.get(j).ok_or_else(|| Error::InvalidParameter(format!("no term {j}")))?;
    check_point(z)?;
    let (w, _) = local_variable(term, z, side)?;
    if w.norm() >= 0.5 {
        return Err(Error::InvalidParameter(format!(
            "point {z} is beyond the local radius of the singularity at {}",
            term.a
        )));
    }
    term_singular_part(term, z, side)
}

fn expm1(x: Complex64) -> Complex64 {
    let h = 0.5 * x;
    2.0 * h.exp() * h.sinh()
}

/// f(z) = sum f_k z^k / k!, entire.
pub fn reconstruct_entire(model: &CoefficientModel, z: Complex64) -> Result<QuadratureResult> {
    if model.kind != ModelKind::Entire {
        return Err(Error::InvalidParameter("model is not of kind entire".into()));
    }
    check_point(z)?;
    let mut value = zero();
    let mut err = 0.0;
    let mut nodes = 0;
    if z == zero() {
        return Ok(QuadratureResult { value, error_estimate: 0.0, nodes_used: 1 });
    }
    for term in &model.terms {
        let kernel = &term.kernel;
        let a = term.a;
        let rate = 1.0 - kernel.growth_rate();
        if !(rate > 0.0) {
            return Err(Error::Divergent("kernel growth too large for entire reconstruction".into()));
        }
        let h = |p: f64| Ok(kernel.density(Complex64::new(p, 0.0))? * expm1(z * (-p).exp() / a));
        let r = half_line_integral(h, HalfLine::new(1.0 / rate, TailDecay::Exponential(rate)))?;
        value += r.value;
        err += r.error_estimate;
        nodes += r.nodes_used;
    }
    Ok(QuadratureResult { value, error_estimate: err, nodes_used: nodes })
}

/// Treatment of a Laplace ray that meets a singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lateral {
    /// Refuse singular directions.
    Direct,
    Upper,
    Lower,
    /// Average of the two lateral sums.
    Median,
}

impl std::str::FromStr for Lateral {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Lateral::Direct),
            "upper" => Ok(Lateral::Upper),
            "lower" => Ok(Lateral::Lower),
            "median" => Ok(Lateral::Median),
            _ => Err(Error::InvalidParameter(format!("unknown lateral choice `{s}`"))),
        }
    }
}

// Offset of the sampled integrand from a break, relative to the break; the
// grading next to a break reaches down to it.
const BREAK_OFFSET: f64 = 1e-10;
const BREAK_DECADES: i32 = 11;

// Outer integrals over reconstructed values carry the inner quadrature noise.
const NESTED_REL_TOL: f64 = 1e-11;

/// Integral over [0, len] graded toward 0.
fn graded_interval(
    h: &mut dyn FnMut(f64) -> Result<Complex64>,
    len: f64,
    decades: i32,
    tol: Tolerance,
    acc: &mut Panels,
) -> Result<()> {
    let x0 = len * 10f64.powi(-decades);
    let mut n = 0;
    let (v, l1) = panel(h, 0.0, x0, &mut n)?;
    acc.push(v, v.norm());
    acc.l1 += l1;
    acc.nodes += n;
    let mut a = x0;
    for _ in 0..decades {
        adaptive(h, a, a * 10.0, tol, acc)?;
        a *= 10.0;
    }
    Ok(())
}

/// Integral over [0, delta] of h, modelled there as C s^alpha e^{b s}; the three
/// parameters are fitted to samples at delta, 2 delta and 4 delta, and a sample
/// at 8 delta checks the fit.
/// `noise` is the relative accuracy of the samples.
fn endpoint_power(h: &mut dyn FnMut(f64) -> Result<Complex64>, delta: f64, noise: f64) -> Result<(Complex64, f64)> {
    let h1 = h(delta)?;
    let h2 = h(2.0 * delta)?;
    let h4 = h(4.0 * delta)?;
    let h8 = h(8.0 * delta)?;
    if h1.norm() == 0.0 || h2.norm() == 0.0 || h4.norm() == 0.0 || h8.norm() == 0.0 {
        return Ok((zero(), (h1.norm() + h2.norm() + h4.norm()) * delta));
    }
    let r2 = (h2 / h1).ln();
    let r4 = (h4 / h1).ln();
    let bd = r4 - 2.0 * r2;
    let alpha = (r2 - bd) / 2f64.ln();
    if !(alpha.re > -0.999) {
        return Err(Error::Divergent(format!("integrand ~ s^{:.3} is not integrable at the endpoint", alpha.re)));
    }
    // h1 delta integral_0^1 x^alpha e^{bd (x - 1)} dx, expanded in bd
    let series = 1.0 / (alpha + 1.0) + bd / (alpha + 2.0) + bd * bd / (2.0 * (alpha + 3.0));
    let value = h1 * delta * (-bd).exp() * series;
    // the fourth sample measures how well the model fits; sample noise is
    // amplified by the fit roughly like the inverse spacing in log s
    let miss = ((h8 / h1).ln() - (alpha * 8f64.ln() + 7.0 * bd)).norm();
    let err = (h1 * delta).norm() * (miss + bd.norm().powi(3) / 6.0 + 10.0 * noise + 1e-14);
    Ok((value, err))
}

/// Geometric panels [lo, 10 lo], [10 lo, 100 lo], ... up to hi.
fn geometric(
    h: &mut dyn FnMut(f64) -> Result<Complex64>,
    lo: f64,
    hi: f64,
    tol: Tolerance,
    acc: &mut Panels,
) -> Result<()> {
    let mut a = lo;
    while a < hi {
        let b = (a * 10.0).min(hi);
        adaptive(h, a, b, tol, acc)?;
        a = b;
    }
    Ok(())
}

fn push_endpoint(h: &mut dyn FnMut(f64) -> Result<Complex64>, delta: f64, acc: &mut Panels) -> Result<()> {
    let (v, e) = endpoint_power(h, delta, 1e-13)?;
    acc.push(v, e);
    acc.l1 += v.norm();
    acc.nodes += 4;
    Ok(())
}

/// Borel sum of sum f_k k! z^{k+1}: z times the Laplace integral of e^{-t} f(zt),
/// with f the finite-radius reconstruction without constant term.
pub fn borel_sum(model: &CoefficientModel, z: Complex64, lateral: Lateral) -> Result<QuadratureResult> {
    if model.kind != ModelKind::Borel {
        return Err(Error::InvalidParameter("model is not of kind borel".into()));
    }
    check_point(z)?;
    if !(z.re > 0.0) {
        return Err(Error::InvalidParameter(format!("Borel summation needs Re z > 0, got {z}")));
    }
    // singular points t = a_j / z along the ray t -> zt
    let mut breaks: Vec<(f64, usize)> = Vec::new();
    for (j, t) in model.terms.iter().enumerate() {
        let ratio = t.a / z;
        if Cut::positive_real().contains(ratio) {
            if lateral == Lateral::Direct {
                return Err(Error::SingularDirection(t.a));
            }
            breaks.push((ratio.re, j));
        }
    }
    breaks.sort_by(|x, y| x.0.total_cmp(&y.0));
    let sides: &[Side] = match lateral {
        Lateral::Upper => &[Side::Upper],
        Lateral::Lower => &[Side::Lower],
        _ => &[Side::Upper, Side::Lower],
    };
    let opts = ReconOptions::default();
    let tol = Tolerance { rel: NESTED_REL_TOL, ..Tolerance::default() };
    let lateral_sum = |side: Side| -> Result<QuadratureResult> {
        let inner_err = std::cell::Cell::new(0.0f64);
        // e^{-t} f(zt) at t = b + u for the break (b, j); the local variable of
        // term j is formed from u directly so that it keeps full relative accuracy
        let eval = |b: f64, near: Option<usize>, u: f64| -> Result<Complex64> {
            let t = b + u;
            let zt = z * t;
            let mut v = zero();
            let mut e = 0.0;
            for (i, term) in model.terms.iter().enumerate() {
                let local = (u / b).ln_1p();
                let exact = near == Some(i) && local.abs() < 0.3 && term.kernel.loop_density_fn().is_some();
                let r = if exact {
                    let im = match (u > 0.0, side) {
                        (false, _) => 0.0,
                        (true, Side::Lower) => -1e-300,
                        (true, _) => 1e-300,
                    };
                    term_lemma_at(term, zt, Complex64::new(local, im), &opts)?
                } else {
                    term_value(term, zt, side, &opts)?
                };
                v += r.value;
                e += r.error_estimate;
            }
            let damp = (-t).exp();
            inner_err.set(inner_err.get().max(e * damp));
            Ok(damp * v)
        };
        let mut acc = Panels::default();
        let mut prev: Option<f64> = None;
        let mut prev_j: Option<usize> = None;
        for &(b, j) in &breaks {
            let start = prev.unwrap_or(0.0);
            let mid = 0.5 * (start + b);
            let delta = BREAK_OFFSET * b;
            match prev {
                Some(pb) => {
                    let d = BREAK_OFFSET * pb;
                    graded_interval(&mut |u: f64| eval(pb, prev_j, d + u), mid - pb - d, BREAK_DECADES, tol, &mut acc)?
                }
                // f is analytic at 0, so the start needs no grading
                None => geometric(&mut |u: f64| eval(0.0, None, u), mid * 1e-2, mid, tol, &mut acc)
                    .and_then(|_| adaptive(&mut |u: f64| eval(0.0, None, u), 0.0, mid * 1e-2, tol, &mut acc))?,
            }
            graded_interval(&mut |u: f64| eval(b, Some(j), -(delta + u)), b - delta - mid, BREAK_DECADES, tol, &mut acc)?;
            push_endpoint(&mut |u: f64| eval(b, Some(j), -u), delta, &mut acc)?;
            push_endpoint(&mut |u: f64| eval(b, Some(j), u), delta, &mut acc)?;
            prev = Some(b);
            prev_j = Some(j);
        }
        let base = prev.unwrap_or(0.0);
        let d = prev.map_or(0.0, |pb| BREAK_OFFSET * pb);
        let mut tail = |u: f64| eval(base, prev_j, d + u);
        let mut line = HalfLine::new(1.0, TailDecay::Exponential(1.0)).with_rel_tol(NESTED_REL_TOL);
        match prev {
            Some(pb) => {
                line.scale = pb;
                line.grading_decades = BREAK_DECADES;
            }
            None => line.grading_decades = 3,
        }
        let (p, bound) = half_line_panels(&mut tail, line)?;
        acc.append(p);
        let r = QuadratureResult::from_panels(&acc, bound);
        Ok(QuadratureResult {
            value: z * r.value,
            error_estimate: z.norm() * (r.error_estimate + 2.0 * inner_err.get()),
            nodes_used: r.nodes_used,
        })
    };
    let parts: Vec<QuadratureResult> = sides.par_iter().map(|&s| lateral_sum(s)).collect::<Result<_>>()?;
    let total: Complex64 = parts.iter().map(|r| r.value).sum();
    let err: f64 = parts.iter().map(|r| r.error_estimate).sum();
    let nodes = parts.iter().map(|r| r.nodes_used).sum::<usize>();
    let n = sides.len() as f64;
    Ok(QuadratureResult { value: total / n, error_estimate: err / n, nodes_used: nodes })
}

/// Borel median sum through the closed form with the exponential integral.
/// Needs real z > 0 and real positive singularity locations.
pub fn borel_sum_ei(model: &CoefficientModel, z: f64) -> Result<QuadratureResult> {
    if model.kind != ModelKind::Borel {
        return Err(Error::InvalidParameter("model is not of kind borel".into()));
    }
    if !(z > 0.0) {
        return Err(Error::InvalidParameter("the Ei form needs real z > 0".into()));
    }
    let mut value = zero();
    let mut err = 0.0;
    let mut nodes = 0;
    for term in &model.terms {
        if term.a.im != 0.0 || term.a.re <= 0.0 {
            return Err(Error::Unsupported("the Ei form needs real positive singularity locations".into()));
        }
        let a = term.a.re;
        let kernel = &term.kernel;
        let rate = 1.0 - kernel.growth_rate();
        let h = |p: f64| {
            let b = a * p.exp();
            let inner = b * special::ei_scaled(b / z) - z;
            Ok(kernel.density(Complex64::new(p, 0.0))? * inner)
        };
        let r = half_line_integral(h, HalfLine::new(1.0 / rate, TailDecay::Exponential(rate)))?;
        value += r.value;
        err += r.error_estimate;
        nodes += r.nodes_used;
    }
    Ok(QuadratureResult { value, error_estimate: err, nodes_used: nodes })
}

/// Cut data and probe results for one singularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub index: usize,
    pub location: Complex64,
    pub probe: Complex64,
    /// Singular part on the upper and lower sides, when available.
    pub local_upper: Option<Complex64>,
    pub local_lower: Option<Complex64>,
    /// Upper minus lower value of the ray reconstruction at the probe.
    pub measured_jump: Complex64,
    /// 2 pi i F_j(ln(probe/a_j)).
    pub predicted_jump: Complex64,
    pub error_estimate: f64,
}

/// Probes the cut of term j at a(1 + offset), offset > 0.
pub fn singularity_report(model: &CoefficientModel, j: usize, offset: f64) -> Result<SingularityReport> {
    if model.kind != ModelKind::FiniteRadius {
        return Err(Error::InvalidParameter("singularity reports need a finite_radius model".into()));
    }
    let term = model.terms.get(j).ok_or_else(|| Error::InvalidParameter(format!("no term {j}")))?;
    if !(offset > 0.0 && offset.is_finite()) {
        return Err(Error::InvalidParameter("probe offset must be positive".into()));
    }
    let probe = term.a * (1.0 + offset);
    let opts = ReconOptions { route: Route::Ray, ..ReconOptions::default() };
    let up = reconstruct_finite_radius_with(model, probe, Side::Upper, &opts)?;
    let lo = reconstruct_finite_radius_with(model, probe, Side::Lower, &opts)?;
    let w = Complex64::new((1.0 + offset).ln(), 0.0);
    let predicted = 2.0 * PI * I * term.kernel.density(w)?;
    let local = |s| singular_part(model, j, probe, s).ok();
    Ok(SingularityReport {
        index: j,
        location: term.a,
        probe,
        local_upper: local(Side::Upper),
        local_lower: local(Side::Lower),
        measured_jump: up.value - lo.value,
        predicted_jump: predicted,
        error_estimate: up.error_estimate + lo.error_estimate,
    })
}

/// Taylor coefficient by the Cauchy integral on |z| = r.
pub fn taylor_coeffs_numeric<F>(f: F, n: u32, r: f64) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    circle_coeff_integral(f, n, r, None)
}

/// Checks that |f(R e^{i theta})| R^{-k} decreases over R = 1e2, 1e3, 1e4.
pub fn check_decay<F>(f: &F, cuts: &[Cut], k: u32) -> Result<()>
where
    F: Fn(Complex64, Side) -> Result<Complex64>,
{
    let mut prev = f64::INFINITY;
    for r in [1e2, 1e3, 1e4] {
        let mut m: f64 = 0.0;
        for j in 0..16 {
            let z = Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.37) / 16.0);
            if cuts.iter().any(|c| c.distance(z) < 1e-6 * r) {
                continue;
            }
            m = m.max(f(z, Side::Off)?.norm() * r.powi(-(k as i32)));
        }
        if !(m < prev) {
            return Err(Error::InvalidParameter(format!(
                "decay check failed: |f| R^-{k} does not decrease at R = {r:e}"
            )));
        }
        prev = m;
    }
    Ok(())
}

/// f_k from the jumps of f across the cuts from each singularity a_j.
pub fn coeffs_from_function<F>(f: &F, singularities: &[Complex64], k: u32) -> Result<QuadratureResult>
where
    F: Fn(Complex64, Side) -> Result<Complex64>,
{
    if k == 0 {
        return Err(Error::InvalidParameter("coefficients are indexed from k = 1".into()));
    }
    let cuts = singularities.iter().map(|&a| Cut::outward_from(a)).collect::<Result<Vec<_>>>()?;
    check_decay(f, &cuts, k)?;
    let mut value = zero();
    let mut err = 0.0;
    let mut nodes = 0;
    let kf = k as f64;
    for &a in singularities {
        let mut h = |s: f64| {
            let z = a * s.exp();
            let jump = f(z, Side::Upper)? - f(z, Side::Lower)?;
            Ok((-kf * s).exp() * jump)
        };
        // z = a e^s is only resolved to about 1e-16 / s in s; stay at s >= delta and
        // fit the first stretch
        let delta = 1e-6;
        let noise = 1e-15 / delta;
        let (v0, e0) = endpoint_power(&mut h, delta, noise).map_err(|e| match e {
            Error::Divergent(_) => Error::Divergent("jump not integrable at the singularity".into()),
            other => other,
        })?;
        let tol = Tolerance { rel: 1e-10, ..Tolerance::default() };
        let knee = 1.0 / kf;
        let mut acc = Panels::default();
        acc.push(v0, e0);
        acc.l1 += v0.norm();
        geometric(&mut h, delta, knee, tol, &mut acc)?;
        let opts = HalfLine {
            grade_origin: false,
            rel_tol: tol.rel,
            ..HalfLine::new(knee, TailDecay::Exponential(kf))
        };
        let (rest, bound) = half_line_panels(&mut |u: f64| h(knee + u), opts)?;
        acc.append(rest);
        let r = QuadratureResult::from_panels(&acc, bound);
        let w = a.powi(-(k as i32)) / (2.0 * PI * I);
        value += w * r.value;
        err += w.norm() * r.error_estimate;
        nodes += r.nodes_used;
    }
    Ok(QuadratureResult { value, error_estimate: err, nodes_used: nodes })
}

/// Wraps a plain function so that points on the given cuts are moved to the requested side.
pub fn one_sided<F>(f: F, cuts: Vec<Cut>) -> impl Fn(Complex64, Side) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    move |z, side| {
        for c in &cuts {
            if c.is_branch_point(z) {
                return Err(Error::BranchPoint(z));
            }
            if c.contains(z) {
                if side == Side::Off {
                    return Err(Error::SideRequired(z));
                }
                return f(c.displace(z, side));
            }
        }
        f(z)
    }
}
