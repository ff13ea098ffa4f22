//! Contour quadrature: loop integrals around the positive reals, bent paths,
//! Laplace integrals and Cauchy circle integrals.

mod gauss;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexfn::{BranchedFunction, Side};
use crate::error::{Error, Result};
pub(crate) use gauss::{adaptive, panel, Integrand, Panels, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Value of a contour integral together with an a-posteriori error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub nodes_used: usize,
}

impl QuadratureResult {
    pub(crate) fn from_panels(p: &Panels, extra_error: f64) -> Self {
        let value = p.total();
        // roundoff floor proportional to the L1 mass
        let floor = 4e-16 * p.l1.max(value.norm());
        QuadratureResult { value, error_estimate: p.error + extra_error + floor, nodes_used: p.nodes.max(1) }
    }
}

/// Decay class of an integrand beyond the truncation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "class", content = "rate")]
pub enum TailDecay {
    /// |h(t)| <= C e^{-r t}
    Exponential(f64),
    /// |h(t)| <= C t^{-q}, q > 1
    Algebraic(f64),
}

impl TailDecay {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TailDecay::Exponential(r) if r > 0.0 && r.is_finite() => Ok(()),
            TailDecay::Algebraic(q) if q > 1.0 && q.is_finite() => Ok(()),
            _ => Err(Error::InvalidParameter(format!("bad tail decay {self:?}"))),
        }
    }

    /// Bound on the integral from `t` to infinity given |h(t)|.
    pub fn bound(&self, magnitude: f64, t: f64) -> f64 {
        match *self {
            TailDecay::Exponential(r) => magnitude / r,
            TailDecay::Algebraic(q) => magnitude * t / (q - 1.0),
        }
    }
}

/// Hairpin contour around the positive reals.
///
/// Orientation: in along the lower edge, clockwise around the origin, out
/// along the upper edge. An enclosed simple pole with residue R contributes
/// -2 pi i R, and the integral equals the jump integral of g_upper - g_lower.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopContour {
    pub epsilon: f64,
    pub tail_length: f64,
    pub panels_per_decade: usize,
    pub circle_nodes: usize,
    /// Relative tolerance the tail bound must meet.
    pub tolerance: f64,
}

impl Default for LoopContour {
    fn default() -> Self {
        LoopContour { epsilon: 1e-3, tail_length: 40.0, panels_per_decade: 8, circle_nodes: 64, tolerance: 1e-6 }
    }
}

impl LoopContour {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if !(self.tail_length > 10.0 * self.epsilon) || !self.tail_length.is_finite() {
            return bad("tail_length must exceed 10 * epsilon");
        }
        if self.panels_per_decade < 4 {
            return bad("panels_per_decade must be at least 4");
        }
        if self.circle_nodes < 16 {
            return bad("circle_nodes must be at least 16");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        Ok(())
    }
}

/// Loop integral of a branched function around the positive reals.
pub fn loop_integral(g: &BranchedFunction, contour: &LoopContour, tail: TailDecay) -> Result<QuadratureResult> {
    loop_integral_fn(|p| g.eval(p, Side::Off), contour, tail)
}

/// Loop integral of a plain closure; `g` is only sampled off the positive reals.
pub fn loop_integral_fn<G>(g: G, contour: &LoopContour, tail: TailDecay) -> Result<QuadratureResult>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    contour.validate()?;
    tail.validate()?;
    let eps = contour.epsilon;
    let t_max = contour.tail_length;
    let tol = Tolerance::default();

    // edges
    let mut edges = Panels::default();
    let mut jump = |s: f64| Ok(g(Complex64::new(s, eps))? - g(Complex64::new(s, -eps))?);
    let mut cuts = vec![0.0, eps];
    let step = 10f64.powf(1.0 / contour.panels_per_decade as f64);
    let mut x = eps;
    while x * step < t_max * (1.0 - 1e-12) {
        x *= step;
        cuts.push(x);
    }
    cuts.push(t_max);
    for w in cuts.windows(2) {
        adaptive(&mut jump, w[0], w[1], tol, &mut edges)?;
    }

    // small circle, clockwise from 3pi/2 to pi/2
    let circle_at = |panels: usize| -> Result<Panels> {
        let mut acc = Panels::default();
        let mut h = |theta: f64| {
            let p = Complex64::from_polar(eps, theta);
            Ok(g(p)? * I * p)
        };
        let width = PI / panels as f64;
        for k in 0..panels {
            let a = 1.5 * PI - k as f64 * width;
            let mut n = 0;
            let (v, l1) = panel(&mut h, a, a - width, &mut n)?;
            acc.push(v, 0.0);
            acc.l1 += l1;
            acc.nodes += n;
        }
        Ok(acc)
    };
    let as_nonintegrable = |e: Error| match e {
        Error::NonFinite(_) => Error::NonIntegrable { change: f64::INFINITY },
        other => other,
    };
    let base = (contour.circle_nodes / gauss::ORDER).max(1);
    let coarse = circle_at(base).map_err(as_nonintegrable)?;
    let fine = circle_at(2 * base).map_err(as_nonintegrable)?;
    let change = (coarse.total() - fine.total()).norm();
    if change > 1e-6 * fine.total().norm().max(1.0) {
        return Err(Error::NonIntegrable { change });
    }

    // closing segment from T + i eps down to T - i eps
    let mut closing = Panels::default();
    let mut seg = |y: f64| Ok(I * g(Complex64::new(t_max, y))?);
    adaptive(&mut seg, eps, -eps, tol, &mut closing)?;
    let closing_mag = closing.total().norm();

    let mut all = edges;
    let mut fine = fine;
    fine.error += change;
    all.append(fine);
    all.append(closing);

    let value = all.total();
    let mag = jump(t_max)?.norm().max(jump(t_max * 0.99)?.norm());
    let bound = tail.bound(mag, t_max) + closing_mag;
    let allowed = contour.tolerance * value.norm().max(1.0);
    if bound > allowed {
        return Err(Error::TailBound { bound, tolerance: allowed });
    }
    Ok(QuadratureResult::from_panels(&all, bound))
}

const GRADING_DECADES: i32 = 40;

/// Options for integrals over [0, infinity).
#[derive(Debug, Clone, Copy)]
pub struct HalfLine {
    /// Length scale of the integrand (decay length, distance to nearby features).
    pub scale: f64,
    /// Grade panels geometrically toward t = 0 for endpoint singularities.
    pub grade_origin: bool,
    /// Number of decades below `scale` covered by the grading.
    pub grading_decades: i32,
    pub tail: TailDecay,
    /// Relative tolerance the tail bound must meet.
    pub tolerance: f64,
    /// Relative tolerance of the adaptive panels; loosen for integrands that are
    /// themselves numerical results.
    pub rel_tol: f64,
}

impl HalfLine {
    pub fn new(scale: f64, tail: TailDecay) -> Self {
        HalfLine { scale, grade_origin: true, grading_decades: GRADING_DECADES, tail, tolerance: 1e-6, rel_tol: 1e-13 }
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        HalfLine { rel_tol, ..self }
    }
}

/// Integral of `h` over [0, infinity).
pub fn half_line_integral<H>(mut h: H, opts: HalfLine) -> Result<QuadratureResult>
where
    H: FnMut(f64) -> Result<Complex64>,
{
    let acc = half_line_panels(&mut h, opts)?;
    Ok(QuadratureResult::from_panels(&acc.0, acc.1))
}

pub(crate) fn half_line_panels(h: &mut Integrand<'_>, opts: HalfLine) -> Result<(Panels, f64)> {
    opts.tail.validate()?;
    if !(opts.scale > 0.0 && opts.scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("integration scale {} must be positive", opts.scale)));
    }
    let tol = Tolerance { rel: opts.rel_tol, ..Tolerance::default() };
    let s = opts.scale;
    if opts.grade_origin && !(3..=300).contains(&opts.grading_decades) {
        return Err(Error::InvalidParameter("grading needs between 3 and 300 decades".into()));
    }
    let mut acc = Panels::default();
    let mut t = if opts.grade_origin { s } else { 0.0 };
    let mut width = s;
    let max_extent = s * 1e5;
    let bound = loop {
        let b = t + width;
        adaptive(h, t, b, tol, &mut acc)?;
        t = b;
        width *= 2.0;
        let mag = h(t)?.norm().max(h(t * 0.995)?.norm());
        let bound = opts.tail.bound(mag, t);
        let value = acc.total().norm();
        if bound <= 1e-17 * acc.l1.max(value) || bound == 0.0 {
            break bound;
        }
        if t > max_extent {
            let allowed = opts.tolerance * value.max(1e-300);
            if bound > allowed {
                return Err(Error::TailBound { bound, tolerance: allowed });
            }
            break bound;
        }
    };
    if opts.grade_origin {
        // decades toward the origin, largest first, so that each one only has to
        // be resolved relative to the mass already accumulated
        let mut mags = Vec::new();
        let mut b = s;
        for _ in 0..opts.grading_decades {
            let a = b / 10.0;
            let mut local = Panels::default();
            let dtol = Tolerance { abs: tol.abs.max(tol.rel * acc.l1), ..tol };
            adaptive(h, a, b, dtol, &mut local)?;
            let mag = local.total().norm().max(local.l1);
            acc.append(local);
            b = a;
            // negligible and shrinking geometrically: the rest goes into one panel
            let shrinking = mags.last().is_some_and(|&prev: &f64| mag <= 0.5 * prev);
            mags.push(mag);
            if shrinking && mag <= 1e-17 * acc.l1 {
                break;
            }
        }
        let m = mags.len();
        if m == opts.grading_decades as usize && mags[m - 3] > 0.0 && mags[m - 1] >= 0.999 * mags[m - 2] && mags[m - 2] >= 0.999 * mags[m - 3] {
            return Err(Error::Divergent("integrand is not integrable at the origin".into()));
        }
        let mut n = 0;
        let (v, l1) = panel(h, 0.0, b, &mut n)?;
        acc.push(v, v.norm());
        acc.l1 += l1;
        acc.nodes += n;
    }
    Ok((acc, bound))
}

/// Laplace integral of the upper-side values of `f` along the positive reals.
pub fn laplace_integral(f: &BranchedFunction, k: Complex64) -> Result<QuadratureResult> {
    laplace_integral_fn(
        |p| {
            let z = Complex64::new(p, 0.0);
            if f.cut.distance(z) <= 1e-14 * p {
                f.eval_unchecked(f.cut.displace(z, Side::Upper))
            } else {
                f.eval_unchecked(z)
            }
        },
        k,
        0.0,
    )
}

/// Laplace integral of a closure sampled on (0, infinity); `growth` bounds the
/// exponential growth rate of `f`.
pub fn laplace_integral_fn<F>(f: F, k: Complex64, growth: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if !(k.re > 0.0) {
        return Err(Error::InvalidParameter(format!("Laplace variable {k} needs Re k > 0")));
    }
    let rate = k.re - growth;
    if !(rate > 0.0) {
        return Err(Error::Divergent(format!("Re k = {} does not exceed the kernel growth rate {growth}", k.re)));
    }
    let opts = HalfLine::new(1.0 / rate, TailDecay::Exponential(rate));
    half_line_integral(|p| Ok((-k * p).exp() * f(p)?), opts)
}

/// Where a bent path begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathStart {
    /// At the origin, leaving along the ray at `start_angle`.
    Origin,
    /// At infinity, coming in along the ray at `start_angle`.
    Infinity,
}

/// Path: ray at angle `start_angle` (from 0 or from infinity) to radius
/// `radius`, circular arc from `start_angle` to angle 0, then out along the
/// positive reals. Arguments are tracked continuously along the path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BentPath {
    pub start: PathStart,
    pub start_angle: f64,
    pub radius: f64,
}

impl BentPath {
    /// From the origin at arg 2 pi, once clockwise, out at arg 0.
    pub fn c1() -> Self {
        BentPath { start: PathStart::Origin, start_angle: 2.0 * PI, radius: 1.0 }
    }

    /// From the origin along the negative reals, half a turn to the positive reals.
    /// `clockwise` picks the turn through the upper half-plane.
    pub fn c(clockwise: bool) -> Self {
        BentPath { start: PathStart::Origin, start_angle: if clockwise { PI } else { -PI }, radius: 1.0 }
    }
}

/// Integral along a bent path. `g` receives the point and its continuous argument.
pub fn bent_path_integral<G>(g: G, path: &BentPath, tail: TailDecay) -> Result<QuadratureResult>
where
    G: Fn(Complex64, f64) -> Result<Complex64>,
{
    if !(path.radius > 0.0 && path.radius.is_finite()) || !path.start_angle.is_finite() {
        return Err(Error::InvalidParameter("bent path needs a positive radius".into()));
    }
    let r = path.radius;
    let phi = path.start_angle;
    // the outgoing ray is nudged off a cut on the positive reals, toward the arc side
    let nudge = 1e-200 * phi.signum();
    let dir_in = Complex64::from_polar(1.0, phi);
    let mut acc = Panels::default();
    let mut extra = 0.0;

    let mut seg = |t: f64| Ok(g(Complex64::from_polar(t, phi), phi)? * dir_in);
    match path.start {
        PathStart::Origin => {
            let mut local = Panels::default();
            let x0 = r * 10f64.powi(-GRADING_DECADES);
            let mut n = 0;
            let (v, l1) = panel(&mut seg, 0.0, x0, &mut n)?;
            local.push(v, v.norm());
            local.l1 += l1;
            local.nodes += n;
            let mut a = x0;
            let mut mags = Vec::new();
            for _ in 0..GRADING_DECADES {
                let before = local.l1;
                adaptive(&mut seg, a, a * 10.0, Tolerance::default(), &mut local)?;
                mags.push(local.l1 - before);
                a *= 10.0;
            }
            if mags[0] > 0.0 && mags[0] >= 0.999 * mags[1] && mags[1] >= 0.999 * mags[2] {
                return Err(Error::Divergent("integrand is not integrable at the origin".into()));
            }
            acc.append(local);
        }
        PathStart::Infinity => {
            let mut shifted = |u: f64| Ok(-seg(r + u)?);
            let mut opts = HalfLine::new(r, tail);
            opts.grade_origin = false;
            let (p, bound) = half_line_panels(&mut shifted, opts)?;
            acc.append(p);
            extra += bound;
        }
    }

    let mut arc = |theta: f64| {
        let p = Complex64::from_polar(r, theta);
        Ok(g(p, theta)? * I * p)
    };
    let pieces = ((phi.abs() / (PI / 4.0)).ceil() as usize).max(1);
    let width = phi / pieces as f64;
    for k in 0..pieces {
        let a = phi - k as f64 * width;
        adaptive(&mut arc, a, a - width, Tolerance::default(), &mut acc)?;
    }

    let mut out = |u: f64| g(Complex64::new(r + u, (r + u) * nudge), 0.0);
    let mut opts = HalfLine::new(r, tail);
    opts.grade_origin = false;
    let (p, bound) = half_line_panels(&mut out, opts)?;
    acc.append(p);
    extra += bound;
    Ok(QuadratureResult::from_panels(&acc, extra))
}

/// Integral over the contour C1 of a function cut along the positive reals
/// (lower-side values on the way in, upper-side values on the way out).
pub fn contour_c1_integral(g: &BranchedFunction, path: &BentPath, tail: TailDecay) -> Result<QuadratureResult> {
    bent_path_integral(|p, _| g.eval_unchecked(p), path, tail)
}

/// Integral over a contour C starting on the negative reals, for a function
/// cut along the negative reals.
pub fn contour_c_integral(g: &BranchedFunction, path: &BentPath, tail: TailDecay) -> Result<QuadratureResult> {
    if (path.start_angle.abs() - PI).abs() > 1e-12 {
        return Err(Error::InvalidParameter("contour C must start on the negative reals".into()));
    }
    bent_path_integral(|p, _| g.eval_unchecked(p), path, tail)
}

/// (1/2 pi i) times the integral of f(s)/s^{n+1} over |s| = r, by the trapezoid rule.
///
/// Nodes double from 64 until two successive estimates agree.
pub fn circle_coeff_integral<F>(f: F, n: u32, r: f64, analyticity_radius: Option<f64>) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter("circle radius must be positive".into()));
    }
    if let Some(rho) = analyticity_radius {
        if r >= rho {
            return Err(Error::InvalidParameter(format!(
                "circle radius {r} exceeds the analyticity radius {rho}"
            )));
        }
    }
    let estimate = |m: usize| circle_trapezoid_l1(&f, n, r, m);
    let mut m = 64usize.max(2 * n as usize + 2);
    let mut prev = estimate(m)?;
    let mut nodes = m;
    loop {
        m *= 2;
        let next = estimate(m)?;
        nodes += m;
        let diff = (next.0 - prev.0).norm();
        if diff <= 1e-15 * next.1.max(next.0.norm()) || m >= 1 << 16 {
            return Ok(QuadratureResult {
                value: next.0,
                error_estimate: diff + 4e-16 * next.1,
                nodes_used: nodes,
            });
        }
        prev = next;
    }
}

/// Trapezoid estimate of the n-th Taylor coefficient from `m` equispaced nodes on |s| = r.
pub fn circle_trapezoid<F>(f: F, n: u32, r: f64, m: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if m == 0 || !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter("circle needs a positive radius and node count".into()));
    }
    circle_trapezoid_l1(&f, n, r, m).map(|v| v.0)
}

fn circle_trapezoid_l1<F>(f: &F, n: u32, r: f64, m: usize) -> Result<(Complex64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut sum = Vec::with_capacity(m);
    let mut l1 = 0.0;
    for j in 0..m {
        let theta = 2.0 * PI * j as f64 / m as f64;
        let w = Complex64::from_polar(1.0, theta);
        let v = f(r * w)? * Complex64::from_polar(r.powi(-(n as i32)), -(n as f64) * theta);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(r * w));
        }
        l1 += v.norm();
        sum.push(v);
    }
    Ok((gauss::pairwise(&sum) / m as f64, l1 / m as f64))
}
