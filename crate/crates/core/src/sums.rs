//! Special sums evaluated as contour integrals, and the summation oracles
//! (direct, Abel limit, optimal truncation) used to check them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    bent_path_integral, half_line_integral, loop_integral_fn, BentPath, HalfLine, LoopContour, PathStart,
    QuadratureResult, TailDecay,
};
use crate::special;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Which integrand is used for sum_n (-1)^n e^{sqrt n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limit1Reading {
    /// (1/(2 sqrt pi)) p^{-3/2} e^{-1/(4p)} / (e^p + 1) on the contour once clockwise around 0.
    Derived,
    /// -(1/(4 sqrt pi)) e^{1/p} p^{3/2} / (e^p + 1) on a loop around the positive reals.
    Printed,
}

impl std::str::FromStr for Limit1Reading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(Limit1Reading::Derived),
            "printed" => Ok(Limit1Reading::Printed),
            _ => Err(Error::InvalidParameter(format!("unknown reading `{s}` (derived|printed)"))),
        }
    }
}

/// Integrand without its constant prefactor; `arg` is the continuous argument of p.
pub fn limit1_integrand(reading: Limit1Reading, p: Complex64, arg: f64) -> Complex64 {
    let lnp = Complex64::new(p.norm().ln(), arg);
    match reading {
        Limit1Reading::Derived => (-1.5 * lnp - 0.25 / p).exp() / (p.exp() + 1.0),
        Limit1Reading::Printed => (1.0 / p + 1.5 * lnp).exp() / (p.exp() + 1.0),
    }
}

/// The boundary sum sum_{n>=1} (-1)^n e^{sqrt n} in the Abel sense.
pub fn eval_limit1(reading: Limit1Reading) -> Result<QuadratureResult> {
    eval_limit1_with(reading, 0.5)
}

/// As `eval_limit1`, with the contour radius (arc radius or loop half-width) given;
/// it must stay below pi, the distance to the poles of 1/(e^p + 1).
pub fn eval_limit1_with(reading: Limit1Reading, radius: f64) -> Result<QuadratureResult> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidParameter("contour radius must lie in (0, 1)".into()));
    }
    let (pref, r) = match reading {
        Limit1Reading::Derived => {
            let path = BentPath { start: PathStart::Origin, start_angle: 2.0 * PI, radius };
            let r = bent_path_integral(|p, arg| Ok(limit1_integrand(reading, p, arg)), &path, TailDecay::Exponential(1.0))?;
            (1.0 / (2.0 * PI.sqrt()), r)
        }
        Limit1Reading::Printed => {
            let contour = LoopContour { epsilon: radius, ..LoopContour::default() };
            let g = |p: Complex64| {
                let arg = crate::complexfn::slit_arg(p);
                Ok(limit1_integrand(reading, p, arg))
            };
            let r = loop_integral_fn(g, &contour, TailDecay::Exponential(1.0))?;
            (-1.0 / (4.0 * PI.sqrt()), r)
        }
    };
    Ok(QuadratureResult { value: pref * r.value, error_estimate: pref.abs() * r.error_estimate, ..r })
}

/// Parabolic cylinder function D_nu(x) for nu < 0 and Re x >= 0, from
/// D_nu(x) = e^{-x^2/4} / Gamma(-nu) * integral_0^inf t^{-nu-1} e^{-x t - t^2/2} dt.
pub fn parabolic_d(nu: f64, x: Complex64) -> Result<QuadratureResult> {
    let (pref_ln, r) = parabolic_d_parts(nu, x)?;
    let pref = (pref_ln - x * x / 4.0).exp();
    Ok(QuadratureResult { value: pref * r.value, error_estimate: pref.norm() * r.error_estimate, ..r })
}

// (-ln Gamma(-nu), the integral)
fn parabolic_d_parts(nu: f64, x: Complex64) -> Result<(Complex64, QuadratureResult)> {
    if !(nu < 0.0) {
        return Err(Error::InvalidParameter(format!("integral form of D_nu needs nu < 0, got {nu}")));
    }
    if x.re < -1e-12 * x.norm() {
        return Err(Error::InvalidParameter(format!("integral form of D_nu needs Re x >= 0, got {x}")));
    }
    let e = -nu - 1.0;
    let h = |t: f64| Ok((e * t.ln() - x * t - 0.5 * t * t).exp());
    let scale = 1.0 / (1.0 + x.norm());
    let r = half_line_integral(h, HalfLine::new(scale, TailDecay::Exponential(1.0)))?;
    Ok((c(-special::gamma_real(-nu).ln()), r))
}

/// sum_{k>=1} e^{i sqrt k} k^{-a}, a > 1/2, as a contour integral with a
/// parabolic cylinder kernel.
pub fn eval_eqsum(a: f64) -> Result<QuadratureResult> {
    if !(a > 0.5 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("the sum converges only for a > 1/2, got {a}")));
    }
    let gamma = Complex64::new(0.0, -1.0);
    let nu = 1.0 - 2.0 * a;
    let pref = 2f64.powf(a - 0.5) / PI.sqrt();
    let path = BentPath { start: PathStart::Origin, start_angle: -PI, radius: 1.0 };
    let inner_err = std::cell::Cell::new(0.0f64);
    let g = |p: Complex64, arg: f64| {
        let lnp = Complex64::new(p.norm().ln(), arg);
        let x = gamma * (-0.5 * (lnp + 2f64.ln())).exp();
        let (lg, d) = parabolic_d_parts(nu, x)?;
        // e^{-gamma^2/(8p)} times the e^{-x^2/4} of D
        let expo = (a - 1.0) * lnp - gamma * gamma / (8.0 * p) - x * x / 4.0 + lg;
        let w = expo.exp() / (p.exp() - 1.0);
        inner_err.set(inner_err.get().max(w.norm() * d.error_estimate));
        Ok(w * d.value)
    };
    let r = bent_path_integral(g, &path, TailDecay::Exponential(1.0))?;
    Ok(QuadratureResult {
        value: pref * r.value,
        error_estimate: pref * (r.error_estimate + 10.0 * inner_err.get()),
        ..r
    })
}

/// sum_{k>=1} e^{i sqrt k} k^{-a} summed directly: terms below n, then an
/// Euler-Maclaurin tail whose integral runs along u = sqrt(n) + i t in the
/// variable u = sqrt x.
pub fn eqsum_direct_oracle(a: f64, n: u64) -> Result<OracleResult> {
    if !(a > 0.5 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("the sum converges only for a > 1/2, got {a}")));
    }
    if n < 100 {
        return Err(Error::InvalidParameter("the Euler-Maclaurin tail needs n >= 100".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    let f = |x: f64| (i * x.sqrt()).exp() * x.powf(-a);
    let dlog = |x: f64| i * (0.5 / x.sqrt()) - a / x;
    let mut s = c(0.0);
    for k in 1..n {
        s += f(k as f64);
    }
    let nf = n as f64;
    let root = nf.sqrt();
    let tail = half_line_integral(
        |t| {
            let u = Complex64::new(root, t);
            Ok(2.0 * i * (i * u).exp() * u.powf(1.0 - 2.0 * a))
        },
        HalfLine { grade_origin: false, ..HalfLine::new(1.0, TailDecay::Exponential(1.0)) },
    )?;
    let fn_ = f(nf);
    let value = s + tail.value + 0.5 * fn_ - fn_ * dlog(nf) / 12.0;
    // first omitted correction, f'''(n)/720, with f' ~ f * dlog
    let omitted = fn_.norm() * dlog(nf).norm().powi(3) / 720.0;
    let error = 2.0 * omitted + tail.error_estimate + 4.0 * f64::EPSILON * nf.sqrt() * s.norm().max(1.0);
    Ok(OracleResult { value, error, terms_used: n })
}

/// Value with an error bound, from one of the oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: Complex64,
    pub error: f64,
    pub terms_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceleration {
    /// Plain partial sums with a geometric remainder bound.
    None,
    /// Polynomial extrapolation of partial sums S_N in 1/N, N = base * 2^i.
    Richardson,
    /// Repeated averaging of consecutive partial sums (alternating-type series).
    EulerTransform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelerationConfig {
    pub method: Acceleration,
    pub levels: usize,
    /// First partial-sum length used by the accelerators.
    pub base: u64,
    pub max_terms: u64,
}

impl Default for AccelerationConfig {
    fn default() -> Self {
        AccelerationConfig { method: Acceleration::None, levels: 6, base: 64, max_terms: 10_000_000 }
    }
}

impl AccelerationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels < 1 {
            return Err(Error::InvalidParameter("acceleration needs at least one level".into()));
        }
        if self.base < 1 {
            return Err(Error::InvalidParameter("base must be at least 1".into()));
        }
        Ok(())
    }
}

/// Value at x = 0 of the polynomial through (xs[i], ys[i]).
pub fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

/// sum_{k>=1} term(k).
pub fn direct_sum_oracle<T>(term: T, config: &AccelerationConfig) -> Result<OracleResult>
where
    T: Fn(u64) -> Complex64,
{
    config.validate()?;
    match config.method {
        Acceleration::None => plain_sum(&term, config.max_terms),
        Acceleration::Richardson => {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            let mut s = Complex64::new(0.0, 0.0);
            let mut k = 0u64;
            let mut estimates = Vec::new();
            for i in 0..=config.levels {
                let n = config.base << i;
                if n > config.max_terms {
                    return Err(Error::NoConvergence { what: "Richardson partial sums".into(), residual: f64::NAN });
                }
                while k < n {
                    k += 1;
                    s += term(k);
                }
                xs.push(1.0 / n as f64);
                ys.push(s);
                estimates.push(neville_at_zero(&xs, &ys));
            }
            let m = estimates.len();
            let value = estimates[m - 1];
            let error = if m >= 2 { (value - estimates[m - 2]).norm() } else { f64::INFINITY };
            Ok(OracleResult { value, error, terms_used: k })
        }
        Acceleration::EulerTransform => {
            let n = config.base + config.levels as u64;
            if n > config.max_terms {
                return Err(Error::NoConvergence { what: "Euler transform partial sums".into(), residual: f64::NAN });
            }
            let mut partial = Vec::new();
            let mut s = Complex64::new(0.0, 0.0);
            for k in 1..=n {
                s += term(k);
                if k >= config.base {
                    partial.push(s);
                }
            }
            let mut prev = partial[partial.len() - 1];
            let mut error = f64::INFINITY;
            while partial.len() > 1 {
                partial = partial.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
                let last = partial[partial.len() - 1];
                error = (last - prev).norm();
                prev = last;
            }
            Ok(OracleResult { value: prev, error, terms_used: n })
        }
    }
}

fn plain_sum(term: &dyn Fn(u64) -> Complex64, max_terms: u64) -> Result<OracleResult> {
    let mut s = Complex64::new(0.0, 0.0);
    let mut small_run = 0;
    let mut prev_mag = f64::NAN;
    let mut ratio: f64 = 0.0;
    for k in 1..=max_terms {
        let t = term(k);
        s += t;
        let mag = t.norm();
        if prev_mag > 0.0 {
            let q = mag / prev_mag;
            ratio = if small_run == 0 { q } else { ratio.max(q) };
        }
        prev_mag = mag;
        if mag <= 1e-17 * s.norm() || mag == 0.0 {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 10 {
            if s.norm() == 0.0 && k < 1000 {
                continue;
            }
            if !(ratio < 0.99) && mag != 0.0 {
                return Err(Error::NoConvergence { what: "direct sum".into(), residual: mag });
            }
            let rest = if mag == 0.0 { 0.0 } else { mag * ratio / (1.0 - ratio) };
            let error = rest + 4.0 * f64::EPSILON * s.norm() * (k as f64).sqrt();
            return Ok(OracleResult { value: s, error, terms_used: k });
        }
    }
    Err(Error::NoConvergence { what: "direct sum".into(), residual: prev_mag })
}

/// Approach to a boundary point of the unit disk: z = target (1 - delta).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelApproach {
    pub target: Complex64,
    pub deltas: Vec<f64>,
}

impl Default for AbelApproach {
    /// z -> -1 over 16 equally spaced delta in [0.05, 0.5].
    fn default() -> Self {
        let deltas = (0..16).map(|i| 0.05 + 0.45 * i as f64 / 15.0).collect();
        AbelApproach { target: Complex64::new(-1.0, 0.0), deltas }
    }
}

/// lim sum term(n) z^n as z approaches the boundary, by polynomial extrapolation in
/// delta; the error is the spread between the full extrapolant and the one through
/// the 3/4 of the points closest to the boundary.
pub fn abel_limit_oracle<T>(term: T, approach: &AbelApproach) -> Result<OracleResult>
where
    T: Fn(u64) -> Complex64,
{
    let n = approach.deltas.len();
    if n < 4 {
        return Err(Error::InvalidParameter("Abel extrapolation needs at least 4 points".into()));
    }
    if (approach.target.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("the Abel target must lie on the unit circle".into()));
    }
    let mut pts: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    let mut terms = 0;
    for &d in &approach.deltas {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::InvalidParameter(format!("delta {d} must lie in (0, 1)")));
        }
        let z = approach.target * (1.0 - d);
        let lnz = z.ln();
        let r = plain_sum(&|k| term(k) * (lnz * k as f64).exp(), 10_000_000)?;
        terms += r.terms_used;
        pts.push((d, r.value));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (xs, ys): (Vec<f64>, Vec<Complex64>) = pts.into_iter().unzip();
    let full = neville_at_zero(&xs, &ys);
    let m = (3 * n) / 4;
    let part = neville_at_zero(&xs[..m], &ys[..m]);
    let error = (full - part).norm();
    if !(error <= 1e-2 * full.norm().max(1.0)) {
        return Err(Error::NoConvergence { what: "Abel extrapolation".into(), residual: error });
    }
    Ok(OracleResult { value: full, error, terms_used: terms })
}

/// Partial sum of sum_{k>=1} f_k k! z^{k+1} up to (not including) its smallest term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub value: Complex64,
    /// |first omitted term|
    pub floor: f64,
    /// Index of the first omitted term.
    pub k_star: u32,
    /// Set when the floor is not small against the value.
    pub low_accuracy: bool,
}

pub fn optimal_truncation_oracle<F>(f: F, z: Complex64) -> Truncation
where
    F: Fn(u32) -> Complex64,
{
    let zabs = z.norm();
    let kmax = if zabs > 0.0 { ((4.0 / zabs).ceil() as u32).saturating_add(50).min(100_000) } else { 50 };
    let lnz = z.ln();
    let mut ln_fact = 0.0;
    let mut terms = Vec::with_capacity(kmax as usize);
    for k in 1..=kmax {
        ln_fact += (k as f64).ln();
        let fk = f(k);
        let t = if fk == Complex64::new(0.0, 0.0) { fk } else { fk * (c(ln_fact) + lnz * (k + 1) as f64).exp() };
        terms.push(t);
    }
    let mut best = 0;
    for (i, t) in terms.iter().enumerate() {
        if t.norm() <= terms[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let value: Complex64 = terms[..best].iter().sum();
    let floor = terms[best].norm();
    Truncation {
        value,
        floor,
        k_star: best as u32 + 1,
        low_accuracy: best < 2 || floor > 1e-2 * value.norm(),
    }
}
