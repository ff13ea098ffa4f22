//! Built-in coefficient kernels F(p), stored in Laplace convention:
//! the coefficient generated at index k is the Laplace transform of F at k.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::complexfn::{self, Branch, BranchedFunction, Cut, Expr};
use crate::error::{Error, Result};
use crate::quadrature::{
    bent_path_integral, laplace_integral_fn, loop_integral_fn, BentPath, LoopContour, PathStart,
    QuadratureResult, TailDecay,
};
use crate::special::{self, w_minus_ln1p};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A coefficient kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelId {
    /// p^{beta-1}/Gamma(beta); coefficients k^{-beta}.
    PowerLaw(Complex64),
    /// Coefficients k!/k^{k+1} e^k.
    StirlingG,
    /// Coefficients e^{-gamma sqrt k}.
    ExpSqrtDecay(Complex64),
    /// Coefficients e^{c sqrt k}, c > 0.
    ExpSqrtGrowth(f64),
    /// Coefficients 1/(k^pi + ln k).
    F2Nested,
    /// Coefficients 1/Gamma(k).
    ReciprocalGamma,
    /// User kernel given as an expression, analytic on the positive reals.
    Expr { expr: Expr, cut: Cut, growth: f64 },
}

fn parse_constant(src: &str) -> Result<Complex64> {
    let src = src.replace('\u{2212}', "-");
    let e = complexfn::parse_expr(&src)?;
    if !e.is_constant() {
        return Err(Error::InvalidParameter(format!("kernel parameter `{src}` must be a constant")));
    }
    e.eval(Complex64::new(0.0, 0.0))
}

impl KernelId {
    /// Parses names like `power_law:0.5`, `stirling_g`, `exp_sqrt:-1`, `f2`, `recip_gamma`.
    pub fn from_name(name: &str) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (name.trim(), None),
        };
        let need = || arg.ok_or_else(|| Error::Model(format!("kernel `{head}` needs a parameter, e.g. `{head}:1`")));
        let k = match head {
            "power_law" => KernelId::PowerLaw(parse_constant(need()?)?),
            "exp_sqrt" => {
                let g = parse_constant(need()?)?;
                if g.re < 0.0 && g.im == 0.0 {
                    KernelId::ExpSqrtGrowth(-g.re)
                } else {
                    KernelId::ExpSqrtDecay(g)
                }
            }
            "stirling_g" | "f2" | "recip_gamma" if arg.is_some() => {
                return Err(Error::Model(format!("kernel `{head}` takes no parameter")))
            }
            "stirling_g" => KernelId::StirlingG,
            "f2" => KernelId::F2Nested,
            "recip_gamma" => KernelId::ReciprocalGamma,
            _ => return Err(Error::Model(format!("unknown kernel name `{name}`"))),
        };
        k.validate()?;
        Ok(k)
    }

    /// Canonical name, or None for expression kernels.
    pub fn name(&self) -> Option<String> {
        let fmt = |z: Complex64| {
            let e = Expr::Const(z).to_string();
            e.trim_start_matches('(').trim_end_matches(')').to_string()
        };
        Some(match self {
            KernelId::PowerLaw(b) => format!("power_law:{}", fmt(*b)),
            KernelId::StirlingG => "stirling_g".into(),
            KernelId::ExpSqrtDecay(g) => format!("exp_sqrt:{}", fmt(*g)),
            KernelId::ExpSqrtGrowth(cc) => format!("exp_sqrt:{}", fmt(c(-cc))),
            KernelId::F2Nested => "f2".into(),
            KernelId::ReciprocalGamma => "recip_gamma".into(),
            KernelId::Expr { .. } => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelId::PowerLaw(b) if !(b.re > 0.0) => {
                Err(Error::InvalidParameter(format!("power law needs Re beta > 0, got {b}")))
            }
            KernelId::ExpSqrtDecay(g) if !(g.re > 0.0) => {
                Err(Error::InvalidParameter(format!("exp-sqrt decay needs Re gamma > 0, got {g}")))
            }
            KernelId::ExpSqrtGrowth(cc) if !(*cc > 0.0 && cc.is_finite()) => {
                Err(Error::InvalidParameter(format!("exp-sqrt growth needs c > 0, got {cc}")))
            }
            KernelId::Expr { growth, .. } if !growth.is_finite() => {
                Err(Error::InvalidParameter("kernel growth rate must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Whether F(p) is available pointwise along rays in the right half-plane.
    pub fn has_density(&self) -> bool {
        match self {
            KernelId::ExpSqrtGrowth(_) | KernelId::ReciprocalGamma => false,
            KernelId::ExpSqrtDecay(g) => (g * g).re > 0.0,
            _ => true,
        }
    }

    /// F(p) at a point off the kernel's own cut.
    pub fn density(&self, p: Complex64) -> Result<Complex64> {
        match self {
            KernelId::PowerLaw(b) => Ok(complexfn::pow(p, b - 1.0, Branch::Principal) * special::rgamma(*b)),
            KernelId::StirlingG => stirling_g(p),
            KernelId::ExpSqrtDecay(g) => Ok(exp_sqrt_density(*g, p, p.arg())),
            KernelId::F2Nested => f2_kernel(p),
            KernelId::Expr { expr, .. } => expr.eval(p),
            KernelId::ExpSqrtGrowth(_) | KernelId::ReciprocalGamma => Err(Error::Unsupported(format!(
                "kernel `{}` has no pointwise density",
                self.name().unwrap_or_default()
            ))),
        }
    }

    /// Exponential growth rate of F along the positive reals.
    pub fn growth_rate(&self) -> f64 {
        match self {
            KernelId::F2Nested => f2_zeros().growth,
            KernelId::Expr { growth, .. } => *growth,
            _ => 0.0,
        }
    }

    /// Tail class used when integrating against this kernel.
    pub fn default_decay(&self) -> TailDecay {
        TailDecay::Exponential(1.0 - self.growth_rate().min(0.9))
    }

    /// The kernel as a branched function (cut along the negative reals unless declared).
    pub fn branched(&self) -> Result<BranchedFunction> {
        let cut = match self {
            KernelId::Expr { cut, .. } => *cut,
            _ => Cut::new(Complex64::new(0.0, 0.0), c(-1.0))?,
        };
        let k = self.clone();
        Ok(BranchedFunction::native(self.name().unwrap_or_else(|| "expr".into()), cut, move |p| k.density(p)))
    }

    /// A function whose jump across the positive reals is F, when one is known in closed form.
    pub fn loop_density(&self, p: Complex64) -> Option<Complex64> {
        self.loop_density_fn().map(|d| d.eval(p))
    }

    /// `loop_density` with its constants computed once.
    pub fn loop_density_fn(&self) -> Option<LoopDensity> {
        match self {
            KernelId::PowerLaw(b) => {
                let bm1 = b - 1.0;
                if bm1.im == 0.0 && bm1.re == bm1.re.round() {
                    Some(LoopDensity { exponent: bm1, factor: -special::rgamma(*b) / (2.0 * PI * I), log: true })
                } else {
                    let denom = special::gamma(*b) * (1.0 - (2.0 * PI * I * bm1).exp());
                    Some(LoopDensity { exponent: bm1, factor: 1.0 / denom, log: false })
                }
            }
            _ => None,
        }
    }

    /// The coefficient this kernel generates at index k, before the a^{-k} factor.
    pub fn coefficient(&self, k: Complex64) -> Result<QuadratureResult> {
        match self {
            KernelId::ExpSqrtGrowth(cc) => exp_sqrt_growth_coefficient_c(k, *cc),
            KernelId::ReciprocalGamma => reciprocal_gamma(k),
            KernelId::ExpSqrtDecay(g) if (g * g).re <= 0.0 => exp_sqrt_rotated(*g, k),
            _ => {
                let growth = self.growth_rate();
                laplace_integral_fn(|p| self.density(c(p)), k, growth)
            }
        }
    }

    /// Closed form of the generated coefficient, where one exists.
    pub fn closed_form(&self, k: f64) -> Option<Complex64> {
        match self {
            KernelId::PowerLaw(b) => Some(complexfn::pow(c(k), -b, Branch::Principal)),
            KernelId::StirlingG => Some(c((special::gamma_real(k + 1.0).ln() - (k + 1.0) * k.ln() + k).exp())),
            KernelId::ExpSqrtDecay(g) => Some((-g * k.sqrt()).exp()),
            KernelId::ExpSqrtGrowth(cc) => Some(c((cc * k.sqrt()).exp())),
            KernelId::F2Nested => Some(c(1.0 / (k.powf(PI) + k.ln()))),
            KernelId::ReciprocalGamma => Some(special::rgamma(c(k))),
            KernelId::Expr { .. } => None,
        }
    }
}

/// factor * p^exponent on the slit plane, times ln p when `log` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopDensity {
    exponent: Complex64,
    factor: Complex64,
    log: bool,
}

impl LoopDensity {
    pub fn eval(&self, p: Complex64) -> Complex64 {
        let v = self.factor * complexfn::pow(p, self.exponent, Branch::Slit);
        if self.log {
            v * complexfn::ln(p, Branch::Slit)
        } else {
            v
        }
    }
}

/// p^{beta-1}/Gamma(beta) with the principal branch.
pub fn power_law_kernel(beta: Complex64) -> Result<BranchedFunction> {
    KernelId::PowerLaw(beta).validate()?;
    KernelId::PowerLaw(beta).branched()
}

/// Both inverse branches of s - ln s = 1 + p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirlingRoots {
    /// Branch continuing (0, 1) from positive real p.
    pub s1: Complex64,
    /// Branch continuing (1, infinity).
    pub s2: Complex64,
    /// Largest relative Newton residual of the two.
    pub residual: f64,
}

fn newton(
    what: &str,
    mut x: Complex64,
    scale: f64,
    f: impl Fn(Complex64) -> (Complex64, Complex64),
) -> Result<(Complex64, f64)> {
    for _ in 0..60 {
        let (v, d) = f(x);
        let step = v / d;
        x -= step;
        if !(x.re.is_finite() && x.im.is_finite()) {
            break;
        }
        if step.norm() <= 1e-15 * x.norm() {
            break;
        }
    }
    let residual = f(x).0.norm() / scale;
    if !(residual <= 1e-12) {
        return Err(Error::NoConvergence { what: what.into(), residual });
    }
    Ok((x, residual))
}

// w = s - 1 on the branch through s = 1
fn newton_w(p: Complex64, w0: Complex64) -> Result<(Complex64, f64)> {
    newton("Stirling inverse (w)", w0, p.norm(), |w| (w_minus_ln1p(w) - p, w / (1.0 + w)))
}

// u = ln s for the small branch away from s = 1
fn newton_u(p: Complex64, u0: Complex64) -> Result<(Complex64, f64)> {
    newton("Stirling inverse (u)", u0, p.norm(), |u| {
        let e = u.exp();
        (e - u - 1.0 - p, e - 1.0)
    })
}

fn w_series(sigma: Complex64) -> Complex64 {
    let s2 = sigma * sigma;
    sigma + s2 / 3.0 + s2 * sigma / 36.0 - s2 * s2 / 270.0
}

pub fn stirling_roots(p: Complex64) -> Result<StirlingRoots> {
    let (w2, w1, s1, residual) = stirling_w(p)?;
    debug_assert!((s1 - 1.0 - w1).norm() <= 1e-12 * (1.0 + w1.norm()));
    Ok(StirlingRoots { s1, s2: 1.0 + w2, residual })
}

fn expm1(u: Complex64) -> Complex64 {
    if u.norm() > 0.5 {
        return u.exp() - 1.0;
    }
    let h = 0.5 * u;
    2.0 * h.exp() * h.sinh()
}

// (s2 - 1, s1 - 1, s1, residual); s1 is returned separately because 1 + (s1 - 1)
// loses its relative accuracy once s1 is small
fn stirling_w(p: Complex64) -> Result<(Complex64, Complex64, Complex64, f64)> {
    let r = p.norm();
    if r == 0.0 {
        return Err(Error::BranchPoint(p));
    }
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite argument {p}")));
    }
    let near = |q: Complex64| -> Result<(Complex64, Complex64, f64)> {
        let sigma = (2.0 * q).sqrt();
        let (w2, r2) = newton_w(q, w_series(sigma))?;
        let (w1, r1) = newton_w(q, w_series(-sigma))?;
        Ok((w2, w1, r1.max(r2)))
    };
    if r < 0.1 {
        let (w2, w1, res) = near(p)?;
        return Ok((w2, w1, 1.0 + w1, res));
    }
    let (w2, u1, residual) = if r > 10.0 {
        let (w2, r2) = newton_w(p, p + (1.0 + p).ln())?;
        let (u1, r1) = newton_u(p, -1.0 - p)?;
        (w2, u1, r1.max(r2))
    } else {
        let dir = p / r;
        let (mut w2, w1, _) = near(0.1 * dir)?;
        let mut u1 = (1.0 + w1).ln();
        let mut q = 0.1;
        let mut res = 0.0;
        while q < r {
            q = (q * 1.3).min(r);
            let pq = if q == r { p } else { q * dir };
            let (a, ra) = newton_w(pq, w2)?;
            let (b, rb) = newton_u(pq, u1)?;
            w2 = a;
            u1 = b;
            res = ra.max(rb);
        }
        (w2, u1, res)
    };
    Ok((w2, expm1(u1), u1.exp(), residual))
}

/// G(p) = s2'(1+p) - s1'(1+p) with s' = s/(s-1).
pub fn stirling_g(p: Complex64) -> Result<Complex64> {
    // s/(s-1) = 1 + 1/w
    let (w2, w1, _, _) = stirling_w(p)?;
    Ok(1.0 / w2 - 1.0 / w1)
}

fn exp_sqrt_density(gamma: Complex64, p: Complex64, arg: f64) -> Complex64 {
    let lnp = Complex64::new(p.norm().ln(), arg);
    gamma / (2.0 * PI.sqrt()) * (-1.5 * lnp - gamma * gamma / (4.0 * p)).exp()
}

/// (gamma/(2 sqrt pi)) p^{-3/2} e^{-gamma^2/(4p)}.
pub fn exp_sqrt_decay_kernel(gamma: Complex64) -> Result<BranchedFunction> {
    KernelId::ExpSqrtDecay(gamma).validate()?;
    let cut = Cut::new(Complex64::new(0.0, 0.0), c(-1.0))?;
    Ok(BranchedFunction::native("exp_sqrt", cut, move |p| Ok(exp_sqrt_density(gamma, p, p.arg()))))
}

// Laplace transform along a path leaving the origin where gamma^2/p is real positive.
fn exp_sqrt_rotated(gamma: Complex64, k: Complex64) -> Result<QuadratureResult> {
    if !(k.re > 0.0) {
        return Err(Error::InvalidParameter(format!("Laplace variable {k} needs Re k > 0")));
    }
    let path = BentPath {
        start: PathStart::Origin,
        start_angle: 2.0 * gamma.arg(),
        radius: gamma.norm() / (2.0 * k.norm().sqrt()),
    };
    bent_path_integral(
        |p, arg| Ok((-k * p).exp() * exp_sqrt_density(gamma, p, arg)),
        &path,
        TailDecay::Exponential(k.re),
    )
}

/// e^{sqrt n} through an integral over the contour C1.
pub fn exp_sqrt_growth_coefficient(n: f64) -> Result<QuadratureResult> {
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter(format!("index {n} must be at least 1")));
    }
    exp_sqrt_growth_coefficient_c(c(n), 1.0)
}

fn exp_sqrt_growth_coefficient_c(n: Complex64, cc: f64) -> Result<QuadratureResult> {
    if !(n.re > 0.0) {
        return Err(Error::InvalidParameter(format!("index {n} needs a positive real part")));
    }
    let path = BentPath { start: PathStart::Origin, start_angle: 2.0 * PI, radius: cc / (2.0 * n.norm().sqrt()) };
    let pref = -cc / (2.0 * PI.sqrt());
    let r = bent_path_integral(
        |p, arg| {
            let lnp = Complex64::new(p.norm().ln(), arg);
            Ok((-1.5 * lnp - cc * cc / (4.0 * p) - n * p).exp())
        },
        &path,
        TailDecay::Exponential(n.re),
    )?;
    Ok(QuadratureResult { value: pref * r.value, error_estimate: pref.abs() * r.error_estimate, ..r })
}

struct F2Zeros {
    roots: Vec<Complex64>,
    growth: f64,
}

fn f2_zeros() -> &'static F2Zeros {
    static ZEROS: OnceLock<F2Zeros> = OnceLock::new();
    ZEROS.get_or_init(|| {
        let seeds = [
            Complex64::new(0.710_521_538_2, 0.0),
            Complex64::new(0.110_384_977_2, 1.127_134_245_1),
            Complex64::new(0.110_384_977_2, -1.127_134_245_1),
        ];
        let roots: Vec<Complex64> = seeds
            .iter()
            .map(|&x0| {
                let mut x = x0;
                for _ in 0..50 {
                    let f = x.powf(PI) + x.ln();
                    let d = PI * x.powf(PI - 1.0) + 1.0 / x;
                    let step = f / d;
                    x -= step;
                    if step.norm() < 1e-16 {
                        break;
                    }
                }
                x
            })
            .collect();
        let growth = roots.iter().map(|x| x.re).fold(f64::MIN, f64::max);
        F2Zeros { roots, growth }
    })
}

/// Inverse Laplace transform of 1/(k^pi + ln k): residues at the zeros of
/// x^pi + ln x plus a loop integral over the cut of the denominator.
pub fn f2_kernel(p: Complex64) -> Result<Complex64> {
    if !(p.re > 0.0) {
        return Err(Error::InvalidParameter(format!("f2 kernel needs Re p > 0, got {p}")));
    }
    let zeros = f2_zeros();
    let mut residues = Complex64::new(0.0, 0.0);
    for &x in &zeros.roots {
        residues += (x * p).exp() / (PI * x.powf(PI - 1.0) + 1.0 / x);
    }
    let reach = 45.0 / p.re;
    let (tail_length, tail) = if reach <= 1e6 {
        (reach.max(40.0), TailDecay::Exponential(p.re))
    } else {
        (1e6, TailDecay::Algebraic(PI))
    };
    let contour = LoopContour { tail_length, ..LoopContour::default() };
    let g = |u: Complex64| {
        let m = -u;
        Ok((-u * p).exp() / (m.powf(PI) + m.ln()))
    };
    let r = loop_integral_fn(g, &contour, tail)?;
    Ok(residues + r.value / (2.0 * PI * I))
}

/// 1/Gamma(z) from the Hankel loop integral of s^{-z} e^{-s}.
pub fn reciprocal_gamma(z: Complex64) -> Result<QuadratureResult> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::InvalidParameter(format!("{z} is a pole of Gamma")));
    }
    // scale s = cc s' to keep the loop well conditioned for large |z|
    let cc = z.norm().max(1.0);
    let contour = LoopContour { epsilon: 0.5, tail_length: (45.0 / cc).max(5.5), ..LoopContour::default() };
    let g = |s: Complex64| Ok((-z * complexfn::ln(s, Branch::Slit) - cc * s).exp());
    let r = loop_integral_fn(g, &contour, TailDecay::Exponential(cc))?;
    let pref = -I * (PI * I * z).exp() / (2.0 * PI) * c(cc).powc(1.0 - z);
    Ok(QuadratureResult { value: pref * r.value, error_estimate: pref.norm() * r.error_estimate, ..r })
}
