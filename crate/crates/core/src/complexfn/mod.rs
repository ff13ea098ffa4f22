//! Complex functions on a slit plane and the kernel expression language.

mod branch;
mod expr;
mod parser;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

pub use branch::{arg, ln, pow, slit_arg, sqrt, Branch, Cut, Side};
pub use expr::{Builtin, Expr};
pub use parser::parse_expr;

use crate::error::{Error, Result};

type NativeFn = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

#[derive(Clone)]
pub enum Body {
    Expr(Expr),
    Native { name: String, f: Arc<NativeFn> },
}

impl fmt::Debug for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::Expr(e) => write!(f, "Expr({e})"),
            Body::Native { name, .. } => write!(f, "Native({name})"),
        }
    }
}

/// A function on the plane slit along `cut`.
#[derive(Debug, Clone)]
pub struct BranchedFunction {
    pub body: Body,
    pub cut: Cut,
}

impl BranchedFunction {
    pub fn from_expr(expr: Expr, cut: Cut) -> Self {
        BranchedFunction { body: Body::Expr(expr), cut }
    }

    pub fn parse(src: &str, cut: Cut) -> Result<Self> {
        Ok(Self::from_expr(parse_expr(src)?, cut))
    }

    pub fn native<F>(name: impl Into<String>, cut: Cut, f: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        BranchedFunction { body: Body::Native { name: name.into(), f: Arc::new(f) }, cut }
    }

    fn raw(&self, z: Complex64) -> Result<Complex64> {
        match &self.body {
            Body::Expr(e) => e.eval(z),
            Body::Native { f, .. } => f(z),
        }
    }

    /// Evaluates at `point`; on the cut, `side` picks the one-sided limit.
    pub fn eval(&self, point: Complex64, side: Side) -> Result<Complex64> {
        if self.cut.is_branch_point(point) {
            return Err(Error::BranchPoint(point));
        }
        if self.cut.contains(point) {
            if side == Side::Off {
                return Err(Error::SideRequired(point));
            }
            return self.raw(self.cut.displace(point, side));
        }
        self.raw(point)
    }

    /// Evaluates without any cut classification; for quadrature nodes known to be off the cut.
    pub fn eval_unchecked(&self, point: Complex64) -> Result<Complex64> {
        self.raw(point)
    }
}

/// Free-function form of [`BranchedFunction::eval`].
pub fn eval_branched(f: &BranchedFunction, point: Complex64, side: Side) -> Result<Complex64> {
    f.eval(point, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sqrt_sides() {
        let f = BranchedFunction::parse("sqrt_slit(p)", Cut::positive_real()).unwrap();
        let up = f.eval(c(4.0, 0.0), Side::Upper).unwrap();
        let lo = f.eval(c(4.0, 0.0), Side::Lower).unwrap();
        assert!((up - c(2.0, 0.0)).norm() < 1e-15);
        assert!((lo - c(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ln_lower_side() {
        let f = BranchedFunction::parse("ln_slit(p)", Cut::positive_real()).unwrap();
        let lo = f.eval(c(3.0, 0.0), Side::Lower).unwrap();
        assert!((lo - c(3f64.ln(), 2.0 * PI)).norm() < 1e-14);
    }

    #[test]
    fn errors() {
        let f = BranchedFunction::parse("sqrt_slit(p)", Cut::positive_real()).unwrap();
        assert!(matches!(f.eval(c(0.0, 0.0), Side::Upper), Err(Error::BranchPoint(_))));
        assert!(matches!(f.eval(c(1.0, 0.0), Side::Off), Err(Error::SideRequired(_))));
    }
}
