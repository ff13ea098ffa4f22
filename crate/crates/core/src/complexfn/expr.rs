use std::fmt;

use num_complex::Complex64;

use super::branch::{self, Branch};
use crate::error::{Error, Result};
use crate::kernels;

/// Named built-in functions callable from the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Inverse-Laplace kernel of 1/Gamma(k+1) scaled by e^k.
    StirlingG,
    Gamma,
    RecipGamma,
    /// Coefficient kernel of sum z^k / (k^pi + ln k).
    F2Kernel,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::StirlingG, Builtin::Gamma, Builtin::RecipGamma, Builtin::F2Kernel];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::StirlingG => "stirling_g",
            Builtin::Gamma => "gamma",
            Builtin::RecipGamma => "rgamma",
            Builtin::F2Kernel => "f2_kernel",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn eval(self, z: Complex64) -> Result<Complex64> {
        match self {
            Builtin::StirlingG => kernels::stirling_g(z),
            Builtin::Gamma => Ok(crate::special::gamma(z)),
            Builtin::RecipGamma => Ok(crate::special::rgamma(z)),
            Builtin::F2Kernel => kernels::f2_kernel(z),
        }
    }
}

/// Expression tree in the single variable `p`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Pi,
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>, Branch),
    Exp(Box<Expr>),
    Ln(Box<Expr>, Branch),
    Sqrt(Box<Expr>, Branch),
    Call(Builtin, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, p: Complex64) -> Result<Complex64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Pi => Complex64::new(std::f64::consts::PI, 0.0),
            Expr::Var => p,
            Expr::Neg(a) => negate(a.eval(p)?),
            Expr::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Expr::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Expr::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Expr::Div(a, b) => a.eval(p)? / b.eval(p)?,
            Expr::Pow(a, b, br) => branch::pow(a.eval(p)?, b.eval(p)?, *br),
            Expr::Exp(a) => a.eval(p)?.exp(),
            Expr::Ln(a, br) => branch::ln(a.eval(p)?, *br),
            Expr::Sqrt(a, br) => branch::sqrt(a.eval(p)?, *br),
            Expr::Call(f, a) => f.eval(a.eval(p)?)?,
        })
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::Var => 1,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Ln(a, _) | Expr::Sqrt(a, _) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b, _) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// True if the tree does not mention `p`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Var => false,
            Expr::Const(_) | Expr::Pi => true,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Ln(a, _) | Expr::Sqrt(a, _) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b, _) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    /// True if any node is tagged with the slit branch.
    pub fn has_slit(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::Var => false,
            Expr::Ln(a, br) | Expr::Sqrt(a, br) => *br == Branch::Slit || a.has_slit(),
            Expr::Pow(a, b, br) => *br == Branch::Slit || a.has_slit() || b.has_slit(),
            Expr::Neg(a) | Expr::Exp(a) | Expr::Call(_, a) => a.has_slit(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.has_slit() || b.has_slit(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }
}

pub(crate) fn fmt_real(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:?}")
    }
}

/// Value of a literal, possibly under negations.
/// -c with zero parts kept at +0, so that a negated real literal stays on the
/// upper side of the principal cuts.
pub(crate) fn negate(c: Complex64) -> Complex64 {
    Complex64::new(-c.re + 0.0, -c.im + 0.0)
}

fn literal(e: &Expr) -> Option<Complex64> {
    match e {
        Expr::Const(c) => Some(*c),
        Expr::Neg(a) => literal(a).map(negate),
        _ => None,
    }
}

fn fmt_const(c: Complex64) -> String {
    if c.im == 0.0 {
        if c.re < 0.0 {
            format!("({})", fmt_real(c.re))
        } else {
            fmt_real(c.re)
        }
    } else if c.re == 0.0 {
        if c.im < 0.0 {
            format!("({}i)", fmt_real(c.im))
        } else {
            format!("{}i", fmt_real(c.im))
        }
    } else if c.im < 0.0 {
        format!("({}-{}i)", fmt_real(c.re), fmt_real(-c.im))
    } else {
        format!("({}+{}i)", fmt_real(c.re), fmt_real(c.im))
    }
}

fn call_name(base: &str, br: Branch) -> String {
    match br {
        Branch::Principal => base.to_string(),
        Branch::Slit => format!("{base}_slit"),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, paren: bool| if paren { format!("({e})") } else { e.to_string() };
        match self {
            Expr::Const(c) => write!(f, "{}", fmt_const(*c)),
            Expr::Pi => write!(f, "pi"),
            Expr::Var => write!(f, "p"),
            // the parser folds a negated literal into the literal
            Expr::Neg(_) if literal(self).is_some() => write!(f, "{}", fmt_const(literal(self).unwrap())),
            Expr::Neg(a) => write!(f, "-{}", wrap(a, a.precedence() < 3)),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, prec) = match self {
                    Expr::Add(..) => ('+', 1),
                    Expr::Sub(..) => ('-', 1),
                    Expr::Mul(..) => ('*', 2),
                    _ => ('/', 2),
                };
                write!(f, "{}{}{}", wrap(a, a.precedence() < prec), op, wrap(b, b.precedence() <= prec))
            }
            Expr::Pow(a, b, br) => write!(f, "{}({a},{b})", call_name("pow", *br)),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Ln(a, br) => write!(f, "{}({a})", call_name("ln", *br)),
            Expr::Sqrt(a, br) => write!(f, "{}({a})", call_name("sqrt", *br)),
            Expr::Call(b, a) => write!(f, "{}({a})", b.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        super::parser::parse_expr(s)
    }
}
