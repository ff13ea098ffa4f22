use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of a cut to approach from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
    Off,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upper" | "u" | "+" => Ok(Side::Upper),
            "lower" | "l" | "-" => Ok(Side::Lower),
            "off" | "none" => Ok(Side::Off),
            _ => Err(Error::InvalidParameter(format!("unknown side `{s}`"))),
        }
    }
}

/// Branch tag carried by every multivalued node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// arg in (-pi, pi]
    Principal,
    /// Cut along the positive reals, arg in [0, 2pi).
    Slit,
}

/// Argument in [0, 2pi).
pub fn slit_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

pub fn arg(z: Complex64, branch: Branch) -> f64 {
    match branch {
        Branch::Principal => z.arg(),
        Branch::Slit => slit_arg(z),
    }
}

pub fn ln(z: Complex64, branch: Branch) -> Complex64 {
    Complex64::new(z.norm().ln(), arg(z, branch))
}

pub fn sqrt(z: Complex64, branch: Branch) -> Complex64 {
    match branch {
        Branch::Principal => z.sqrt(),
        Branch::Slit => Complex64::from_polar(z.norm().sqrt(), 0.5 * slit_arg(z)),
    }
}

/// base^exponent = exp(exponent * ln base) on the given branch; 0^w = 0 for Re w > 0.
pub fn pow(base: Complex64, exponent: Complex64, branch: Branch) -> Complex64 {
    if base == Complex64::new(0.0, 0.0) {
        if exponent == Complex64::new(0.0, 0.0) {
            return Complex64::new(1.0, 0.0);
        }
        if exponent.re > 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        return Complex64::new(f64::INFINITY, 0.0);
    }
    (exponent * ln(base, branch)).exp()
}

/// A ray `origin + t * direction`, t >= 0, with unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub origin: Complex64,
    pub direction: Complex64,
}

impl Cut {
    pub fn new(origin: Complex64, direction: Complex64) -> Result<Self> {
        let n = direction.norm();
        if !(n.is_finite() && n > 0.0) || !origin.re.is_finite() || !origin.im.is_finite() {
            return Err(Error::InvalidParameter("cut direction must be a nonzero finite number".into()));
        }
        Ok(Cut { origin, direction: direction / n })
    }

    pub fn positive_real() -> Self {
        Cut { origin: Complex64::new(0.0, 0.0), direction: Complex64::new(1.0, 0.0) }
    }

    /// The ray from `a` radially outward to infinity.
    pub fn outward_from(a: Complex64) -> Result<Self> {
        Cut::new(a, a)
    }

    pub fn tolerance(point: Complex64) -> f64 {
        1e-12 * (1.0 + point.norm())
    }

    /// Euclidean distance from `point` to the ray.
    pub fn distance(&self, point: Complex64) -> f64 {
        let rel = (point - self.origin) * self.direction.conj();
        if rel.re <= 0.0 {
            rel.norm()
        } else {
            rel.im.abs()
        }
    }

    pub fn contains(&self, point: Complex64) -> bool {
        self.distance(point) < Cut::tolerance(point)
    }

    pub fn is_branch_point(&self, point: Complex64) -> bool {
        (point - self.origin).norm() < Cut::tolerance(point)
    }

    /// Moves a point that lies on the cut a tiny distance to the requested side.
    /// Upper is the left side looking outward along the ray.
    pub fn displace(&self, point: Complex64, side: Side) -> Complex64 {
        let rel = (point - self.origin) * self.direction.conj();
        let delta = 1e-100 * (1.0 + point.norm());
        let sign = match side {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
            Side::Off => return point,
        };
        // snap onto the ray first so the displacement decides the side
        let on_ray = Complex64::new(rel.re, sign * delta);
        self.origin + on_ray * self.direction
    }
}
