//! Special functions needed by the kernels, in double precision.

use std::f64::consts::PI;

use num_complex::Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Gamma(z) for Re z >= 0.5, via Lanczos.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.round() {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        PI / ((PI * z).sin() * gamma(1.0 - z))
    } else {
        ln_gamma_right(z).exp()
    }
}

/// 1/Gamma(z), entire.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        (PI * z).sin() * ln_gamma_right(1.0 - z).exp() / PI
    } else {
        rgamma_right(z)
    }
}

fn rgamma_right(z: Complex64) -> Complex64 {
    (-ln_gamma_right(z)).exp()
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

/// w - ln(1+w), accurate for small w.
pub fn w_minus_ln1p(w: Complex64) -> Complex64 {
    if w.norm() < 0.1 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pw = w * w;
        for k in 2..40 {
            let term = pw / k as f64;
            sum += if k % 2 == 0 { term } else { -term };
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
            pw *= w;
        }
        sum
    } else {
        w - (1.0 + w).ln()
    }
}

/// e^{-x} Ei(x) for real x > 0.
pub fn ei_scaled(x: f64) -> f64 {
    assert!(x > 0.0, "ei_scaled needs x > 0");
    if x <= 40.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..400 {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        (EULER_GAMMA + x.ln() + sum) * (-x).exp()
    } else {
        let mut sum = 0.0;
        let mut term = 1.0 / x;
        let mut k = 1.0;
        loop {
            sum += term;
            let next = term * k / x;
            if next < 1e-17 * sum || next > term {
                break;
            }
            term = next;
            k += 1.0;
        }
        sum
    }
}

/// Exponential integral Ei(x), principal value, real x != 0.
pub fn ei(x: f64) -> f64 {
    if x > 0.0 {
        if x > 700.0 {
            return f64::INFINITY;
        }
        ei_scaled(x) * x.exp()
    } else {
        -e1(-x)
    }
}

/// E1(x) for real x > 0.
pub fn e1(x: f64) -> f64 {
    assert!(x > 0.0, "e1 needs x > 0");
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..100 {
            term *= -x / k as f64;
            sum += term / k as f64;
            if term.abs() < 1e-18 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // modified Lentz on the continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}
