//! Coefficient models: singularity locations paired with kernels, and their
//! `.resum.json` file format.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexfn::{parse_expr, Cut};
use crate::error::{Error, Result};
use crate::kernels::KernelId;
use crate::quadrature::{QuadratureResult, TailDecay};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// f(z) = f0 + sum f_k z^k with finite radius of convergence.
    FiniteRadius,
    /// f(z) = sum f_k z^k / k!, entire.
    Entire,
    /// sum f_k k! z^{k+1}, divergent; summed in the Borel sense.
    Borel,
}

/// One singularity location with its kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTerm {
    pub a: Complex64,
    pub kernel: KernelId,
    pub decay: TailDecay,
}

/// Coefficients f_k = sum_j a_j^{-k} L[F_j](k), k >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientModel {
    pub kind: ModelKind,
    pub f0: Complex64,
    pub terms: Vec<SingularTerm>,
}

impl CoefficientModel {
    pub fn new(kind: ModelKind, f0: Complex64, terms: Vec<SingularTerm>) -> Result<Self> {
        let m = CoefficientModel { kind, f0, terms };
        m.validate()?;
        Ok(m)
    }

    /// One-term model with the kernel's default tail class.
    pub fn single(kind: ModelKind, a: Complex64, kernel: KernelId) -> Result<Self> {
        let decay = kernel.default_decay();
        Self::new(kind, Complex64::new(0.0, 0.0), vec![SingularTerm { a, kernel, decay }])
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::Model("a model needs at least one term".into()));
        }
        if !(self.f0.re.is_finite() && self.f0.im.is_finite()) {
            return Err(Error::Model("f0 must be finite".into()));
        }
        if self.kind != ModelKind::FiniteRadius && self.f0 != Complex64::new(0.0, 0.0) {
            return Err(Error::Model("f0 is only meaningful for finite_radius models".into()));
        }
        for (j, t) in self.terms.iter().enumerate() {
            if t.a == Complex64::new(0.0, 0.0) {
                return Err(Error::Model(format!("term {j}: singularity location a = 0")));
            }
            if !(t.a.re.is_finite() && t.a.im.is_finite()) {
                return Err(Error::Model(format!("term {j}: non-finite a")));
            }
            if self.terms[..j].iter().any(|o| o.a == t.a) {
                return Err(Error::Model(format!("term {j}: duplicate singularity location {}", t.a)));
            }
            t.kernel.validate()?;
            t.decay.validate()?;
        }
        Ok(())
    }

    /// Samples each kernel on [1, 100] and rejects non-finite or exploding values.
    pub fn check_bounded(&self) -> Result<()> {
        for (j, t) in self.terms.iter().enumerate() {
            if !t.kernel.has_density() {
                continue;
            }
            let g = t.kernel.growth_rate();
            for p in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
                let v = t.kernel.density(Complex64::new(p, 0.0))? * (-g * p).exp();
                if !(v.norm() < 1e100) {
                    return Err(Error::Model(format!("term {j}: kernel unbounded at p = {p} ({v})")));
                }
            }
        }
        Ok(())
    }

    /// f_k for k >= 1.
    pub fn coefficient(&self, k: u32) -> Result<QuadratureResult> {
        if k == 0 {
            return Err(Error::InvalidParameter("coefficients are indexed from k = 1".into()));
        }
        let kc = Complex64::new(k as f64, 0.0);
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut nodes = 0;
        for t in &self.terms {
            let r = t.kernel.coefficient(kc)?;
            let w = t.a.powi(-(k as i32));
            value += w * r.value;
            err += w.norm() * r.error_estimate;
            nodes += r.nodes_used;
        }
        Ok(QuadratureResult { value, error_estimate: err, nodes_used: nodes })
    }

    /// Closed-form f_k when every kernel has one.
    pub fn closed_form(&self, k: u32) -> Option<Complex64> {
        let mut v = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            v += t.a.powi(-(k as i32)) * t.kernel.closed_form(k as f64)?;
        }
        Some(v)
    }

    /// Model with coefficients A^k f_k.
    pub fn rescale(&self, factor: Complex64) -> Result<Self> {
        if factor == Complex64::new(0.0, 0.0) || !(factor.re.is_finite() && factor.im.is_finite()) {
            return Err(Error::InvalidParameter("rescale factor must be finite and nonzero".into()));
        }
        let terms = self.terms.iter().map(|t| SingularTerm { a: t.a / factor, ..t.clone() }).collect();
        Self::new(self.kind, self.f0, terms)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s).map_err(|e| Error::Model(format!("schema violation: {e}")))?;
        file.into_model()
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = ModelFile::from_model(self)?;
        serde_json::to_string_pretty(&file).map_err(|e| Error::Model(e.to_string()))
    }
}

/// Example models shipped with the crate, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("f1", include_str!("../models/f1.resum.json")),
    ("f2", include_str!("../models/f2.resum.json")),
    ("f3-stirling", include_str!("../models/f3-stirling.resum.json")),
    ("borel-sqrt", include_str!("../models/borel-sqrt.resum.json")),
];

pub fn bundled(name: &str) -> Result<CoefficientModel> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Model(format!("no bundled model named `{name}`")))?;
    CoefficientModel::from_json_str(text)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<CoefficientModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    CoefficientModel::from_json_str(&text)
}

pub fn save_model(model: &CoefficientModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = model.to_json_string()?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

// On-disk representation.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    kind: ModelKind,
    #[serde(default)]
    f0: [f64; 2],
    terms: Vec<TermFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    a: [f64; 2],
    kernel: KernelFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decay: Option<DecayFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum KernelFile {
    Name(String),
    Expr(ExprKernelFile),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExprKernelFile {
    expr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cut: Option<CutFile>,
    #[serde(default)]
    growth: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CutFile {
    origin: [f64; 2],
    direction: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecayFile {
    #[serde(rename = "type")]
    class: String,
    rate: f64,
}

fn cx(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl ModelFile {
    fn into_model(self) -> Result<CoefficientModel> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            let kernel = match t.kernel {
                KernelFile::Name(n) => KernelId::from_name(&n)?,
                KernelFile::Expr(e) => {
                    let expr = parse_expr(&e.expr)?;
                    let cut = match e.cut {
                        Some(c) => Cut::new(cx(c.origin), cx(c.direction))?,
                        None => Cut::new(Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0))?,
                    };
                    KernelId::Expr { expr, cut, growth: e.growth }
                }
            };
            let decay = match t.decay {
                None => kernel.default_decay(),
                Some(d) => match d.class.as_str() {
                    "exponential" => TailDecay::Exponential(d.rate),
                    "algebraic" => TailDecay::Algebraic(d.rate),
                    other => return Err(Error::Model(format!("unknown decay type `{other}`"))),
                },
            };
            terms.push(SingularTerm { a: cx(t.a), kernel, decay });
        }
        CoefficientModel::new(self.kind, cx(self.f0), terms)
    }

    fn from_model(m: &CoefficientModel) -> Result<Self> {
        let terms = m
            .terms
            .iter()
            .map(|t| {
                let kernel = match &t.kernel {
                    KernelId::Expr { expr, cut, growth } => KernelFile::Expr(ExprKernelFile {
                        expr: expr.to_string(),
                        cut: Some(CutFile { origin: pair(cut.origin), direction: pair(cut.direction) }),
                        growth: *growth,
                    }),
                    k => KernelFile::Name(k.name().expect("named kernel")),
                };
                let decay = match t.decay {
                    TailDecay::Exponential(r) => DecayFile { class: "exponential".into(), rate: r },
                    TailDecay::Algebraic(q) => DecayFile { class: "algebraic".into(), rate: q },
                };
                TermFile { a: pair(t.a), kernel, decay: Some(decay) }
            })
            .collect();
        Ok(ModelFile { kind: m.kind, f0: pair(m.f0), terms })
    }
}
