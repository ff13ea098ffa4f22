use num_complex::Complex64;
use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("evaluation at the branch point {0}")]
    BranchPoint(Complex64),

    #[error("point {0} lies on a branch cut; an explicit side (upper/lower) is required")]
    SideRequired(Complex64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-integrable singularity at the contour origin (circle contribution changed by {change:.3e} on refinement)")]
    NonIntegrable { change: f64 },

    #[error("tail bound {bound:.3e} exceeds the requested tolerance {tolerance:.3e}")]
    TailBound { bound: f64, tolerance: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("non-finite integrand value at {0}")]
    NonFinite(Complex64),

    #[error("{what} did not converge (residual {residual:.3e})")]
    NoConvergence { what: String, residual: f64 },

    #[error("singular direction: the Laplace ray meets the singularity at {0}")]
    SingularDirection(Complex64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonIntegrable { .. }
                | Error::TailBound { .. }
                | Error::Divergent(_)
                | Error::NonFinite(_)
                | Error::NoConvergence { .. }
                | Error::SingularDirection(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
