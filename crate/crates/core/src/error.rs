use thiserror::Error;

use crate::expr::EvalError;

/// Failures of the numeric pipeline. Positions are reported as `f64`
/// whatever the working scalar is.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("evaluation failed at s = {s}: {source}")]
    Eval { s: f64, source: EvalError },
    #[error("inadmissible at s = {s}: y''^2 - z''^2 = {value:e} (need y''^2 - z''^2 != 0)")]
    Inadmissible { s: f64, value: f64 },
    #[error("orientation sign flips between s = {from} and s = {to}; the curve crosses an inadmissible point")]
    EpsFlip { from: f64, to: f64 },
    #[error("curve is not spacelike near s = {s}: y''^2 - z''^2 = {value:e} (need y''^2 - z''^2 < 0)")]
    NotSpacelike { s: f64, value: f64 },
    #[error("torsion vanishes at s = {s} (|tau| = {tau:e}); this operation divides by tau")]
    ZeroTorsion { s: f64, tau: f64 },
    #[error("torsion changes sign on the domain; t = integral of tau is not monotone")]
    TorsionSignChange,
    #[error("curvature vanishes at s = {s}")]
    ZeroCurvature { s: f64 },
    #[error("frame is degenerate at s = {s}: |g(N,N) + 1| = {value:e}")]
    FrameDegenerate { s: f64, value: f64 },
    #[error("normal part vanishes at s = {s}: |m2^2 - m1^2| = {value:e}")]
    DegenerateNormal { s: f64, value: f64 },
    #[error("overflow guard: |u| = {u} exceeds 300 at s = {s}")]
    Overflow { s: f64, u: f64 },
    #[error("non-finite value at s = {s}")]
    NonFinite { s: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl GeometryError {
    pub(crate) fn eval<T: crate::Real>(s: T, source: EvalError) -> Self {
        GeometryError::Eval { s: s.to_f64_lossy(), source }
    }

    /// True for failures caused by the curve itself rather than by numerics.
    pub fn is_inadmissible(&self) -> bool {
        matches!(
            self,
            GeometryError::Inadmissible { .. }
                | GeometryError::NotSpacelike { .. }
                | GeometryError::EpsFlip { .. }
                | GeometryError::ZeroCurvature { .. }
        )
    }
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
