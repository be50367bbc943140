use thiserror::Error;

use crate::quadrature::QuadratureError;
use crate::specialfn::SpecialFnError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("superluminal path: |v| = {} at t = {t}", v.abs())]
    Superluminal { t: f64, v: f64 },
    #[error("horizon crossing: alpha * l = {} must be below 2 (l = {l}, alpha = {alpha})", alpha * l)]
    HorizonCrossing { l: f64, alpha: f64 },
    #[error(
        "near threshold: |pi/l - M| = {gap:e} is below the guard {guard:e} (relative); \
         the long-time rate diverges here, use the finite-time probability"
    )]
    NearThreshold { gap: f64, guard: f64 },
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
}

impl Error {
    /// True for violated preconditions, false for failures of the numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Domain(_)
            | Error::Superluminal { .. }
            | Error::HorizonCrossing { .. }
            | Error::NearThreshold { .. }
            | Error::UndefinedRatio(_) => true,
            Error::Quadrature(e) => !matches!(e, QuadratureError::NonFinite { .. }),
            Error::SpecialFn(e) => matches!(e, SpecialFnError::Domain(_)),
        }
    }
}
