//! Crate-wide error type.

use thiserror::Error;

/// Every fallible operation in the crate returns one of these variants.
///
/// [`Error::code`] gives the stable machine-readable name that the CLI
/// reports in its JSON error documents.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operands have different chirality; multiply their matrices instead")]
    ChiralityMismatch,
    #[error("matrix is not in the requested representation (relative residual {residual:.3e})")]
    NotInRepresentation { residual: f64 },
    #[error("vector is not an observer: <u,u> = {norm} (expected -1)")]
    NotAnObserver { norm: f64 },
    #[error("spatial vector must have unit length (got {norm})")]
    NotUnitSpatial { norm: f64 },
    #[error("speed must satisfy |w| < 1 (got {speed})")]
    SpeedNotSubluminal { speed: f64 },
    #[error("biquaternion must have zero scalar part (got |a0| = {magnitude:.3e})")]
    NotPure { magnitude: f64 },
    #[error("matrix is not Minkowski-skew (residual {residual:.3e})")]
    NotSkew { residual: f64 },
    #[error("element is not a biquaternion Lorentz transformation (a^2 - lambda^2 - 1 = {residual:.3e})")]
    NotBiquatLorentz { residual: f64 },
    #[error("-I + N with N null nonzero has no logarithm in the pure sector")]
    NotExponentialInS,
    #[error("matrix is not a proper-orthochronous Lorentz transformation")]
    NotProperLorentz,
    #[error("lift validation failed: modulus-squared residual {residual:.3e}")]
    LiftFailed { residual: f64 },
    #[error("element is not a nullquat: |a^2 - lambda^2| = {residual:.3e}")]
    NotNullquat { residual: f64 },
    #[error("({re}, {im}) is not an eigenvalue of the element")]
    NotAnEigenvalue { re: f64, im: f64 },
    #[error("zero field has no principal direction")]
    ZeroField,
    #[error("parameter point is outside the field's domain: {detail}")]
    OutOfDomain { detail: String },
    #[error("invalid parameter path: {detail}")]
    InvalidPath { detail: String },
    #[error("branch matching still ambiguous at max refinement depth between {lo:?} and {hi:?}")]
    RefinementExhausted { lo: Vec<f64>, hi: Vec<f64> },
    #[error("branch {branch} touches a degeneracy along the loop")]
    BranchDegenerate { branch: usize },
    #[error("eigenvalue iteration failed to converge")]
    EigensolveFailed,
}

impl Error {
    /// Stable machine-readable code, used by the CLI's error documents.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ChiralityMismatch => "chirality_mismatch",
            Error::NotInRepresentation { .. } => "not_in_representation",
            Error::NotAnObserver { .. } => "not_an_observer",
            Error::NotUnitSpatial { .. } => "not_unit_spatial",
            Error::SpeedNotSubluminal { .. } => "speed_not_subluminal",
            Error::NotPure { .. } => "not_pure",
            Error::NotSkew { .. } => "not_skew",
            Error::NotBiquatLorentz { .. } => "not_biquat_lorentz",
            Error::NotExponentialInS => "not_exponential_in_s",
            Error::NotProperLorentz => "not_proper_lorentz",
            Error::LiftFailed { .. } => "lift_failed",
            Error::NotNullquat { .. } => "not_nullquat",
            Error::NotAnEigenvalue { .. } => "not_an_eigenvalue",
            Error::ZeroField => "zero_field",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::InvalidPath { .. } => "invalid_path",
            Error::RefinementExhausted { .. } => "refinement_exhausted",
            Error::BranchDegenerate { .. } => "branch_degenerate",
            Error::EigensolveFailed => "eigensolve_failed",
        }
    }

    /// True for errors that signal an internal-consistency alarm rather
    /// than bad input. The CLI exits with status 1 for these.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::LiftFailed { .. } | Error::EigensolveFailed)
    }
}
