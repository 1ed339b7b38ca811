use thiserror::Error;

use crate::operators::NormEstimate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} lies outside the domain")]
    PointOutsideDomain(String),
    #[error("kernel series did not reach tolerance {tol:e} within degree {max_degree}")]
    TruncationNotConverged { tol: f64, max_degree: usize },
    #[error("operation requires a one-variable weighted Hardy family, got {0}")]
    WrongSpaceFamily(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("symbol of kind {0} cannot be evaluated on the unit circle")]
    BoundaryEvalUnsupported(&'static str),
    #[error("power iteration did not converge in {iterations} iterations (best sigma {best})", best = .estimate.sigma_max, iterations = .estimate.iterations)]
    NotConverged { estimate: NormEstimate },
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("vector is not in the range of the Gram matrix (relative residual {0:e})")]
    NotInSpace(f64),
    #[error("constraint system is infeasible (relative residual {0:e})")]
    Infeasible(f64),
    #[error("truncation order {0} is below the minimum of 4")]
    TruncationTooSmall(usize),
    #[error("witness points must be nonzero")]
    DegenerateWitness,
    #[error("symbol leaves the domain: |phi_{coordinate}| = {modulus} at {point}")]
    SelfMapViolationDetected { coordinate: usize, modulus: f64, point: String },
    #[error("rational function has a pole near the unit circle (|denominator| = {0:e})")]
    PoleNearBoundary(f64),
    #[error("parse error: {0}")]
    Parse(String),
}
