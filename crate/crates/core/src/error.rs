use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid growth specification: {0}")]
    InvalidSpec(String),
    #[error("base must exceed 1, got {0}")]
    InvalidBase(String),
    #[error("polynomial is not integer-valued: {0}")]
    NotIntegerValued(String),
    #[error("evaluation point is within {0} of the pole")]
    PoleProximity(String),
    #[error("quadrature did not converge after {levels} refinements (last change {last_change})")]
    QuadratureNotConverged { levels: u32, last_change: String },
    #[error("matrix not positive definite: pivot {index} is {pivot}, guard {guard}")]
    NotPositiveDefinite { index: usize, pivot: String, guard: String },
    #[error("disks overlap: center distance {distance}, radii sum {radii}")]
    DisksOverlap { distance: String, radii: String },
    #[error("theta nome must lie in (0, 1), got {0}")]
    NomeOutOfRange(String),
    #[error("no sign change for the critical curve on [{low}, {high}]")]
    NoBracket { low: String, high: String },
    #[error("dimension {dim} exceeds the enumeration cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("enclosing body holds more than {budget} candidates")]
    EnclosureTooLoose { budget: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
