use thiserror::Error;

/// Errors raised by profile constructors and tensor operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("xi = {xi} is outside the profile domain")]
    OutOfDomain { xi: f64 },

    #[error("conformal factor vanishes at xi = {xi}")]
    DegenerateMetric { xi: f64 },

    #[error("potential requires u > 0, got u = {u} at xi = {xi}")]
    InvalidPotential { xi: f64, u: f64 },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("m = {m} is outside the covered range (need m >= 1)")]
    OutOfScope { m: f64 },

    #[error("family degenerates to a trivial solution: {0}")]
    Trivial(String),

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("branch requires a positive base, got {base} at phi = {phi}")]
    BranchDomain { phi: f64, base: f64 },

    #[error("orientation requires dphi > 0, got {dphi}")]
    Orientation { dphi: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (abs tol {tol})")]
    Integration { a: f64, b: f64, tol: f64 },

    #[error("xi = {xi} is outside the certified interval [{lo}, {hi}]")]
    DomainExhausted { xi: f64, lo: f64, hi: f64 },

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("pole detected near phi = {phi}")]
    PoleDetected { phi: f64 },

    #[error("denominator vanishes at phi = {phi}")]
    Pole { phi: f64 },

    #[error("dphi = 0 makes the reduced equation singular")]
    ZeroDerivative,

    #[error("phi = 0 is a singular point of the reduced equation")]
    SingularPoint,

    #[error("degenerate case: {0}")]
    Degenerate(String),
}

/// Coarse classification used by callers that map errors to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The request itself is malformed (bad constants, out-of-scope m, ...).
    Parameter,
    /// The request is well formed but leaves the domain where the
    /// construction is defined (singular loci, exhausted branches, ...).
    Domain,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Constraint(_) | Error::OutOfScope { .. } | Error::Trivial(_) => {
                ErrorKind::Parameter
            }
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
