use thiserror::Error;

/// Errors shared across the library.
///
/// Domain errors (`Unbound`, `EqualStrengths`, invalid inputs) are
/// distinguished from numeric failures (quadrature or eigensolver not
/// converging) so callers can map them to different exit paths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    /// Net interaction is repulsive or zero at long range: no bound states.
    #[error("no bound state: Coulomb strength a = {a} must exceed Yukawa strength b = {b}")]
    Unbound { a: f64, b: f64 },

    /// Every perturbative formula divides by powers of (a - b).
    #[error("singular denominator: a = b = {0}; the correction formulas divide by (a - b)")]
    EqualStrengths(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The moderated wavefunction is available in closed form only for n = 0.
    #[error("moderated wavefunction requires a nodeless state (n = 0), got n = {0}")]
    UnsupportedState(u32),

    #[error("bad spectroscopic label `{label}`: {reason}")]
    BadLabel { label: String, reason: String },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("eigenvalue solver failed: {0}")]
    Solver(String),
}

impl Error {
    /// True for errors caused by out-of-domain inputs rather than by a
    /// numerical method giving up.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Quadrature(_) | Error::Solver(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
