use thiserror::Error;

pub type Result<T, E = QError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bracket value overflows binary64 at n = {n}, q = {q}")]
    Overflow { n: u64, q: f64 },

    #[error("|z| = {modulus} lies outside the convergence disk |z| < {radius} (Jackson convention, q = {q})")]
    OutsideConvergence { modulus: f64, radius: f64, q: f64 },

    #[error("series tail was not certified within {cap} terms")]
    NoConvergence { cap: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("method {method} is not available for {family}")]
    MethodMismatch { method: String, family: String },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("insufficient zeros: {0}")]
    InsufficientZeros(String),

    #[error("collision search failed: {0}")]
    Collision(String),
}

impl QError {
    /// Errors caused by the caller's inputs rather than by a numerical failure.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            QError::InvalidArgument(_)
                | QError::OutsideConvergence { .. }
                | QError::IndexOutOfRange(_)
                | QError::MethodMismatch { .. }
                | QError::Overflow { .. }
        )
    }
}
