use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An intermediate exponential would overflow; the caller has to work
    /// with log-scaled quantities instead.
    #[error("rescale required: {0}")]
    Rescale(String),

    /// The requested state vanishes identically (e.g. the odd superposition
    /// at zero amplitude).
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// The flat mixed-part convention has no finite phase-space integral.
    #[error("non-integrable convention: {0}")]
    NonIntegrableConvention(String),

    #[error("unsupported convention: {0}")]
    UnsupportedConvention(String),

    #[error("no convergence after {levels} levels (last change {last_change:.3e}, error estimate {error_estimate:.3e}): {context}")]
    Convergence {
        context: String,
        levels: u32,
        last_change: f64,
        error_estimate: f64,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    /// Fock truncation is too small for the requested state.
    #[error("tail mass {tail:.3e} exceeds certificate bound at cutoff {cutoff}")]
    TailMass { cutoff: usize, tail: f64 },

    /// Displacement too large for the truncated Fock space.
    #[error("accuracy guard violated: |z| = {z_abs:.3} exceeds cutoff/4 = {limit:.3}")]
    AccuracyGuard { z_abs: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
