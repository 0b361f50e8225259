use thiserror::Error;

/// Errors raised by the simulation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeflectionError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Fock-space cutoff discards more amplitude than allowed.
    #[error("truncation tail {tail:.3e} exceeds {limit:.1e}; raise n_max (currently {n_max})")]
    TruncationTail { tail: f64, limit: f64, n_max: usize },

    /// A grid does not resolve the free-flight kernel.
    #[error("grid sampling violation: {0}")]
    Sampling(String),

    /// Probability mass reaches the edge of a position or momentum grid.
    #[error("grid edge carries {fraction:.3e} of the total mass (limit {limit:.1e}); {remedy}")]
    EdgeMass { fraction: f64, limit: f64, remedy: String },

    /// The reference integrator failed to converge.
    #[error("oracle error: {0}")]
    Oracle(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, DeflectionError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(DeflectionError::Domain(msg.into()))
}
