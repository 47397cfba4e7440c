use thiserror::Error;

/// Errors surfaced by the toolkit. The CLI maps these onto its exit-code
/// contract: domain/precondition failures exit 2, capacity failures exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The request exceeds the configured memory or range budget.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A torus alignment search exhausted its grid without a hit.
    #[error("alignment failed at stage {stage}: no s in [{s_lo}, {s_hi}] with max phase error <= {eps}")]
    AlignmentFailure {
        stage: usize,
        s_lo: f64,
        s_hi: f64,
        eps: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
