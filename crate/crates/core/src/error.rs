use thiserror::Error;

/// Errors shared by all solver modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the range an operation can handle.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition stated in an operation's contract was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Operator assembly hit a non-finite potential sample.
    #[error("assembly error: potential not finite at node {index} (x = {x})")]
    NonFinitePotential { index: usize, x: f64 },

    /// An iterative eigensolver ran out of iterations. Carries the best
    /// residuals reached so the caller can judge how far off it was.
    #[error("eigensolver did not converge: {context}; best residuals {residuals:?}")]
    NonConvergence {
        context: String,
        residuals: Vec<f64>,
    },

    /// The discrete ground state picked up sign changes that are too large
    /// to be rounding noise.
    #[error("ground state not positive: refine grid (min/max sample ratio {ratio:e})")]
    GroundStateSign { ratio: f64 },

    /// Two independent computation routes disagree beyond combined
    /// tolerance; indicates a quadrature or assembly bug, not bad input.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
