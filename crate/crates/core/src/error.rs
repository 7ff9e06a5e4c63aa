use thiserror::Error;

/// Errors raised by the capacity toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
    /// A sequence specification produced an invalid term or is malformed.
    #[error("invalid sequence: {0}")]
    Sequence(String),
    /// The tan-product orbit hit a pole or a zero of tan.
    #[error("dyadic rational {0} puts a factor of the tan product at a pole")]
    DyadicTangentPole(String),
    /// An iterative solver exhausted its budget.
    #[error("no convergence after {iterations} iterations (violation {violation:e})")]
    NonConvergence { iterations: usize, violation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
