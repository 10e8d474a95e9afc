use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:e} below threshold {threshold:e} at column {column}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },
    #[error("invalid interval ({a}, {b}): lower bound must be below upper bound")]
    InvalidInterval { a: f64, b: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{what} = {value} lies outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("coefficient vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("wave with alpha*h/2 = {0} cannot be resolved on the grid")]
    UnresolvableWave(f64),
    #[error("plane-wave basis is degenerate (alpha_hat*h = {0:e})")]
    DegenerateBasis(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot parse profile {input:?}: {reason} (at {token:?})")]
    Parse {
        input: String,
        token: String,
        reason: String,
    },
}
