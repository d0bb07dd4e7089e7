use thiserror::Error;

/// Every failure the numerical routines in this crate can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("potential tail does not fall below {eps_tail:e} of its peak within x = 40")]
    TailNotDecayed { eps_tail: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid grid specification: {0}")]
    InvalidGridSpec(String),

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unsupported chain with link powers {0:?}")]
    UnsupportedChain(Vec<u32>),

    #[error("term {term}: links do not form disjoint simple paths")]
    NonPathComponent { term: usize },

    #[error("malformed term table, line {line}: {reason}")]
    TableFormat { line: usize, reason: String },

    #[error("Green's function closed form is singular at zero shift")]
    DegenerateShift,

    #[error("no sign change of the matching function in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("root finding did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("Padé system is singular (reciprocal condition {rcond:e})")]
    SingularPade { rcond: f64 },

    #[error("Padé denominator vanishes at s = {s}")]
    PoleAtEvaluation { s: f64 },

    #[error("trial wave function is not normalizable on the grid")]
    NonNormalizable,

    #[error("variational minimization stalled (simplex size {size:e})")]
    OptimizerStalled { size: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
