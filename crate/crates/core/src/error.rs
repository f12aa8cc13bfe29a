use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} is out of range for order {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("expected a square {n}x{n} matrix, got row {row} of length {len}")]
    NotSquare { n: usize, row: usize, len: usize },

    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("order {n} not supported here: {reason}")]
    InvalidOrder { n: usize, reason: &'static str },

    #[error("pivot block is singular")]
    SingularBlock,

    #[error("diagonal entry {index} is not strictly positive")]
    NonPositiveDiagonal { index: usize },

    #[error("diagonal scaling of entry {index} has no exact rational square root")]
    IrrationalScale { index: usize },

    #[error("eigenvalue iteration did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("{what}: {got} exceeds the limit {limit}")]
    GuardExceeded { what: &'static str, limit: u64, got: u64 },

    #[error("parameter {name} out of range: {reason}")]
    ParameterOutOfRange { name: &'static str, reason: String },

    #[error("index set must be a nonempty proper subset of 1..={n}")]
    TrivialPartition { n: usize },

    #[error("sampler gave up after {rejects} rejected draws")]
    SamplerExhausted { rejects: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}
