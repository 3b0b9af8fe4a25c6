use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("no connected simple graph with {n} vertices and {m} edges")]
    InfeasibleGraph { n: usize, m: usize },

    #[error("permutation of length {got} does not match graph on {expected} vertices")]
    PermutationLength { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("exact isomorphism search is limited to {max} vertices, got {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("gave up after {attempts} attempts to sample a non-isomorphic pair with n={n}, m={m}")]
    RetryBudgetExhausted { n: usize, m: usize, attempts: usize },

    #[error("graphs have different vertex counts ({0} vs {1})")]
    VertexCountMismatch(usize, usize),

    #[error("bitstring has {got} bits, program has {expected} variables")]
    BitstringLength { expected: usize, got: usize },

    #[error("{q} qubits exceeds the cap of {cap} (a 2^{q} table needs about {bytes} bytes)")]
    QubitCapExceeded { q: usize, cap: usize, bytes: u128 },

    #[error("dimension mismatch: state has {state} qubits, operator has {operator}")]
    DimensionMismatch { state: usize, operator: usize },

    #[error("qubit index {index} out of range for {q} qubits")]
    QubitIndex { index: usize, q: usize },

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("objective returned {value} at parameters {theta:?}")]
    NonFiniteObjective { value: f64, theta: Vec<f64> },

    #[error("coefficient overflow while scaling to a common denominator")]
    CoefficientOverflow,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema mismatch at row {row}: {message}")]
    Schema { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
