use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input shape: expected {expected} bits, got {got}")]
    InputShape { expected: usize, got: usize },

    #[error("variable index {index} out of range 1..={n}")]
    VariableRange { index: usize, n: usize },

    #[error("function does not depend on variable {0}; no witness pair exists")]
    NoWitness(usize),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("precondition: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} needs up to {required} evaluations, budget is {budget}")]
    Budget {
        what: String,
        required: String,
        budget: u64,
    },

    #[error("verifier fault: {0}")]
    VerifierFault(String),

    #[error("adversary chooser exhausted at round {0}")]
    AdversaryExhausted(usize),

    #[error("compile precondition: verifier circuit disagrees with the verifier at {0}")]
    CompileMismatch(String),

    #[error("corrupted advice table: {0}")]
    CorruptedTable(String),

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("randomized construction failed after {retries} retries: {detail}")]
    ConstructionFailed { retries: usize, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
