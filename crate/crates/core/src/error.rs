use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity: expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("term budget exceeded: {terms} terms > limit {limit}")]
    TermBudget { terms: usize, limit: usize },
    #[error("factorial budget: {n}! exceeds {limit}")]
    FactorialBudget { n: usize, limit: u64 },
    #[error("multinomial coefficient overflows f64 (d = {degree})")]
    Overflow { degree: u32 },
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("invalid recipe field `{field}`: {reason}")]
    Recipe { field: &'static str, reason: String },
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("non-finite objective at starting point")]
    NonFinite,
    #[error("singular pair ({0},{1})")]
    SingularPair(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("eigenvalue solve failed")]
    Eigen,
    #[error("enumeration budget exceeded: {candidates} candidate permutations")]
    EnumerationBudget { candidates: u128 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no configuration blocks")]
    NoBlocks,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
