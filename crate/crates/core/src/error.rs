use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("missing `p cnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("malformed DIMACS at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("header declares {expected} clauses but {found} were parsed")]
    ClauseCountMismatch { expected: usize, found: usize },
    #[error("variable {variable} out of range 1..={n}")]
    VariableOutOfRange { variable: i64, n: usize },
    #[error("empty clause (clause {clause})")]
    EmptyClause { clause: usize },
    #[error("tautological clause {clause}: variable {variable} appears with both polarities")]
    TautologicalClause { clause: usize, variable: usize },
    #[error("duplicate literal in clause {clause}: variable {variable}")]
    DuplicateLiteral { clause: usize, variable: usize },
    #[error("formula must have at least one clause")]
    NoClauses,
    #[error("formula must have at least one variable")]
    NoVariables,
    #[error("index {index} out of range (< {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("too many variables for exhaustive enumeration: n = {n} > limit {limit}")]
    TooManyVariables { n: usize, limit: usize },
    #[error("clause width k = {k} invalid for n = {n} variables")]
    InvalidWidth { k: usize, n: usize },
    #[error("no instance with L = {target} solutions found after {attempts} attempts")]
    TargetUnreachable { target: u64, attempts: usize },
    #[error("point coordinate {index} = {value} outside [-1, 1]")]
    PointOutOfRange { index: usize, value: f64 },
    #[error("formula has no satisfying assignments; conditioning is undefined")]
    NoSolutions,
    #[error("solution count L = {l} exceeds 2^{n}")]
    SolutionCountTooLarge { l: u64, n: usize },
    #[error("sweep has no solution vertices")]
    EmptySolutionSet,
    #[error("ledger covers {available} iterations but {requested} were requested")]
    LedgerTooShort { requested: usize, available: usize },
    #[error("ledger does not match formula: {0}")]
    LedgerMismatch(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
