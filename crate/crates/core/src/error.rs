use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("vectors must not be empty")]
    EmptyVector,
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("index ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("matrix is singular (pivot {pivot} below threshold)")]
    SingularMatrix { pivot: usize },
    #[error("singular coarse matrix at level {level}, path '{path}'")]
    SingularCoarseMatrix { level: usize, path: String },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("basis is not biorthogonal: max |V^H W - I| = {deviation:e}")]
    NotBiorthogonal { deviation: f64 },
    #[error("basis has no red-black harmonic aliasing pattern: deviation {deviation:e}")]
    NoAliasingPattern { deviation: f64 },
    #[error("matrix is not a filter in the given basis: off-diagonal leakage {leakage:e}")]
    NotAFilter { leakage: f64 },
    #[error("coarse symbol {index} vanishes (|delta| = {magnitude:e})")]
    SingularSymbol { index: usize, magnitude: f64 },
    #[error("partition hierarchy exhausted at level {level} with {size} unknowns")]
    HierarchyExhausted { level: usize, size: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}
