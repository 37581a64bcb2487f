use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime in [2, 65521]")]
    NotPrime(u32),

    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u32, right: u32 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("entry {value} at ({row}, {col}) is outside [0, {p})")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: i64,
        p: u32,
    },

    #[error("no solution")]
    NoSolution,

    #[error("matrix is singular")]
    Singular,

    #[error("index {index} out of range for ground set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("ground set size {0} outside the supported range")]
    GroundSetSize(usize),

    #[error("enumeration needs {needed} vectors, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("not closed under integral sub-vectors: {0}")]
    NotSubvectorClosed(String),

    #[error("vector {0} is not a basis vector")]
    NotABasis(String),

    #[error("phi is undefined: basis support covers the whole ground set")]
    PhiUndefined,

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("unknown node {0:?}")]
    UnknownNode(String),

    #[error("unknown edge {0:?}")]
    UnknownEdge(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("network is not discrete polymatroidal under the given map: {0}")]
    NotPolymatroidal(String),

    #[error("representation inconsistent with the map: {0}")]
    Inconsistent(String),

    #[error("edge {edge} would need {needed} dimensions, edge width is {width}")]
    WidthExceeded {
        edge: String,
        needed: usize,
        width: usize,
    },

    #[error("invalid construction input: {0}")]
    Construction(String),

    #[error("invalid input: {0}")]
    Input(String),
}
