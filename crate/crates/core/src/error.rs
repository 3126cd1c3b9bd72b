use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot pad a sequence of length {len} down to {n}")]
    DomainShrink { len: usize, n: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("input vector for dimension {dim} is not sorted non-increasing")]
    Sort { dim: usize },

    #[error("invalid degree sequence: {0}")]
    InvalidSequence(String),

    #[error("unsupported construction: {0}")]
    UnsupportedConstruction(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("variable {var} appears twice in atom {atom}")]
    DuplicateVariableInAtom { atom: String, var: String },

    #[error("alias {0} is used by more than one atom")]
    DuplicateAlias(String),

    #[error("query is not a tree: {0}")]
    NotTree(String),

    #[error("query is acyclic")]
    NotCyclic,

    #[error("query is cyclic; use the spanning-tree evaluator")]
    Cyclic,

    #[error("atom {0} is not part of the query")]
    UnknownAtom(String),

    #[error("catalog mismatch: {0}")]
    Catalog(String),

    #[error("relation {relation} has no full degree sequence for attribute {attribute}")]
    MissingFullSequence { relation: String, attribute: String },

    #[error("relation {relation} has no staircase for attribute {attribute}")]
    MissingStaircase { relation: String, attribute: String },

    #[error("atom {0} has a finite max multiplicity; the functional bound needs B = inf")]
    UnsupportedForFdsb(String),

    #[error("atom {0} has a finite max multiplicity; worst-case instances need B = inf")]
    UnsupportedMaterialization(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("infeasible generation request: {0}")]
    Feasibility(String),

    #[error("{location}: {message}")]
    CatalogFormat { location: String, message: String },

    #[error("{file}:{line}: {message}")]
    Data {
        file: String,
        line: u64,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
