use crate::graph::Biarity;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("reflexive pair check failed: {0}")]
    NotReflexive(String),
    #[error("subspaces live in different ambient spaces")]
    AmbientMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("permutation of degree {got} applied to representation of degree {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("symmetric group S_{n} exceeds enumeration bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("truncation exceeded: {0}")]
    TruncationExceeded(String),
    #[error("biarity mismatch: slot {slot} expects {expected}, got {got}")]
    BiarityMismatch {
        slot: usize,
        expected: Biarity,
        got: Biarity,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("component {biarity} weight {weight} did not stabilize by level {cap}")]
    NonStabilized {
        biarity: Biarity,
        weight: u32,
        cap: usize,
    },
    #[error("not a monoid: {0}")]
    NotAMonoid(String),
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
