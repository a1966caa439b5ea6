use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not coordinate-flat: vertex {0} has a nonzero coordinate outside the requested subspace")]
    NotCoordinateFlat(String),
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("divisor is not pseudoeffective")]
    NotPseudoEffective,
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("closed form refuted: {0}")]
    Refuted(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("epsilon limit did not stabilize within {0} steps")]
    NoStabilization(usize),
    #[error("intersection matrix on the negative support is singular")]
    SingularGram,
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
