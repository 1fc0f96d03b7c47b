use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("divided difference is singular at t = {0} (mu(t+1/2) = mu(t-1/2))")]
    SingularPoint(Rational),
    #[error("operands live on different lattices")]
    MixedLattice,
    #[error("family is not graded monic at index {0}")]
    NotGradedMonic(usize),
    #[error("mu*P_{n} has a nonzero component on P_{index}; not a three-term recurrence")]
    NotThreeTerm { n: usize, index: usize },
    #[error("matrix size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("matrix is not unit lower triangular (row {0})")]
    NotUnitLowerTriangular(usize),
    #[error("truncation too small for {kind}: no valid rows at size {size}")]
    TruncationTooSmall { kind: String, size: usize },
    #[error("degenerate eigenvalues for degree {n}: lambda_{m} collides")]
    DegenerateEigenvalues { n: usize, m: usize },
    #[error("hypergeometric parameter pole: {0}")]
    ParameterPole(String),
    #[error("interpolation nodes {0} and {1} share the same lattice value")]
    NodesCollide(usize, usize),
    #[error("interpolated polynomial of degree {0} is not monic")]
    NotMonic(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("missing context: {0}")]
    MissingContext(String),
    #[error("family too short: need {needed} members, have {have}")]
    FamilyTooShort { needed: usize, have: usize },
}
