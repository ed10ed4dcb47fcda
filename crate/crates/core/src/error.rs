use std::fmt;

use thiserror::Error;

use crate::polyhedra::Subspace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Reason a family of ray filtrations admits no common splitting on a cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IncompatibilityWitness {
    /// `a ∩ (b + c) != (a ∩ b) + (a ∩ c)` inside the lattice generated by the
    /// filtration steps of the cone's rays.
    NonDistributive { a: Subspace, b: Subspace, c: Subspace },
    /// The graded pieces of the jump grid do not fill the fiber.
    DimensionDeficit { found: usize, rank: usize },
    /// A splitting vector has a jump profile that no lattice character realizes.
    NonIntegralCharacter { profile: Vec<i64> },
    /// The candidate grading fails to reproduce a filtration step.
    Reconstruction { ray: usize, level: i64 },
}

impl fmt::Display for IncompatibilityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonDistributive { a, b, c } => write!(
                f,
                "non-distributive triple of subspaces (dims {}, {}, {})",
                a.dim(),
                b.dim(),
                c.dim()
            ),
            Self::DimensionDeficit { found, rank } => {
                write!(f, "graded pieces have total dimension {found}, fiber has rank {rank}")
            }
            Self::NonIntegralCharacter { profile } => {
                write!(f, "jump profile {profile:?} has no integral character")
            }
            Self::Reconstruction { ray, level } => {
                write!(f, "grading does not reproduce step {level} of ray {ray}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("minkowski operand is empty")]
    EmptyOperand,
    #[error("minkowski operand is unbounded along a supplied normal")]
    UnboundedOperand,
    #[error("zero normal vector at index {0}")]
    ZeroNormal(usize),
    #[error("completeness check is not supported in rank {0}")]
    UnsupportedRank(usize),
    #[error("no maximal cone contains the vector")]
    NoConeFound,
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("cone {cone} is incompatible: {witness}")]
    Incompatible { cone: usize, witness: IncompatibilityWitness },
    #[error("support of global sections is unbounded; fan is not complete")]
    UnboundedSupport,
    #[error("symmetric power dimension {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("generator {generator} has polytope directions outside the computed L; raise p_max")]
    LUnderestimated { generator: usize },
    #[error("operation requires a split bundle")]
    WrongProvenance,
    #[error("no generators with lattice points in degree {0}")]
    NoGenerators(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
