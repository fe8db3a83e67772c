use thiserror::Error;

use crate::geometry::RationalVector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("cone is not full-dimensional; {witness} is orthogonal to every generator")]
    NotFullDimensional { witness: RationalVector },
    #[error("cone is not pointed; it contains the line spanned by {witness}")]
    NotPointed { witness: RationalVector },
    #[error("lattice basis is singular")]
    SingularLattice,
    #[error("halfspace system is unbounded along {direction}")]
    Unbounded { direction: RationalVector },
    #[error("halfspace system is empty")]
    EmptyPolytope,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded along {ray}")]
    LpUnbounded { ray: RationalVector },
    #[error("singularity is not Q-Gorenstein: no covector pairs to 1 with every primitive ray generator")]
    NotQGorenstein,
    #[error("invalid cyclic quotient: {0}")]
    InvalidQuotient(String),
    #[error("{point} is not in the interior of the cone")]
    NotInterior { point: RationalVector },
    #[error("ideal is not primary to the maximal ideal: {0}")]
    NotPrimary(String),
    #[error("weight is not klt: log discrepancy {0} is not positive")]
    NotKlt(String),
    #[error("nondegeneracy unknown: {0}")]
    NondegeneracyUnknown(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("fan is not Fano: ray {ray} {reason}")]
    NotFano { ray: RationalVector, reason: String },
    #[error("polarization is not Cartier: ray {ray} lifts to non-integral height {height}")]
    NotCartier { ray: RationalVector, height: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
