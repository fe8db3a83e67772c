//! Normalized volumes of valuations over two computable classes of klt
//! singularities: toric (including abelian quotient) singularities and
//! weighted hypersurface singularities that are nondegenerate with respect to
//! their Newton polyhedron.
//!
//! Polyhedral computations are exact over the rationals. Floating point only
//! appears in [`minimizer`], and every reported minimum is re-verified exactly
//! when a rational candidate can be recovered.

pub mod error;
pub mod geometry;
pub mod hypersurface;
pub mod ideals;
pub mod kstab;
pub mod minimizer;
pub mod rational;
pub mod reproduce;
pub mod toric;

pub use error::Error;
pub use geometry::{BoundedPolytope, Halfspace, Lattice, PolyhedralCone, RationalVector};
pub use rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;
