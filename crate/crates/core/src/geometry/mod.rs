//! Exact polyhedral geometry over the rationals.

pub mod cone;
pub mod dd;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod polytope;
mod vector;

pub use cone::{dual_cone, PolyhedralCone};
pub use lattice::Lattice;
pub use lp::{lp_optimize, LpSolution, Sense};
pub use polytope::{hrep_to_vrep, polytope_volume, BoundedPolytope, Halfspace, Volume};
pub use vector::RationalVector;
