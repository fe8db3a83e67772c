use num_traits::{Signed, Zero};

use super::dd;
use super::linalg;
use super::{Lattice, RationalVector};
use crate::Error;

/// Pointed, full-dimensional rational polyhedral cone with both descriptions.
///
/// `rays` are primitive integer vectors in ambient coordinates (sorted), and
/// `facets` are primitive integer inward normals: `<f, x> >= 0` on the cone.
/// Primitivity with respect to `lattice` is left to callers that need it.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralCone {
    dim: usize,
    rays: Vec<RationalVector>,
    facets: Vec<RationalVector>,
    lattice: Lattice,
}

fn to_vectors(out: &dd::DdOutput) -> Vec<RationalVector> {
    out.rays.iter().map(|r| RationalVector::from_bigints(r)).collect()
}

impl PolyhedralCone {
    /// Cone generated by `generators` (redundant generators allowed).
    pub fn from_rays(generators: &[RationalVector], lattice: Lattice) -> Result<PolyhedralCone, Error> {
        let dim = lattice.dim();
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
        let facets = dd::extreme_rays(generators, dim)
            .map_err(|l| Error::NotFullDimensional { witness: l.witness })?;
        let facets = to_vectors(&facets);
        let rays = dd::extreme_rays(&facets, dim).map_err(|l| Error::NotPointed { witness: l.witness })?;
        Ok(PolyhedralCone { dim, rays: to_vectors(&rays), facets, lattice })
    }

    /// Cone `{ x : <f, x> >= 0 }` for the given inward normals.
    pub fn from_facets(normals: &[RationalVector], lattice: Lattice) -> Result<PolyhedralCone, Error> {
        let dim = lattice.dim();
        if let Some(g) = normals.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
        let rays = dd::extreme_rays(normals, dim).map_err(|l| Error::NotPointed { witness: l.witness })?;
        let rays = to_vectors(&rays);
        let facets = dd::extreme_rays(&rays, dim)
            .map_err(|l| Error::NotFullDimensional { witness: l.witness })?;
        Ok(PolyhedralCone { dim, rays, facets: to_vectors(&facets), lattice })
    }

    pub fn orthant(lattice: Lattice) -> PolyhedralCone {
        let dim = lattice.dim();
        let units: Vec<RationalVector> = (0..dim).map(|i| RationalVector::unit(dim, i)).collect();
        PolyhedralCone { dim, rays: units.clone(), facets: units, lattice }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[RationalVector] {
        &self.rays
    }

    pub fn facets(&self) -> &[RationalVector] {
        &self.facets
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The dual cone, living in the dual lattice. Facet normals and rays swap.
    pub fn dual(&self) -> PolyhedralCone {
        PolyhedralCone {
            dim: self.dim,
            rays: self.facets.clone(),
            facets: self.rays.clone(),
            lattice: self.lattice.dual(),
        }
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        self.facets.iter().all(|f| !f.dot(x).is_negative())
    }

    pub fn contains_in_interior(&self, x: &RationalVector) -> bool {
        self.facets.iter().all(|f| f.dot(x).is_positive())
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    /// For each facet, the indices of the rays lying on it.
    pub fn facet_ray_incidence(&self) -> Vec<Vec<usize>> {
        self.facets
            .iter()
            .map(|f| (0..self.rays.len()).filter(|&j| f.dot(&self.rays[j]).is_zero()).collect())
            .collect()
    }

    /// Sum of the rays, an interior point.
    pub fn interior_point(&self) -> RationalVector {
        self.rays.iter().fold(RationalVector::zeros(self.dim), |acc, r| &acc + r)
    }

    /// Same cone after permuting coordinates (`perm[i]` is the source index of
    /// new coordinate `i`).
    pub fn permuted(&self, perm: &[usize]) -> PolyhedralCone {
        let rays: Vec<RationalVector> = self.rays.iter().map(|r| r.permuted(perm)).collect();
        PolyhedralCone::from_rays(&rays, self.lattice.permuted(perm)).expect("permutation preserves the cone")
    }
}

/// `dual_cone` in free-function form.
pub fn dual_cone(c: &PolyhedralCone) -> PolyhedralCone {
    c.dual()
}

/// Checks that the columns of `rays` span: used by callers that receive cones
/// through other channels.
pub fn spans(vectors: &[RationalVector], dim: usize) -> bool {
    let rows: Vec<Vec<_>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
    linalg::rank(&rows) == dim
}
