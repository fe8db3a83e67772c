//! Toric singularities `X = Spec C[sigma^vee ∩ M]` and their toric valuations.
//!
//! A toric valuation is a point `xi` of the interior of `sigma` (the Reeb
//! cone). It has log discrepancy `<u, xi>` where `u` is the Gorenstein
//! covector, and volume `n! * vol_M { y in sigma^vee : <y, xi> <= 1 }`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::geometry::linalg;
use crate::geometry::polytope::{hrep_to_vrep, polytope_volume, triangulate_face};
use crate::geometry::{Halfspace, Lattice, PolyhedralCone, RationalVector};
use crate::rational::{factorial, int, pow, to_f64, Rational};
use crate::Error;

#[derive(Clone, Debug)]
pub struct ToricSingularity {
    lattice: Lattice,
    cone: PolyhedralCone,
    generators: Vec<RationalVector>,
    gorenstein: RationalVector,
    dual_lattice: Lattice,
    dual_generators: Vec<RationalVector>,
    /// Simplicial cones covering `sigma^vee`, as indices into `dual_generators`,
    /// with `|det| / covol(M)` for each.
    dual_simplices: Vec<(Vec<usize>, Rational)>,
}

/// A validated interior point of the Reeb cone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToricValuation {
    pub xi: RationalVector,
}

impl ToricValuation {
    pub fn new(s: &ToricSingularity, xi: RationalVector) -> Result<ToricValuation, Error> {
        s.check_interior(&xi)?;
        Ok(ToricValuation { xi })
    }
}

impl ToricSingularity {
    /// The singularity of the cone generated by `rays` (ambient coordinates)
    /// with respect to the lattice `n`.
    pub fn new(lattice: Lattice, rays: &[RationalVector]) -> Result<ToricSingularity, Error> {
        let cone = PolyhedralCone::from_rays(rays, lattice.clone())?;
        Self::from_cone(cone)
    }

    pub fn from_cone(cone: PolyhedralCone) -> Result<ToricSingularity, Error> {
        let lattice = cone.lattice().clone();
        let n = lattice.dim();
        let generators: Vec<RationalVector> = cone.rays().iter().map(|r| lattice.primitive_along(r)).collect();
        let rows: Vec<Vec<Rational>> = generators.iter().map(|g| g.coords().to_vec()).collect();
        let ones = vec![Rational::one(); generators.len()];
        let u = linalg::solve_affine(&rows, &ones, n).ok_or(Error::NotQGorenstein)?;
        let gorenstein = RationalVector::new(u);
        if generators.iter().any(|g| !gorenstein.dot(g).is_one()) {
            return Err(Error::NotQGorenstein);
        }
        let dual_lattice = lattice.dual();
        let dual = cone.dual();
        let dual_generators: Vec<RationalVector> =
            dual.rays().iter().map(|r| dual_lattice.primitive_along(r)).collect();
        let facet_sets: Vec<Vec<usize>> = generators
            .iter()
            .map(|g| (0..dual_generators.len()).filter(|&j| dual_generators[j].dot(g).is_zero()).collect())
            .collect();
        let all: Vec<usize> = (0..dual_generators.len()).collect();
        let covol = dual_lattice.covolume();
        let dual_simplices = triangulate_face(&dual_generators, &facet_sets, &all)
            .into_iter()
            .map(|s| {
                let m: linalg::Matrix = s.iter().map(|&j| dual_generators[j].coords().to_vec()).collect();
                let w = linalg::abs_det(&m) / &covol;
                (s, w)
            })
            .collect();
        Ok(ToricSingularity { lattice, cone, generators, gorenstein, dual_lattice, dual_generators, dual_simplices })
    }

    /// Smooth germ `C^n` (standard lattice, first orthant).
    pub fn smooth(n: usize) -> ToricSingularity {
        let rays: Vec<RationalVector> = (0..n).map(|i| RationalVector::unit(n, i)).collect();
        Self::new(Lattice::standard(n), &rays).expect("the orthant is a valid toric singularity")
    }

    /// `C^n / mu_r` acting with weights `a`: lattice `Z^n + Z a/r`, orthant cone.
    pub fn from_cyclic_quotient(r: u64, a: &[i64]) -> Result<ToricSingularity, Error> {
        let n = a.len();
        if n == 0 {
            return Err(Error::InvalidQuotient("weight vector is empty".into()));
        }
        if r == 0 {
            return Err(Error::InvalidQuotient("group order must be positive".into()));
        }
        let rb = BigInt::from(r);
        if r > 1 {
            if let Some(ai) = a.iter().find(|&&ai| !BigInt::from(ai).gcd(&rb).is_one()) {
                return Err(Error::InvalidQuotient(format!(
                    "weight {ai} shares a factor with {r}; the fixed locus is not isolated"
                )));
            }
        }
        let mut gens: Vec<RationalVector> = (0..n).map(|i| RationalVector::unit(n, i)).collect();
        gens.push(RationalVector::new(
            a.iter().map(|&ai| Rational::new(BigInt::from(ai).mod_floor(&rb), rb.clone())).collect(),
        ));
        let lattice = Lattice::generated_by(n, &gens)?;
        let rays: Vec<RationalVector> = (0..n).map(|i| RationalVector::unit(n, i)).collect();
        Self::new(lattice, &rays)
    }

    /// The same cone over a different lattice (used for finite covers).
    pub fn with_lattice(&self, lattice: Lattice) -> Result<ToricSingularity, Error> {
        Self::new(lattice, self.cone.rays())
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dual_lattice(&self) -> &Lattice {
        &self.dual_lattice
    }

    pub fn cone(&self) -> &PolyhedralCone {
        &self.cone
    }

    /// Lattice-primitive ray generators of `sigma`.
    pub fn generators(&self) -> &[RationalVector] {
        &self.generators
    }

    /// Lattice-primitive ray generators of `sigma^vee` (these are also the
    /// inward facet normals of `sigma`).
    pub fn dual_generators(&self) -> &[RationalVector] {
        &self.dual_generators
    }

    pub fn gorenstein_covector(&self) -> &RationalVector {
        &self.gorenstein
    }

    /// Sum of the primitive generators: an interior point with integral `A`.
    pub fn default_xi(&self) -> RationalVector {
        self.generators.iter().fold(RationalVector::zeros(self.dim()), |acc, g| &acc + g)
    }

    pub fn check_interior(&self, xi: &RationalVector) -> Result<(), Error> {
        if xi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: xi.dim() });
        }
        if self.dual_generators.iter().all(|y| y.dot(xi).is_positive()) {
            Ok(())
        } else {
            Err(Error::NotInterior { point: xi.clone() })
        }
    }

    pub fn log_discrepancy(&self, xi: &RationalVector) -> Result<Rational, Error> {
        self.check_interior(xi)?;
        Ok(self.gorenstein.dot(xi))
    }

    /// `n!` times the lattice-normalized volume of the slice of `sigma^vee`,
    /// by exact vertex enumeration.
    pub fn volume(&self, xi: &RationalVector) -> Result<Rational, Error> {
        self.check_interior(xi)?;
        let n = self.dim();
        let mut hs: Vec<Halfspace> =
            self.cone.rays().iter().map(|r| Halfspace::at_least(r.clone(), Rational::zero())).collect();
        hs.push(Halfspace::new(xi.clone(), Rational::one()));
        let p = hrep_to_vrep(&hs)?;
        let v = polytope_volume(&p, &self.dual_lattice);
        Ok(v.value * Rational::from_integer(factorial(n)))
    }

    /// Same quantity by summing over the cached simplicial subdivision of
    /// `sigma^vee`; an independent route used for cross-checks.
    pub fn volume_by_triangulation(&self, xi: &RationalVector) -> Result<Rational, Error> {
        self.check_interior(xi)?;
        let pairings: Vec<Rational> = self.dual_generators.iter().map(|y| y.dot(xi)).collect();
        Ok(self
            .dual_simplices
            .iter()
            .map(|(s, w)| s.iter().fold(w.clone(), |acc, &j| acc / &pairings[j]))
            .sum())
    }

    pub fn normalized_volume(&self, xi: &RationalVector) -> Result<Rational, Error> {
        let a = self.log_discrepancy(xi)?;
        Ok(pow(&a, self.dim()) * self.volume(xi)?)
    }

    /// Float evaluator of `vol` for the optimizer.
    pub fn float_volume(&self) -> FloatVolume {
        FloatVolume {
            dual_generators: self.dual_generators.iter().map(|y| y.to_f64()).collect(),
            simplices: self.dual_simplices.iter().map(|(s, w)| (s.clone(), to_f64(w))).collect(),
            gorenstein: self.gorenstein.to_f64(),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> ToricSingularity {
        let rays: Vec<RationalVector> = self.cone.rays().iter().map(|r| r.permuted(perm)).collect();
        Self::new(self.lattice.permuted(perm), &rays).expect("permutation preserves validity")
    }
}

/// Float mirror of the exact volume formula.
#[derive(Clone, Debug)]
pub struct FloatVolume {
    dual_generators: Vec<Vec<f64>>,
    simplices: Vec<(Vec<usize>, f64)>,
    gorenstein: Vec<f64>,
}

impl FloatVolume {
    pub fn dim(&self) -> usize {
        self.gorenstein.len()
    }

    pub fn gorenstein(&self) -> &[f64] {
        &self.gorenstein
    }

    /// `None` outside the open cone.
    pub fn volume(&self, xi: &[f64]) -> Option<f64> {
        let pairings: Vec<f64> = self.dual_generators.iter().map(|y| dot(y, xi)).collect();
        if pairings.iter().any(|&p| !(p > 0.0)) {
            return None;
        }
        Some(self.simplices.iter().map(|(s, w)| s.iter().fold(*w, |acc, &j| acc / pairings[j])).sum())
    }

    pub fn log_discrepancy(&self, xi: &[f64]) -> f64 {
        dot(&self.gorenstein, xi)
    }

    pub fn normalized_volume(&self, xi: &[f64]) -> Option<f64> {
        let a = self.log_discrepancy(xi);
        Some(a.powi(self.dim() as i32) * self.volume(xi)?)
    }

    pub fn min_pairing(&self, xi: &[f64]) -> f64 {
        self.dual_generators.iter().map(|y| dot(y, xi)).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of comparing a toric singularity with a finite cover given by a
/// sublattice of `N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverCheck {
    /// `[N : N']`, computed as a covolume ratio.
    #[serde(with = "crate::rational::serde_rational")]
    pub covolume_ratio: Rational,
    /// Normalized volume of `xi` on the cover divided by that on the base.
    #[serde(with = "crate::rational::serde_rational")]
    pub volume_ratio: Rational,
}

/// Compares `vol-hat` of `xi` on `X` and on the cover `X'` obtained by
/// replacing `N` with the sublattice `sub`. The cover must be unramified in
/// codimension one, which here means every primitive generator of `sigma`
/// already lies in `sub`.
pub fn finite_cover_scaling_check(
    s: &ToricSingularity,
    sub: &Lattice,
    xi: &RationalVector,
) -> Result<CoverCheck, Error> {
    if sub.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: sub.dim() });
    }
    if !s.lattice().contains_lattice(sub) {
        return Err(Error::InvalidCover("the given lattice is not a sublattice of N".into()));
    }
    if let Some(g) = s.generators().iter().find(|g| !sub.contains(g)) {
        return Err(Error::InvalidCover(format!("primitive generator {g} is not in the sublattice")));
    }
    let cover = s.with_lattice(sub.clone())?;
    let covolume_ratio = sub.covolume() / s.lattice().covolume();
    let volume_ratio = cover.normalized_volume(xi)? / s.normalized_volume(xi)?;
    Ok(CoverCheck { covolume_ratio, volume_ratio })
}

/// The valuation is integral on `M` exactly when `xi` lies in `N`; returns the
/// smallest positive multiple of `xi` that does.
pub fn integral_multiple(s: &ToricSingularity, xi: &RationalVector) -> RationalVector {
    let z = s.lattice().coordinates(xi);
    let den = crate::rational::lcm_of_denominators(z.coords());
    xi.scale(&Rational::from_integer(den))
}

pub fn unit_xi(n: usize) -> RationalVector {
    RationalVector::new(vec![int(1); n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn xi(v: &[i64]) -> RationalVector {
        RationalVector::from_i64s(v)
    }

    #[test]
    fn smooth_plane() {
        let s = ToricSingularity::smooth(2);
        assert_eq!(s.gorenstein_covector(), &xi(&[1, 1]));
        assert_eq!(s.log_discrepancy(&xi(&[1, 1])).unwrap(), int(2));
        assert_eq!(s.log_discrepancy(&xi(&[1, 2])).unwrap(), int(3));
        assert_eq!(s.volume(&xi(&[1, 1])).unwrap(), int(1));
        assert_eq!(s.volume(&xi(&[1, 2])).unwrap(), rat(1, 2));
        assert_eq!(s.normalized_volume(&xi(&[1, 1])).unwrap(), int(4));
        assert_eq!(s.normalized_volume(&xi(&[1, 2])).unwrap(), rat(9, 2));
    }

    #[test]
    fn one_third_one_one() {
        let s = ToricSingularity::from_cyclic_quotient(3, &[1, 1]).unwrap();
        assert_eq!(s.lattice().covolume(), rat(1, 3));
        assert_eq!(s.gorenstein_covector(), &xi(&[1, 1]));
        assert_eq!(s.log_discrepancy(&xi(&[1, 1])).unwrap(), int(2));
        assert_eq!(s.volume(&xi(&[1, 1])).unwrap(), rat(1, 3));
        assert_eq!(s.normalized_volume(&xi(&[1, 1])).unwrap(), rat(4, 3));
        assert_eq!(s.volume_by_triangulation(&xi(&[1, 1])).unwrap(), rat(1, 3));
    }

    #[test]
    fn trivial_quotient_and_errors() {
        let s = ToricSingularity::from_cyclic_quotient(1, &[0, 0]).unwrap();
        assert_eq!(s.gorenstein_covector(), &xi(&[1, 1]));
        assert!(matches!(ToricSingularity::from_cyclic_quotient(4, &[1, 2]), Err(Error::InvalidQuotient(_))));
        assert!(matches!(s.volume(&xi(&[1, 0])), Err(Error::NotInterior { .. })));
        assert!(matches!(s.volume(&xi(&[1, 0, 1])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn non_gorenstein_cone_rejected() {
        let rays = vec![xi(&[1, 0, 0]), xi(&[0, 1, 0]), xi(&[0, 0, 1]), xi(&[2, 1, -1])];
        let r = ToricSingularity::new(Lattice::standard(3), &rays);
        assert!(matches!(r, Err(Error::NotQGorenstein)), "{r:?}");
    }

    #[test]
    fn quotient_one_fifth() {
        let s = ToricSingularity::from_cyclic_quotient(5, &[1, 2]).unwrap();
        assert_eq!(s.normalized_volume(&xi(&[1, 1])).unwrap(), rat(4, 5));
        let f = s.float_volume();
        assert!((f.normalized_volume(&[1.0, 1.0]).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn covers_scale_normalized_volume() {
        let base = ToricSingularity::from_cyclic_quotient(3, &[1, 1]).unwrap();
        let c = finite_cover_scaling_check(&base, &Lattice::standard(2), &xi(&[1, 1])).unwrap();
        assert_eq!(c.covolume_ratio, int(3));
        assert_eq!(c.volume_ratio, int(3));
        let c = finite_cover_scaling_check(&base, base.lattice(), &xi(&[1, 2])).unwrap();
        assert_eq!((c.covolume_ratio, c.volume_ratio), (int(1), int(1)));
        let half = ToricSingularity::from_cyclic_quotient(2, &[1, 1]).unwrap();
        let c = finite_cover_scaling_check(&half, &Lattice::standard(2), &xi(&[1, 1])).unwrap();
        assert_eq!((c.covolume_ratio, c.volume_ratio), (int(2), int(2)));
        let bad = Lattice::from_basis(&[xi(&[2, 0]), xi(&[0, 1])]).unwrap();
        assert!(matches!(
            finite_cover_scaling_check(&ToricSingularity::smooth(2), &bad, &xi(&[1, 1])),
            Err(Error::InvalidCover(_))
        ));
    }
}
