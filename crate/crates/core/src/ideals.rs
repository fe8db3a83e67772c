//! Monomial ideals of a toric singularity: Newton polyhedra, multiplicity,
//! log canonical threshold, and the valuative ideals of a toric valuation.
//!
//! Exponents are points of `sigma^vee ∩ M` written in the ambient coordinates
//! of the dual space, so for the smooth germ they are ordinary exponent vectors.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::dd;
use crate::geometry::linalg;
use crate::geometry::lp::{lp_optimize, Sense};
use crate::geometry::polytope::{homogenize, triangulate_face};
use crate::geometry::{Halfspace, RationalVector};
use crate::rational::{lcm_of_denominators, pow, Rational};
use crate::toric::ToricSingularity;
use crate::Error;

#[derive(Clone, Debug)]
pub struct MonomialIdeal {
    ambient: Arc<ToricSingularity>,
    /// Minimal generators, sorted.
    generators: Vec<RationalVector>,
}

/// A facet `<normal, y> >= offset` of a Newton polyhedron.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct NewtonFacet {
    pub normal: RationalVector,
    #[serde(with = "crate::rational::serde_rational")]
    pub offset: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewtonPolyhedron {
    /// All facets, including those of `sigma^vee` itself (offset 0), sorted.
    pub facets: Vec<NewtonFacet>,
    /// Generators that are vertices of the polyhedron.
    pub vertices: Vec<RationalVector>,
}

impl NewtonPolyhedron {
    pub fn contains(&self, y: &RationalVector) -> bool {
        self.facets.iter().all(|f| f.normal.dot(y) >= f.offset)
    }

    pub fn to_halfspaces(&self) -> Vec<Halfspace> {
        self.facets.iter().map(|f| Halfspace::at_least(f.normal.clone(), f.offset.clone())).collect()
    }
}

impl MonomialIdeal {
    /// The ideal generated by the given monomials; generators are reduced to
    /// the minimal antichain.
    pub fn new(ambient: Arc<ToricSingularity>, generators: Vec<RationalVector>) -> Result<MonomialIdeal, Error> {
        if generators.is_empty() {
            return Err(Error::InvalidInput("a monomial ideal needs at least one generator".into()));
        }
        let n = ambient.dim();
        for g in &generators {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
            }
            if !ambient.dual_lattice().contains(g) {
                return Err(Error::InvalidInput(format!("exponent {g} is not a lattice point of M")));
            }
            if ambient.cone().rays().iter().any(|r| r.dot(g).is_negative()) {
                return Err(Error::InvalidInput(format!("exponent {g} lies outside the dual cone")));
            }
        }
        let generators = minimal_antichain(&ambient, generators);
        Ok(MonomialIdeal { ambient, generators })
    }

    pub fn smooth(n: usize, exponents: &[Vec<i64>]) -> Result<MonomialIdeal, Error> {
        let gens = exponents.iter().map(|e| RationalVector::from_i64s(e)).collect();
        Self::new(Arc::new(ToricSingularity::smooth(n)), gens)
    }

    pub fn unit(ambient: Arc<ToricSingularity>) -> MonomialIdeal {
        let n = ambient.dim();
        MonomialIdeal { ambient, generators: vec![RationalVector::zeros(n)] }
    }

    pub fn ambient(&self) -> &Arc<ToricSingularity> {
        &self.ambient
    }

    pub fn generators(&self) -> &[RationalVector] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.is_zero())
    }

    /// Whether the monomial `y` lies in the ideal.
    pub fn contains_monomial(&self, y: &RationalVector) -> bool {
        self.generators.iter().any(|g| divides(&self.ambient, g, y))
    }

    pub fn contains_ideal(&self, other: &MonomialIdeal) -> bool {
        other.generators.iter().all(|g| self.contains_monomial(g))
    }

    pub fn product(&self, other: &MonomialIdeal) -> MonomialIdeal {
        let gens: Vec<RationalVector> =
            self.generators.iter().flat_map(|a| other.generators.iter().map(move |b| a + b)).collect();
        MonomialIdeal { generators: minimal_antichain(&self.ambient, gens), ambient: self.ambient.clone() }
    }

    pub fn power(&self, k: usize) -> MonomialIdeal {
        let mut out = MonomialIdeal::unit(self.ambient.clone());
        for _ in 0..k {
            out = out.product(self);
        }
        out
    }

    /// Facets of `conv(generators) + sigma^vee`, from the cone over the
    /// generators at height one and the generators of `sigma^vee` at height 0.
    pub fn newton_polyhedron(&self) -> NewtonPolyhedron {
        let n = self.dim();
        let one = Rational::one();
        let mut rows: Vec<RationalVector> =
            self.ambient.dual_generators().iter().map(|r| homogenize(r, Rational::zero())).collect();
        rows.extend(self.generators.iter().map(|g| homogenize(g, one.clone())));
        let out = dd::extreme_rays(&rows, n + 1).expect("the dual cone generators span");
        let mut facets: Vec<NewtonFacet> = out
            .rays
            .iter()
            .map(|r| RationalVector::from_bigints(r))
            .filter(|v| !v.coords()[..n].iter().all(Zero::is_zero))
            .map(|v| NewtonFacet { normal: RationalVector::new(v.coords()[..n].to_vec()), offset: -v[n].clone() })
            .collect();
        facets.sort();
        let vertices = self
            .generators
            .iter()
            .filter(|g| {
                let tight: Vec<Vec<Rational>> = facets
                    .iter()
                    .filter(|f| f.normal.dot(g) == f.offset)
                    .map(|f| homogenize(&f.normal, -f.offset.clone()).into_coords())
                    .collect();
                tight.len() >= n && linalg::rank(&tight) == n
            })
            .cloned()
            .collect();
        NewtonPolyhedron { facets, vertices }
    }

    /// `sigma^vee` minus the Newton polyhedron is bounded.
    pub fn is_primary(&self) -> bool {
        self.primary_obstruction(&self.newton_polyhedron()).is_none()
    }

    fn primary_obstruction(&self, p: &NewtonPolyhedron) -> Option<String> {
        for f in p.facets.iter().filter(|f| f.offset.is_positive()) {
            if let Some(r) = self.ambient.dual_generators().iter().find(|r| f.normal.dot(r).is_zero()) {
                return Some(format!("the ray through {r} never enters the Newton polyhedron"));
            }
        }
        None
    }

    /// Hilbert-Samuel multiplicity: `n!` times the normalized covolume of the
    /// Newton polyhedron inside `sigma^vee`.
    pub fn multiplicity(&self) -> Result<Rational, Error> {
        self.multiplicity_on(&self.newton_polyhedron())
    }

    fn multiplicity_on(&self, p: &NewtonPolyhedron) -> Result<Rational, Error> {
        if self.is_unit() {
            return Ok(Rational::zero());
        }
        if let Some(why) = self.primary_obstruction(p) {
            return Err(Error::NotPrimary(why));
        }
        let n = self.dim();
        // The region is the union of the pyramids with apex 0 over the compact
        // facets; triangulate each compact facet on the vertex set.
        let points: Vec<RationalVector> = p.vertices.iter().map(|v| homogenize(v, Rational::one())).collect();
        let tight: Vec<Vec<usize>> = p
            .facets
            .iter()
            .map(|f| (0..p.vertices.len()).filter(|&i| f.normal.dot(&p.vertices[i]) == f.offset).collect())
            .collect();
        let mut total = Rational::zero();
        for (f, face) in p.facets.iter().zip(&tight) {
            if !f.offset.is_positive() {
                continue;
            }
            for simplex in triangulate_face(&points, &tight, face) {
                debug_assert_eq!(simplex.len(), n);
                let m: linalg::Matrix = simplex.iter().map(|&i| p.vertices[i].coords().to_vec()).collect();
                total += linalg::abs_det(&m);
            }
        }
        Ok(total / self.ambient.dual_lattice().covolume())
    }

    /// `max { c : u in c * P }`, as a one-variable linear program over the
    /// facets of the Newton polyhedron.
    pub fn lct(&self) -> Result<Rational, Error> {
        self.lct_on(&self.newton_polyhedron())
    }

    fn lct_on(&self, p: &NewtonPolyhedron) -> Result<Rational, Error> {
        let u = self.ambient.gorenstein_covector();
        let rows: Vec<Halfspace> = p
            .facets
            .iter()
            .filter(|f| f.offset.is_positive())
            .map(|f| Halfspace::new(RationalVector::new(vec![f.offset.clone()]), f.normal.dot(u)))
            .collect();
        if rows.is_empty() {
            return Err(Error::InvalidInput("the unit ideal has no log canonical threshold".into()));
        }
        let sol = lp_optimize(&RationalVector::new(vec![Rational::one()]), &rows, Sense::Max)?;
        Ok(sol.value)
    }

    /// `lct^n * mult`.
    pub fn normalized_multiplicity(&self) -> Result<Rational, Error> {
        Ok(pow(&self.lct()?, self.dim()) * self.multiplicity()?)
    }
}

/// `a | b` in the semigroup ring: `b - a` lies in `sigma^vee ∩ M`.
fn divides(s: &ToricSingularity, a: &RationalVector, b: &RationalVector) -> bool {
    let d = b - a;
    s.cone().rays().iter().all(|r| !r.dot(&d).is_negative()) && s.dual_lattice().contains(&d)
}

fn minimal_antichain(s: &ToricSingularity, mut gens: Vec<RationalVector>) -> Vec<RationalVector> {
    let xi0 = s.default_xi();
    gens.sort_by(|a, b| a.dot(&xi0).cmp(&b.dot(&xi0)).then_with(|| a.cmp(b)));
    gens.dedup();
    let mut kept: Vec<RationalVector> = Vec::new();
    for g in gens {
        if !kept.iter().any(|k| divides(s, k, &g)) {
            kept.push(g);
        }
    }
    kept.sort();
    kept
}

/// `a_k(xi) = { f : v_xi(f) >= k }`, generated by the minimal lattice points of
/// `sigma^vee` with `<y, xi> >= k`. Returns the unit ideal for `k <= 0`.
pub fn valuative_ideal(s: &Arc<ToricSingularity>, xi: &RationalVector, k: &Rational) -> Result<MonomialIdeal, Error> {
    s.check_interior(xi)?;
    if !k.is_positive() {
        return Ok(MonomialIdeal::unit(s.clone()));
    }
    let n = s.dim();
    let m_basis = s.dual_lattice().basis_vectors();
    // Everything below is in lattice coordinates z of M, with integer data.
    let ray_rows: Vec<Vec<i64>> = s
        .generators()
        .iter()
        .map(|g| m_basis.iter().map(|b| to_i64(&b.dot(g))).collect())
        .collect();
    let xi_q: Vec<Rational> = m_basis.iter().map(|b| b.dot(xi)).collect();
    let den = lcm_of_denominators(xi_q.iter().chain(std::iter::once(k)));
    let scale = Rational::from_integer(den);
    let xi_z: Vec<i64> = xi_q.iter().map(|q| to_i64(&(q * &scale))).collect();
    let k_z = to_i64(&(k * &scale));
    // Minimal elements pair below k + sum_j <rho_j, xi>.
    let pairings: Vec<Rational> = s.dual_generators().iter().map(|r| r.dot(xi)).collect();
    let bound = k + pairings.iter().sum::<Rational>();
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for (r, p) in s.dual_generators().iter().zip(&pairings) {
        let z = s.dual_lattice().coordinates(&r.scale(&(&bound / p)));
        for i in 0..n {
            lo[i] = lo[i].min(to_i64(&z[i].floor()));
            hi[i] = hi[i].max(to_i64(&z[i].ceil()));
        }
    }
    let bound_z = to_i64(&(&bound * &scale).ceil());
    let mut candidates: Vec<(i64, Vec<i64>, Vec<i64>)> = Vec::new();
    let mut z = lo.clone();
    'outer: loop {
        let val: i64 = z.iter().zip(&xi_z).map(|(a, b)| a * b).sum();
        if val >= k_z && val < bound_z {
            let rp: Vec<i64> = ray_rows.iter().map(|r| r.iter().zip(&z).map(|(a, b)| a * b).sum()).collect();
            if rp.iter().all(|&x| x >= 0) {
                candidates.push((val, rp, z.clone()));
            }
        }
        for i in 0..n {
            if z[i] < hi[i] {
                z[i] += 1;
                continue 'outer;
            }
            z[i] = lo[i];
        }
        break;
    }
    candidates.sort();
    let mut minimal: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    for (_, rp, z) in candidates {
        if !minimal.iter().any(|(mrp, _)| mrp.iter().zip(&rp).all(|(a, b)| a <= b)) {
            minimal.push((rp, z));
        }
    }
    let gens: Vec<RationalVector> = minimal
        .into_iter()
        .map(|(_, z)| {
            let zq: Vec<Rational> = z.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
            s.dual_lattice().from_coordinates(&zq)
        })
        .collect();
    let mut gens = gens;
    gens.sort();
    Ok(MonomialIdeal { ambient: s.clone(), generators: gens })
}

fn to_i64(q: &Rational) -> i64 {
    assert!(q.is_integer(), "expected an integer, got {q}");
    q.to_integer().to_i64().expect("lattice coordinates fit in 64 bits")
}

/// The graded family `k -> a_k(xi)` of a toric valuation.
#[derive(Clone, Debug)]
pub struct GradedFamily {
    pub ambient: Arc<ToricSingularity>,
    pub xi: RationalVector,
}

impl GradedFamily {
    pub fn new(ambient: Arc<ToricSingularity>, xi: RationalVector) -> Result<GradedFamily, Error> {
        ambient.check_interior(&xi)?;
        Ok(GradedFamily { ambient, xi })
    }

    pub fn member(&self, k: &Rational) -> MonomialIdeal {
        valuative_ideal(&self.ambient, &self.xi, k).expect("xi was validated at construction")
    }

    /// Checks `a_k * a_l ⊆ a_{k+l}`.
    pub fn is_graded_at(&self, k: &Rational, l: &Rational) -> bool {
        let prod = self.member(k).product(&self.member(l));
        self.member(&(k + l)).contains_ideal(&prod)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub k: u32,
    #[serde(with = "crate::rational::serde_rational")]
    pub lct: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub multiplicity: Rational,
    /// `A(xi)^n * mult(a_k) / k^n`.
    #[serde(with = "crate::rational::serde_rational")]
    pub scaled_multiplicity: Rational,
    /// `lct(a_k)^n * mult(a_k)`.
    #[serde(with = "crate::rational::serde_rational")]
    pub normalized_multiplicity: Rational,
}

impl ConvergenceRow {
    /// The finite-stage inequality `lct^n mult <= A^n mult / k^n`.
    pub fn inequality_holds(&self) -> bool {
        self.normalized_multiplicity <= self.scaled_multiplicity
    }
}

/// Rows for `k = 1..=k_max`, computed in parallel and returned in order.
pub fn convergence_report(
    s: &Arc<ToricSingularity>,
    xi: &RationalVector,
    k_max: u32,
) -> Result<Vec<ConvergenceRow>, Error> {
    let a = s.log_discrepancy(xi)?;
    let n = s.dim();
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let kq = Rational::from_integer(BigInt::from(k));
            let ideal = valuative_ideal(s, xi, &kq)?;
            let newton = ideal.newton_polyhedron();
            let mult = ideal.multiplicity_on(&newton)?;
            let lct = ideal.lct_on(&newton)?;
            Ok(ConvergenceRow {
                k,
                scaled_multiplicity: pow(&a, n) * &mult / pow(&kq, n),
                normalized_multiplicity: pow(&lct, n) * &mult,
                lct,
                multiplicity: mult,
            })
        })
        .collect()
}
