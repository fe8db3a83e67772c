use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dd;
use super::linalg::{self, Matrix};
use super::lp::{self, Sense};
use super::{Lattice, RationalVector};
use crate::rational::{factorial, Rational};
use crate::Error;

/// Largest ambient dimension accepted by [`hrep_to_vrep`].
pub const MAX_DIM: usize = 8;

/// The halfspace `<normal, x> <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: RationalVector,
    #[serde(with = "crate::rational::serde_rational")]
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: RationalVector, offset: Rational) -> Halfspace {
        Halfspace { normal, offset }
    }

    /// `<normal, x> >= offset`, rewritten in `<=` form.
    pub fn at_least(normal: RationalVector, offset: Rational) -> Halfspace {
        Halfspace { normal: -&normal, offset: -offset }
    }

    pub fn slack(&self, x: &RationalVector) -> Rational {
        &self.offset - self.normal.dot(x)
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        !self.slack(x).is_negative()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundedPolytope {
    dim: usize,
    vertices: Vec<RationalVector>,
    halfspaces: Vec<Halfspace>,
    /// For each halfspace, the vertices on which it is tight.
    tight: Vec<Vec<usize>>,
}

/// Volume with a flag for lower-dimensional input.
#[derive(Clone, Debug, PartialEq)]
pub struct Volume {
    pub value: Rational,
    pub degenerate: bool,
}

impl BoundedPolytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Convex hull of a point set; the halfspace description is computed.
    pub fn from_points(points: &[RationalVector]) -> Result<BoundedPolytope, Error> {
        let Some(first) = points.first() else {
            return Err(Error::EmptyPolytope);
        };
        let dim = first.dim();
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
        }
        let homog: Vec<RationalVector> = points.iter().map(|p| homogenize(p, Rational::from_integer(1.into()))).collect();
        // Facet normals (a, b) of the cone over (p, 1): <a,p> + b >= 0.
        let out = match dd::extreme_rays(&homog, dim + 1) {
            Ok(o) => o,
            Err(_) => return Ok(degenerate_hull(points, dim)),
        };
        let halfspaces: Vec<Halfspace> = out
            .rays
            .iter()
            .map(|r| {
                let v = RationalVector::from_bigints(r);
                let a = RationalVector::new(v.coords()[..dim].to_vec());
                Halfspace::at_least(a, -v[dim].clone())
            })
            .collect();
        hrep_to_vrep(&halfspaces)
    }

    /// Indices of vertices tight on each facet-defining halfspace.
    pub fn facet_vertex_sets(&self) -> Vec<Vec<usize>> {
        let full = self.affine_rank(&(0..self.vertices.len()).collect::<Vec<_>>());
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for t in &self.tight {
            if !t.is_empty() && self.affine_rank(t) + 1 == full {
                sets.insert(t.clone());
            }
        }
        sets.into_iter().collect()
    }

    fn affine_rank(&self, idx: &[usize]) -> usize {
        let rows: Vec<Vec<Rational>> = idx
            .iter()
            .map(|&i| homogenize(&self.vertices[i], Rational::from_integer(1.into())).into_coords())
            .collect();
        linalg::rank(&rows)
    }

    /// Exact barycenter (center of mass) of a full-dimensional polytope.
    pub fn barycenter(&self) -> Option<RationalVector> {
        let simplices = self.triangulation();
        let mut total = Rational::zero();
        let mut moment = RationalVector::zeros(self.dim);
        for s in &simplices {
            let pts: Vec<&RationalVector> = s.iter().map(|&i| &self.vertices[i]).collect();
            let vol = simplex_abs_det(&pts);
            let mut c = RationalVector::zeros(self.dim);
            for p in &pts {
                c = &c + *p;
            }
            moment = &moment + &c.scale(&(&vol / Rational::from_integer((self.dim + 1).into())));
            total += vol;
        }
        if total.is_zero() {
            return None;
        }
        Some(moment.scale(&total.recip()))
    }

    /// Pulling triangulation into full-dimensional simplices (vertex indices).
    pub fn triangulation(&self) -> Vec<Vec<usize>> {
        let homog: Vec<RationalVector> = self
            .vertices
            .iter()
            .map(|v| homogenize(v, Rational::from_integer(1.into())))
            .collect();
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        if linalg::rank(&homog.iter().map(|h| h.coords().to_vec()).collect::<Vec<_>>()) < self.dim + 1 {
            return Vec::new();
        }
        triangulate_face(&homog, &self.tight, &all)
    }
}

fn degenerate_hull(points: &[RationalVector], dim: usize) -> BoundedPolytope {
    let mut vertices: Vec<RationalVector> = points.to_vec();
    vertices.sort();
    vertices.dedup();
    BoundedPolytope { dim, vertices, halfspaces: Vec::new(), tight: Vec::new() }
}

pub(crate) fn homogenize(v: &RationalVector, last: Rational) -> RationalVector {
    let mut c = v.coords().to_vec();
    c.push(last);
    RationalVector::new(c)
}

/// Exact vertex enumeration of a bounded halfspace system.
pub fn hrep_to_vrep(halfspaces: &[Halfspace]) -> Result<BoundedPolytope, Error> {
    let Some(first) = halfspaces.first() else {
        return Err(Error::InvalidInput("no halfspaces given".into()));
    };
    let dim = first.normal.dim();
    if let Some(h) = halfspaces.iter().find(|h| h.normal.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: h.normal.dim() });
    }
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
    }
    // b t - <a, x> >= 0 together with t >= 0.
    let mut rows: Vec<RationalVector> = halfspaces.iter().map(|h| homogenize(&-&h.normal, h.offset.clone())).collect();
    rows.push(RationalVector::unit(dim + 1, dim));
    let out = match dd::extreme_rays(&rows, dim + 1) {
        Ok(o) => o,
        Err(l) => {
            // A lineality direction has t = 0, so it is a recession line unless
            // the system is empty.
            let zero = RationalVector::zeros(dim);
            return match lp::lp_optimize(&zero, halfspaces, Sense::Max) {
                Err(Error::Infeasible) => Err(Error::EmptyPolytope),
                _ => Err(Error::Unbounded { direction: RationalVector::new(l.witness.coords()[..dim].to_vec()) }),
            };
        }
    };
    let mut vertices = Vec::new();
    for r in &out.rays {
        let v = RationalVector::from_bigints(r);
        if v[dim].is_zero() {
            if out.rays.iter().any(|s| s[dim].is_positive()) {
                return Err(Error::Unbounded { direction: RationalVector::new(v.coords()[..dim].to_vec()) });
            }
        } else {
            let t = v[dim].recip();
            vertices.push(RationalVector::new(v.coords()[..dim].iter().map(|x| x * &t).collect()));
        }
    }
    if vertices.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    vertices.sort();
    let tight = halfspaces
        .iter()
        .map(|h| (0..vertices.len()).filter(|&i| h.slack(&vertices[i]).is_zero()).collect())
        .collect();
    Ok(BoundedPolytope { dim, vertices, halfspaces: halfspaces.to_vec(), tight })
}

/// `|det|` of the simplex spanned by `d + 1` points in dimension `d`, divided by `d!`.
fn simplex_abs_det(pts: &[&RationalVector]) -> Rational {
    let d = pts[0].dim();
    let m: Matrix = pts[1..].iter().map(|p| (*p - pts[0]).into_coords()).collect();
    linalg::abs_det(&m) / Rational::from_integer(factorial(d))
}

/// Lattice-normalized volume (Euclidean volume over the covolume of `lattice`).
pub fn polytope_volume(p: &BoundedPolytope, lattice: &Lattice) -> Volume {
    let simplices = p.triangulation();
    if simplices.is_empty() {
        return Volume { value: Rational::zero(), degenerate: true };
    }
    let mut total = Rational::zero();
    for s in &simplices {
        let pts: Vec<&RationalVector> = s.iter().map(|&i| &p.vertices[i]).collect();
        total += simplex_abs_det(&pts);
    }
    Volume { value: total / lattice.covolume(), degenerate: false }
}

fn rank_of(points: &[RationalVector], idx: &[usize]) -> usize {
    let rows: Vec<Vec<Rational>> = idx.iter().map(|&i| points[i].coords().to_vec()).collect();
    linalg::rank(&rows)
}

/// Triangulates the cone spanned by `points[face]` into simplicial cones by
/// pulling the smallest index. `facet_sets` lists, for each facet of the
/// ambient cone, the indices of the points on it; every face of the ambient
/// cone is an intersection of these. Returns index sets of size `rank(face)`.
pub fn triangulate_face(points: &[RationalVector], facet_sets: &[Vec<usize>], face: &[usize]) -> Vec<Vec<usize>> {
    let k = rank_of(points, face);
    triangulate_rec(points, facet_sets, face, k)
}

fn triangulate_rec(points: &[RationalVector], facet_sets: &[Vec<usize>], face: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return Vec::new();
    }
    if k == 1 {
        return vec![vec![face[0]]];
    }
    if face.len() == k {
        return vec![face.to_vec()];
    }
    let apex = face[0];
    let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for s in facet_sets {
        let g: Vec<usize> = face.iter().copied().filter(|i| s.binary_search(i).is_ok()).collect();
        if g.len() < k - 1 || g.len() == face.len() || g.contains(&apex) {
            continue;
        }
        if rank_of(points, &g) == k - 1 {
            subfaces.insert(g);
        }
    }
    let mut out = Vec::new();
    for g in subfaces {
        for mut simplex in triangulate_rec(points, facet_sets, &g, k - 1) {
            simplex.insert(0, apex);
            out.push(simplex);
        }
    }
    out
}
