use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::linalg::{self, Matrix};
use super::RationalVector;
use crate::rational::{lcm_of_denominators, Rational};
use crate::Error;

/// Full-rank lattice inside `Q^d`, stored by a basis (the columns of `basis`).
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    basis: Matrix,
    inverse: Matrix,
}

impl Lattice {
    pub fn standard(dim: usize) -> Lattice {
        Lattice { basis: linalg::identity(dim), inverse: linalg::identity(dim) }
    }

    /// `columns[j]` is the j-th basis vector.
    pub fn from_basis(columns: &[RationalVector]) -> Result<Lattice, Error> {
        let dim = columns.len();
        if let Some(c) = columns.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
        }
        let basis = linalg::transpose(&columns.iter().map(|c| c.coords().to_vec()).collect());
        let inverse = linalg::inverse(&basis).ok_or(Error::SingularLattice)?;
        Ok(Lattice { basis, inverse })
    }

    /// The lattice generated by an arbitrary finite set of rational vectors
    /// (which must span). Uses an integer Hermite reduction after clearing
    /// denominators.
    pub fn generated_by(dim: usize, generators: &[RationalVector]) -> Result<Lattice, Error> {
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
        let den = lcm_of_denominators(generators.iter().flat_map(|g| g.coords()));
        let scale = Rational::from_integer(den.clone());
        let mut rows: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| g.coords().iter().map(|q| (q * &scale).to_integer()).collect())
            .collect();
        let basis_rows = hermite_rows(&mut rows, dim);
        if basis_rows.len() < dim {
            return Err(Error::SingularLattice);
        }
        let cols: Vec<RationalVector> = basis_rows
            .iter()
            .map(|r| RationalVector::new(r.iter().map(|x| Rational::new(x.clone(), den.clone())).collect()))
            .collect();
        Lattice::from_basis(&cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_vectors(&self) -> Vec<RationalVector> {
        linalg::transpose(&self.basis).into_iter().map(RationalVector::new).collect()
    }

    /// Absolute determinant of the basis.
    pub fn covolume(&self) -> Rational {
        linalg::abs_det(&self.basis)
    }

    /// Coordinates of `x` with respect to the lattice basis.
    pub fn coordinates(&self, x: &RationalVector) -> RationalVector {
        RationalVector::new(linalg::mat_vec(&self.inverse, x.coords()))
    }

    pub fn from_coordinates(&self, z: &[Rational]) -> RationalVector {
        RationalVector::new(linalg::mat_vec(&self.basis, z))
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        self.coordinates(x).is_integral()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis_vectors().iter().all(|b| self.contains(b))
    }

    /// `{ m : <m, x> in Z for all x in self }`, with basis the inverse transpose.
    pub fn dual(&self) -> Lattice {
        Lattice { basis: linalg::transpose(&self.inverse), inverse: linalg::transpose(&self.basis) }
    }

    /// Positive multiple of the direction `r` that is primitive in this lattice.
    pub fn primitive_along(&self, r: &RationalVector) -> RationalVector {
        let z = self.coordinates(r).primitive();
        self.from_coordinates(z.coords())
    }

    pub fn index_in(&self, sup: &Lattice) -> Rational {
        self.covolume() / sup.covolume()
    }

    pub fn permuted(&self, perm: &[usize]) -> Lattice {
        let cols: Vec<RationalVector> = self.basis_vectors().iter().map(|b| b.permuted(perm)).collect();
        Lattice::from_basis(&cols).expect("permutation preserves nonsingularity")
    }
}

/// Integer row reduction to echelon form; returns the nonzero rows (a basis of
/// the row lattice).
fn hermite_rows(rows: &mut Vec<Vec<BigInt>>, dim: usize) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    let mut work: Vec<Vec<BigInt>> = std::mem::take(rows);
    for c in 0..dim {
        loop {
            let nz: Vec<usize> = (0..work.len()).filter(|&i| !work[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| work[i][c].abs()).unwrap();
            let pivot = work[p].clone();
            for &i in &nz {
                if i == p {
                    continue;
                }
                let q = work[i][c].div_floor(&pivot[c]);
                for j in 0..dim {
                    let t = &q * &pivot[j];
                    work[i][j] -= t;
                }
            }
        }
        if let Some(p) = (0..work.len()).find(|&i| !work[i][c].is_zero()) {
            let mut row = work.remove(p);
            if row[c].is_negative() {
                row.iter_mut().for_each(|x| *x = -x.clone());
            }
            out.push(row);
        }
    }
    debug_assert!(work.iter().all(|r| r.iter().all(|x| x.is_zero())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn cyclic_quotient_lattice_has_covolume_one_third() {
        let gens = vec![
            RationalVector::from_i64s(&[1, 0]),
            RationalVector::from_i64s(&[0, 1]),
            RationalVector::new(vec![rat(1, 3), rat(1, 3)]),
        ];
        let n = Lattice::generated_by(2, &gens).unwrap();
        assert_eq!(n.covolume(), rat(1, 3));
        assert!(n.contains(&RationalVector::new(vec![rat(2, 3), rat(2, 3)])));
        assert!(!n.contains(&RationalVector::new(vec![rat(1, 3), rat(2, 3)])));
        let m = n.dual();
        assert_eq!(m.covolume(), int(3));
        assert!(m.contains(&RationalVector::from_i64s(&[1, 2])));
        assert!(!m.contains(&RationalVector::from_i64s(&[1, 0])));
    }

    #[test]
    fn primitive_generators_respect_the_lattice() {
        let gens = vec![
            RationalVector::from_i64s(&[1, 0]),
            RationalVector::from_i64s(&[0, 1]),
            RationalVector::new(vec![rat(1, 4), rat(1, 2)]),
        ];
        let n = Lattice::generated_by(2, &gens).unwrap();
        assert_eq!(n.covolume(), rat(1, 4));
        // 2*(1/4,1/2) - (0,1) = (1/2,0) lies in N, while nothing shorter than e2
        // lies on the second axis.
        let p = n.primitive_along(&RationalVector::from_i64s(&[0, 5]));
        assert_eq!(p, RationalVector::from_i64s(&[0, 1]));
        let p = n.primitive_along(&RationalVector::from_i64s(&[3, 0]));
        assert_eq!(p, RationalVector::new(vec![rat(1, 2), int(0)]));
    }

    #[test]
    fn singular_basis_rejected() {
        let cols = vec![RationalVector::from_i64s(&[1, 2]), RationalVector::from_i64s(&[2, 4])];
        assert_eq!(Lattice::from_basis(&cols), Err(Error::SingularLattice));
    }
}
