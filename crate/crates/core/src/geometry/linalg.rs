//! Small dense exact linear algebra over the rationals. Matrices are row-major
//! `Vec<Vec<Rational>>`; everything here is sized for dimension <= 9.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_vec(m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let bt = transpose(b);
    a.iter().map(|row| mat_vec(&bt, row)).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Indices of a maximal linearly independent subset of `rows`, chosen greedily
/// in input order.
pub fn independent_rows(rows: &[Vec<Rational>]) -> Vec<usize> {
    let mut basis: Matrix = Vec::new();
    let mut chosen = Vec::new();
    let width = rows.first().map_or(0, |r| r.len());
    for (i, row) in rows.iter().enumerate() {
        if chosen.len() == width {
            break;
        }
        let mut candidate = basis.clone();
        candidate.push(row.clone());
        if rank(&candidate) == candidate.len() {
            basis = candidate;
            chosen.push(i);
        }
    }
    chosen
}

pub fn determinant(m: &Matrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in (c + 1)..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `m x = b` for square nonsingular `m`.
pub fn solve(m: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let inv = inverse(m)?;
    Some(mat_vec(&inv, b))
}

/// A nonzero vector `x` with `row . x = 0` for every row, if one exists.
pub fn kernel_vector(rows: &[Vec<Rational>], dim: usize) -> Option<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free = (0..dim).find(|c| !pivots.contains(c))?;
    let mut x = vec![Rational::zero(); dim];
    x[free] = Rational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = -m[r][free].clone();
    }
    Some(x)
}

/// Solves the (possibly non-square) consistent system `rows . x = rhs`,
/// returning one solution or `None` when inconsistent.
pub fn solve_affine(rows: &[Vec<Rational>], rhs: &[Rational], dim: usize) -> Option<Vec<Rational>> {
    let mut aug: Matrix = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| row.iter().cloned().chain(std::iter::once(b.clone())).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&dim) {
        return None;
    }
    let mut x = vec![Rational::zero(); dim];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][dim].clone();
    }
    Some(x)
}

/// Orthogonal projection of `v` onto the orthogonal complement of the row
/// span of `rows` (exact Gram matrix solve).
pub fn project_out(rows: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    let idx = independent_rows(rows);
    if idx.is_empty() {
        return v.to_vec();
    }
    let basis: Matrix = idx.iter().map(|&i| rows[i].clone()).collect();
    let dot = |a: &[Rational], b: &[Rational]| a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
    let gram: Matrix = basis.iter().map(|a| basis.iter().map(|b| dot(a, b)).collect()).collect();
    let rhs: Vec<Rational> = basis.iter().map(|a| dot(a, v)).collect();
    let coef = solve(&gram, &rhs).expect("Gram matrix of independent rows is nonsingular");
    let mut out = v.to_vec();
    for (c, row) in coef.iter().zip(&basis) {
        for (o, r) in out.iter_mut().zip(row) {
            *o -= c * r;
        }
    }
    out
}

pub fn abs_det(m: &Matrix) -> Rational {
    determinant(m).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(determinant(&a), int(1));
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[-1, 2]]));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(determinant(&m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 3]])), int(-3));
    }

    #[test]
    fn kernel_and_rank() {
        let rows = m(&[&[1, 1, 0], &[0, 1, 1]]);
        assert_eq!(rank(&rows), 2);
        let k = kernel_vector(&rows, 3).unwrap();
        assert_eq!(k, vec![int(1), int(-1), int(1)]);
        assert_eq!(independent_rows(&m(&[&[1, 0], &[2, 0], &[0, 1]])), vec![0, 2]);
    }

    #[test]
    fn projection_removes_normal_component() {
        let rows = m(&[&[1, 1]]);
        let p = project_out(&rows, &[int(1), int(0)]);
        assert_eq!(p, vec![rat(1, 2), rat(-1, 2)]);
    }
}
