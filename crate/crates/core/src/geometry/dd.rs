//! Double description: extreme rays of `{ x : a_i . x >= 0 for all i }`.
//!
//! Arithmetic is on primitive integer vectors; the adjacency test is the
//! combinatorial one (common zero set not contained in a third ray's zero set).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::linalg;
use super::RationalVector;
use crate::rational::{primitive_integer, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitset(Vec<u64>);

impl Bitset {
    pub fn new(len: usize) -> Bitset {
        Bitset(vec![0; len.div_ceil(64)])
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn intersection(&self, other: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    pub fn is_superset(&self, other: &Bitset) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| b & !a == 0)
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(k, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| 64 * k + b))
    }
}

#[derive(Clone, Debug)]
pub struct DdOutput {
    /// Primitive integer extreme rays, sorted.
    pub rays: Vec<Vec<BigInt>>,
    /// For each ray, the indices of the input rows vanishing on it.
    pub incidence: Vec<Bitset>,
}

/// Failure of the pointedness precondition: the rows do not span, so the cone
/// contains the line through `witness`.
#[derive(Clone, Debug)]
pub struct Lineality {
    pub witness: RationalVector,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

fn normalize(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g == BigInt::from(1) {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Bitset,
}

/// Extreme rays of the cone cut out by `rows` in dimension `dim`.
pub fn extreme_rays(rows: &[RationalVector], dim: usize) -> Result<DdOutput, Lineality> {
    let int_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| primitive_integer(r.coords())).collect();
    let q_rows: Vec<Vec<Rational>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let basis = linalg::independent_rows(&q_rows);
    if basis.len() < dim {
        let w = linalg::kernel_vector(&q_rows, dim).expect("rank deficiency yields a kernel vector");
        return Err(Lineality { witness: RationalVector::new(w).primitive() });
    }
    let m = rows.len();
    let sub: linalg::Matrix = basis.iter().map(|&i| q_rows[i].clone()).collect();
    let inv = linalg::inverse(&sub).expect("independent rows");
    let cols = linalg::transpose(&inv);
    let mut rays: Vec<Ray> = Vec::with_capacity(dim);
    for (j, col) in cols.iter().enumerate() {
        let v = primitive_integer(col);
        let mut zeros = Bitset::new(m);
        for (k, &i) in basis.iter().enumerate() {
            if k != j {
                zeros.insert(i);
            }
        }
        rays.push(Ray { v, zeros });
    }
    let mut processed: Vec<bool> = vec![false; m];
    for &i in &basis {
        processed[i] = true;
    }
    for i in 0..m {
        if processed[i] {
            continue;
        }
        // Zero rows vanish everywhere.
        if int_rows[i].iter().all(Zero::is_zero) {
            rays.iter_mut().for_each(|r| r.zeros.insert(i));
            processed[i] = true;
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| dot(&int_rows[i], &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let zer: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_zero()).collect();
        processed[i] = true;
        if neg.is_empty() {
            for &k in &zer {
                rays[k].zeros.insert(i);
            }
            continue;
        }
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.intersection(&rays[n].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let blocked = (0..rays.len()).any(|k| k != p && k != n && rays[k].zeros.is_superset(&common));
                if blocked {
                    continue;
                }
                let v: Vec<BigInt> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(x, y)| &vals[p] * x - &vals[n] * y)
                    .collect();
                let mut zeros = common;
                zeros.insert(i);
                fresh.push(Ray { v: normalize(v), zeros });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + zer.len() + fresh.len());
        let mut old: Vec<Option<Ray>> = rays.into_iter().map(Some).collect();
        for &k in &pos {
            next.push(old[k].take().unwrap());
        }
        for &k in &zer {
            let mut r = old[k].take().unwrap();
            r.zeros.insert(i);
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }
    rays.sort_by(|a, b| a.v.cmp(&b.v));
    Ok(DdOutput {
        incidence: rays.iter().map(|r| r.zeros.clone()).collect(),
        rays: rays.into_iter().map(|r| r.v).collect(),
    })
}
