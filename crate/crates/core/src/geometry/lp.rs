//! Exact two-phase simplex on a dense rational tableau with Bland's rule, so
//! every pivot sequence is deterministic.

use num_traits::{One, Signed, Zero};

use super::{Halfspace, RationalVector};
use crate::rational::Rational;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    pub point: RationalVector,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for j in 0..self.rows[i].len() {
                if !self.rows[r][j].is_zero() {
                    let t = &f * &self.rows[r][j];
                    self.rows[i][j] -= t;
                }
            }
            let t = &f * &self.rhs[r];
            self.rhs[i] -= t;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost . z` over the columns `0..ncols`.
    fn run(&mut self, cost: &[Rational], ncols: usize) -> Outcome {
        loop {
            let entering = (0..ncols).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() {
                        r -= &cost[b] * &self.rows[i][j];
                    }
                }
                r.is_positive()
            });
            let Some(c) = entering else {
                return Outcome::Optimal;
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][c];
                    let better = match &best {
                        None => true,
                        Some((q, _, b)) => ratio < *q || (ratio == *q && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                None => return Outcome::Unbounded(c),
                Some((_, r, _)) => self.pivot(r, c),
            }
        }
    }

    fn value_of(&self, col: usize) -> Rational {
        self.basis.iter().position(|&b| b == col).map_or_else(Rational::zero, |i| self.rhs[i].clone())
    }
}

/// Optimizes `<objective, x>` over `{ x : <a_i, x> <= b_i }` with `x` free.
pub fn lp_optimize(objective: &RationalVector, halfspaces: &[Halfspace], sense: Sense) -> Result<LpSolution, Error> {
    let n = objective.dim();
    if let Some(h) = halfspaces.iter().find(|h| h.normal.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: h.normal.dim() });
    }
    let m = halfspaces.len();
    // Columns: p (n), q (n), slacks (m), artificials (one per negative rhs).
    let negative: Vec<usize> = (0..m).filter(|&i| halfspaces[i].offset.is_negative()).collect();
    let nstruct = 2 * n + m;
    let ncols = nstruct + negative.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, h) in halfspaces.iter().enumerate() {
        let flip = h.offset.is_negative();
        let sgn = if flip { -Rational::one() } else { Rational::one() };
        let mut row = vec![Rational::zero(); ncols];
        for k in 0..n {
            row[k] = &sgn * &h.normal[k];
            row[n + k] = -&row[k];
        }
        row[2 * n + i] = sgn.clone();
        if flip {
            let a = nstruct + negative.iter().position(|&j| j == i).unwrap();
            row[a] = Rational::one();
            basis.push(a);
        } else {
            basis.push(2 * n + i);
        }
        rows.push(row);
        rhs.push(&sgn * &h.offset);
    }
    let mut tab = Tableau { rows, rhs, basis };

    if !negative.is_empty() {
        let mut cost = vec![Rational::zero(); ncols];
        for c in cost.iter_mut().skip(nstruct) {
            *c = -Rational::one();
        }
        tab.run(&cost, ncols);
        let infeas: Rational = (nstruct..ncols).map(|c| tab.value_of(c)).sum();
        if infeas.is_positive() {
            return Err(Error::Infeasible);
        }
        // Drive zero-valued artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= nstruct {
                match (0..nstruct).find(|&j| !tab.rows[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let sign = if sense == Sense::Max { Rational::one() } else { -Rational::one() };
    let mut cost = vec![Rational::zero(); ncols];
    for k in 0..n {
        cost[k] = &sign * &objective[k];
        cost[n + k] = -&cost[k];
    }
    match tab.run(&cost, nstruct) {
        Outcome::Unbounded(c) => {
            let mut dir = vec![Rational::zero(); nstruct];
            dir[c] = Rational::one();
            for (i, &b) in tab.basis.iter().enumerate() {
                if b < nstruct {
                    dir[b] = -tab.rows[i][c].clone();
                }
            }
            let ray = RationalVector::new((0..n).map(|k| &dir[k] - &dir[n + k]).collect());
            Err(Error::LpUnbounded { ray })
        }
        Outcome::Optimal => {
            let point = RationalVector::new((0..n).map(|k| tab.value_of(k) - tab.value_of(n + k)).collect());
            Ok(LpSolution { value: objective.dot(&point), point })
        }
    }
}

/// Whether the system has a solution.
pub fn is_feasible(halfspaces: &[Halfspace], dim: usize) -> bool {
    !matches!(lp_optimize(&RationalVector::zeros(dim), halfspaces, Sense::Max), Err(Error::Infeasible))
}
