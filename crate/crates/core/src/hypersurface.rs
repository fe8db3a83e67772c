//! Monomial weights on hypersurface singularities `X = { f = 0 } ⊂ C^N`.
//!
//! For a weight `w` with `w(f) = min <w, t>` over the exponents `t` of `f`,
//! adjunction gives `A_X(w) = sum(w) - w(f)`, and when `f` is nondegenerate
//! with respect to its Newton polyhedron `vol(w) = w(f) / prod(w)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::geometry::RationalVector;
use crate::ideals::MonomialIdeal;
use crate::rational::{pow, Rational};
use crate::Error;

/// Hypersurface families whose members are known to be nondegenerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum Family {
    /// `z_1^2 + ... + z_dim^2 + z_{dim+1}^k`, the `A_{k-1}` singularity.
    #[serde(rename = "A_k")]
    A { dim: usize, k: u32 },
    /// Squares plus `z_dim^3 + z_{dim+1}^4`.
    E6 { dim: usize },
    /// Squares plus `z_dim^3 z_{dim+1} + z_{dim+1}^3`.
    E7 { dim: usize },
    /// Squares plus `z_dim^3 + z_{dim+1}^5`.
    E8 { dim: usize },
}

impl Family {
    pub fn dim(&self) -> usize {
        match *self {
            Family::A { dim, .. } | Family::E6 { dim } | Family::E7 { dim } | Family::E8 { dim } => dim,
        }
    }

    pub fn terms(&self) -> Result<Vec<Vec<u32>>, Error> {
        let d = self.dim();
        if d < 1 || (d < 2 && !matches!(self, Family::A { .. })) {
            return Err(Error::InvalidInput(format!("{self} needs a larger dimension")));
        }
        let nv = d + 1;
        let pure = |i: usize, e: u32| {
            let mut t = vec![0; nv];
            t[i] = e;
            t
        };
        let mut out: Vec<Vec<u32>> = Vec::new();
        match *self {
            Family::A { dim, k } => {
                if k < 1 {
                    return Err(Error::InvalidInput("A_k needs k >= 1".into()));
                }
                out.extend((0..dim).map(|i| pure(i, 2)));
                out.push(pure(dim, k));
            }
            Family::E6 { dim } => {
                out.extend((0..dim - 1).map(|i| pure(i, 2)));
                out.push(pure(dim - 1, 3));
                out.push(pure(dim, 4));
            }
            Family::E7 { dim } => {
                out.extend((0..dim - 1).map(|i| pure(i, 2)));
                let mut t = pure(dim - 1, 3);
                t[dim] = 1;
                out.push(t);
                out.push(pure(dim, 3));
            }
            Family::E8 { dim } => {
                out.extend((0..dim - 1).map(|i| pure(i, 2)));
                out.push(pure(dim - 1, 3));
                out.push(pure(dim, 5));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A { dim, k } => write!(f, "A_k(dim={dim}, k={k})"),
            Family::E6 { dim } => write!(f, "E6(dim={dim})"),
            Family::E7 { dim } => write!(f, "E7(dim={dim})"),
            Family::E8 { dim } => write!(f, "E8(dim={dim})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedHypersurface {
    ambient_dim: usize,
    terms: Vec<Vec<u32>>,
    nondegenerate: bool,
    family: Option<Family>,
}

/// `w(f)` together with the indices of the terms attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightOfF {
    pub value: Rational,
    pub active: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LctComparison {
    #[serde(with = "crate::rational::serde_rational")]
    pub lct_f: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub lct_initial: Rational,
    pub ok: bool,
}

impl WeightedHypersurface {
    /// `nondegenerate` records the caller's assertion that `f` is
    /// nondegenerate; without it only family members get multiplicities.
    pub fn new(ambient_dim: usize, terms: Vec<Vec<u32>>, nondegenerate: bool) -> Result<WeightedHypersurface, Error> {
        if ambient_dim < 2 {
            return Err(Error::InvalidInput("a hypersurface singularity needs at least two variables".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidInput("the polynomial has no terms".into()));
        }
        let mut seen = BTreeSet::new();
        for t in &terms {
            if t.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: t.len() });
            }
            if t.iter().all(|&e| e == 0) {
                return Err(Error::InvalidInput("a constant term does not vanish at the origin".into()));
            }
            if !seen.insert(t.clone()) {
                return Err(Error::InvalidInput(format!("duplicate term {t:?}")));
            }
        }
        Ok(WeightedHypersurface { ambient_dim, terms, nondegenerate, family: None })
    }

    pub fn from_family(family: Family) -> Result<WeightedHypersurface, Error> {
        let terms = family.terms()?;
        let mut h = Self::new(family.dim() + 1, terms, true)?;
        h.family = Some(family);
        Ok(h)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the singularity, `N - 1`.
    pub fn dim(&self) -> usize {
        self.ambient_dim - 1
    }

    pub fn terms(&self) -> &[Vec<u32>] {
        &self.terms
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn nondegenerate(&self) -> bool {
        self.nondegenerate
    }

    pub fn term_vector(&self, i: usize) -> RationalVector {
        RationalVector::from_i64s(&self.terms[i].iter().map(|&e| e as i64).collect::<Vec<_>>())
    }

    fn check_weight(&self, w: &RationalVector) -> Result<(), Error> {
        if w.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: w.dim() });
        }
        if w.coords().iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidInput(format!("weight {w} must be strictly positive")));
        }
        Ok(())
    }

    pub fn weight_of_f(&self, w: &RationalVector) -> Result<WeightOfF, Error> {
        self.check_weight(w)?;
        let vals: Vec<Rational> = (0..self.terms.len()).map(|i| self.term_vector(i).dot(w)).collect();
        let value = vals.iter().min().cloned().expect("terms are nonempty");
        let active = (0..vals.len()).filter(|&i| vals[i] == value).collect();
        Ok(WeightOfF { value, active })
    }

    /// The hypersurface of `in_w(f)`, keeping only the minimizing terms.
    pub fn initial_form(&self, w: &RationalVector) -> Result<WeightedHypersurface, Error> {
        let wf = self.weight_of_f(w)?;
        let terms = wf.active.iter().map(|&i| self.terms[i].clone()).collect();
        Ok(WeightedHypersurface { ambient_dim: self.ambient_dim, terms, nondegenerate: self.nondegenerate, family: None })
    }

    /// The initial form cannot define a valuation: it is a single monomial, or
    /// every active term shares a variable.
    pub fn initial_form_is_degenerate(&self, w: &RationalVector) -> Result<bool, Error> {
        let wf = self.weight_of_f(w)?;
        if wf.active.len() == 1 {
            return Ok(true);
        }
        Ok((0..self.ambient_dim).any(|j| wf.active.iter().all(|&i| self.terms[i][j] > 0)))
    }

    pub fn log_discrepancy(&self, w: &RationalVector) -> Result<Rational, Error> {
        let wf = self.weight_of_f(w)?;
        let a = w.coords().iter().sum::<Rational>() - wf.value;
        if !a.is_positive() {
            return Err(Error::NotKlt(a.to_string()));
        }
        Ok(a)
    }

    pub fn multiplicity(&self, w: &RationalVector) -> Result<Rational, Error> {
        if !self.nondegenerate && self.family.is_none() {
            return Err(Error::NondegeneracyUnknown(
                "the polynomial is not flagged nondegenerate and is not in a verified family; \
                 the closed-form volume only holds for nondegenerate polynomials"
                    .into(),
            ));
        }
        let wf = self.weight_of_f(w)?;
        let prod: Rational = w.coords().iter().product();
        Ok(wf.value / prod)
    }

    pub fn normalized_volume(&self, w: &RationalVector) -> Result<Rational, Error> {
        let a = self.log_discrepancy(w)?;
        Ok(pow(&a, self.dim()) * self.multiplicity(w)?)
    }

    /// `min(1, c)` where `c` is the ray-scaling threshold of the Newton
    /// polyhedron of `f` against `(1, ..., 1)`.
    pub fn lct(&self) -> Rational {
        let exps: Vec<Vec<i64>> = self.terms.iter().map(|t| t.iter().map(|&e| e as i64).collect()).collect();
        let ideal = MonomialIdeal::smooth(self.ambient_dim, &exps).expect("terms are valid exponents");
        let c = ideal.lct().expect("f vanishes at the origin");
        c.min(Rational::one())
    }

    pub fn lct_initial_comparison(&self, w: &RationalVector) -> Result<LctComparison, Error> {
        let lct_f = self.lct();
        let lct_initial = self.initial_form(w)?.lct();
        Ok(LctComparison { ok: lct_f >= lct_initial, lct_f, lct_initial })
    }

    pub fn permuted(&self, perm: &[usize]) -> WeightedHypersurface {
        let terms = self.terms.iter().map(|t| perm.iter().map(|&i| t[i]).collect()).collect();
        WeightedHypersurface { ambient_dim: self.ambient_dim, terms, nondegenerate: self.nondegenerate, family: self.family }
    }

    pub fn float_objective(&self) -> FloatHypersurface {
        FloatHypersurface {
            dim: self.dim(),
            terms: self.terms.iter().map(|t| t.iter().map(|&e| e as f64).collect()).collect(),
        }
    }
}

/// Float evaluation of `A(w)^n w(f) / prod(w)`.
#[derive(Clone, Debug)]
pub struct FloatHypersurface {
    dim: usize,
    terms: Vec<Vec<f64>>,
}

impl FloatHypersurface {
    pub fn weight_of_f(&self, w: &[f64]) -> f64 {
        self.terms.iter().map(|t| crate::toric::dot(t, w)).fold(f64::INFINITY, f64::min)
    }

    pub fn normalized_volume(&self, w: &[f64]) -> Option<f64> {
        if w.iter().any(|&x| !(x > 0.0)) {
            return None;
        }
        let wf = self.weight_of_f(w);
        let a: f64 = w.iter().sum::<f64>() - wf;
        if !(a > 0.0) {
            return None;
        }
        let prod: f64 = w.iter().product();
        Some(a.powi(self.dim as i32) * wf / prod)
    }
}

/// The minimizing weight for the `A_{k-1}` family in dimension `n >= 3` with
/// `k` large: `(n-1, ..., n-1, n-2)`, and its normalized volume
/// `2 n^n (n-2)^(n-1) / (n-1)^(n-1)`.
pub fn a_family_closed_form(n: usize) -> (RationalVector, Rational) {
    let mut w = vec![Rational::from_integer(BigInt::from(n - 1)); n];
    w.push(Rational::from_integer(BigInt::from(n - 2)));
    let nn = Rational::from_integer(BigInt::from(n));
    let value = Rational::from_integer(BigInt::from(2)) * pow(&nn, n)
        * pow(&Rational::from_integer(BigInt::from(n - 2)), n - 1)
        / pow(&Rational::from_integer(BigInt::from(n - 1)), n - 1);
    (RationalVector::new(w), value)
}
