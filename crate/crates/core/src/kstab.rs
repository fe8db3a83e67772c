//! Cones over toric Fano varieties and the volume-minimization test for
//! K-semistability of the base.
//!
//! A toric Fano `V` of dimension `n - 1` is given by the rays of its fan; the
//! fan is the face fan of `conv(rays)`. For `L = -K_V / r` Cartier the cone
//! `X = Spec R(V, L)` is the toric variety of `sigma^vee = cone(Q x {1})`,
//! where `Q` is a lattice translate of the section polytope of `L`. The
//! valuation of the vertex blowup is `xi = (0, ..., 0, 1)`.
//!
//! For a toric valuation `xi` the filtration by `xi` on `R_k = H^0(V, kL)`
//! has volume `F(t) = (n-1)! vol(Q ∩ { g >= t })` with `g(m) = <(m, 1), xi>`,
//! a piecewise polynomial of degree `n - 1` whose breakpoints are the values
//! of `g` at the vertices of `Q`. All integrals against it are done exactly.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::linalg;
use crate::geometry::{hrep_to_vrep, polytope_volume, BoundedPolytope, Halfspace, Lattice, RationalVector};
use crate::minimizer::{minimize_toric, stationarity_residual, MinimizerReport, OptimizerConfig, ToricObjective};
use crate::rational::{factorial, int, pow, to_f64, Rational};
use crate::toric::ToricSingularity;
use crate::Error;

/// The cone over a toric Fano with respect to `L = -K_V / r`.
#[derive(Clone, Debug)]
pub struct FanoConeData {
    fan_rays: Vec<RationalVector>,
    r: Rational,
    /// The translation taking the section polytope of `L` to `Q`.
    shift: RationalVector,
    /// Heights of the lifted rays: `1/r + <shift, v_i>`.
    heights: Vec<Rational>,
    sections: BoundedPolytope,
    degree: Rational,
    cone: Arc<ToricSingularity>,
    canonical_xi: RationalVector,
}

fn with_last(v: &RationalVector, last: Rational) -> RationalVector {
    let mut c = v.coords().to_vec();
    c.push(last);
    RationalVector::new(c)
}

/// Checks that `rays` are the vertices of a polytope with the origin in its
/// interior, i.e. that their face fan is the fan of a toric Fano.
fn check_fano(rays: &[RationalVector]) -> Result<BoundedPolytope, Error> {
    let dim = rays.first().ok_or_else(|| Error::InvalidInput("the fan has no rays".into()))?.dim();
    if dim == 0 {
        return Err(Error::InvalidInput("the base must have positive dimension".into()));
    }
    for (i, v) in rays.iter().enumerate() {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
        }
        if v.is_zero() || !v.is_integral() || &v.primitive() != v {
            return Err(Error::NotFano { ray: v.clone(), reason: "is not a primitive integer vector".into() });
        }
        if rays[..i].contains(v) {
            return Err(Error::InvalidInput(format!("ray {v} is listed twice")));
        }
    }
    let hull = BoundedPolytope::from_points(rays)?;
    if hull.halfspaces().is_empty() {
        return Err(Error::NotFano { ray: rays[0].clone(), reason: "and the other rays do not span".into() });
    }
    for h in hull.halfspaces() {
        if !h.offset.is_positive() {
            let witness = hull.vertices().iter().find(|v| h.slack(v).is_zero()).cloned().unwrap_or_else(|| rays[0].clone());
            return Err(Error::NotFano {
                ray: witness,
                reason: "spans a facet of the ray polytope that does not have the origin strictly inside".into(),
            });
        }
    }
    if let Some(v) = rays.iter().find(|v| !hull.vertices().contains(v)) {
        return Err(Error::NotFano { ray: v.clone(), reason: "is not a vertex of the convex hull of the rays".into() });
    }
    Ok(hull)
}

/// Builds the cone over the toric Fano with fan rays `rays` polarized by
/// `L = -K_V / r`.
pub fn build_cone_over_fano(rays: &[RationalVector], r: &Rational) -> Result<FanoConeData, Error> {
    if !r.is_positive() {
        return Err(Error::InvalidInput(format!("r = {r} must be positive")));
    }
    check_fano(rays)?;
    let n = rays[0].dim() + 1;
    let inv = r.recip();
    let pl: Vec<Halfspace> = rays.iter().map(|v| Halfspace::at_least(v.clone(), -inv.clone())).collect();
    let p = hrep_to_vrep(&pl)?;
    let shift = p.vertices()[0].clone();
    let mut heights = Vec::with_capacity(rays.len());
    for v in rays {
        let a = &inv + shift.dot(v);
        if !a.is_integer() {
            return Err(Error::NotCartier { ray: v.clone(), height: a.to_string() });
        }
        heights.push(a);
    }
    let qh: Vec<Halfspace> = rays.iter().zip(&heights).map(|(v, a)| Halfspace::at_least(v.clone(), -a.clone())).collect();
    let sections = hrep_to_vrep(&qh)?;
    if let Some(m) = sections.vertices().iter().find(|m| !m.is_integral()) {
        let (v, a) = rays.iter().zip(&heights).find(|(v, a)| (v.dot(m) + *a).is_zero()).expect("vertices lie on facets");
        return Err(Error::NotCartier { ray: v.clone(), height: format!("{a} (section polytope vertex {m} is not integral)") });
    }
    let degree = polytope_volume(&sections, &Lattice::standard(n - 1)).value * Rational::from_integer(factorial(n - 1));
    let lifted: Vec<RationalVector> = rays.iter().zip(&heights).map(|(v, a)| with_last(v, a.clone())).collect();
    let cone = ToricSingularity::new(Lattice::standard(n), &lifted)?;
    let canonical_xi = RationalVector::unit(n, n - 1);
    Ok(FanoConeData {
        fan_rays: rays.to_vec(),
        r: r.clone(),
        shift,
        heights,
        sections,
        degree,
        cone: Arc::new(cone),
        canonical_xi,
    })
}

impl FanoConeData {
    /// Dimension of the cone, one more than the base.
    pub fn dim(&self) -> usize {
        self.canonical_xi.dim()
    }

    pub fn fan_rays(&self) -> &[RationalVector] {
        &self.fan_rays
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn shift(&self) -> &RationalVector {
        &self.shift
    }

    pub fn heights(&self) -> &[Rational] {
        &self.heights
    }

    /// The lattice polytope `Q` of sections of `L`.
    pub fn sections(&self) -> &BoundedPolytope {
        &self.sections
    }

    /// `L^{n-1}`.
    pub fn degree(&self) -> &Rational {
        &self.degree
    }

    pub fn cone(&self) -> &Arc<ToricSingularity> {
        &self.cone
    }

    pub fn canonical_xi(&self) -> &RationalVector {
        &self.canonical_xi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Semistable,
    Unstable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// `vol-hat(canonical) - min`, in floating point.
    pub gap: f64,
    /// Exact gap when the minimum was recovered as a rational.
    #[serde(with = "crate::rational::serde_rational::option")]
    pub gap_exact: Option<Rational>,
    #[serde(with = "crate::rational::serde_rational")]
    pub canonical_value: Rational,
    pub canonical_residual: f64,
    pub minimum: MinimizerReport,
}

/// Decides K-semistability of the base by checking whether the canonical
/// valuation minimizes `vol-hat` over the toric valuations of the cone.
pub fn canonical_is_minimizer(d: &FanoConeData, cfg: &OptimizerConfig) -> Result<StabilityReport, Error> {
    let canonical_value = d.cone.normalized_volume(&d.canonical_xi)?;
    let minimum = minimize_toric(&d.cone, cfg)?;
    let gap_exact = minimum.rational_candidate.as_ref().map(|c| &canonical_value - &c.value);
    let gap = match &gap_exact {
        Some(g) => to_f64(g),
        None => to_f64(&canonical_value) - minimum.value,
    };
    let slice_point: Vec<f64> = d.canonical_xi.scale(&d.r.recip()).to_f64();
    let canonical_residual = stationarity_residual(&ToricObjective::new(&d.cone), &slice_point);
    let tol = cfg.tolerance * to_f64(&canonical_value).abs().max(1.0);
    let verdict = if !minimum.converged {
        Verdict::Inconclusive
    } else if gap <= tol {
        if canonical_residual <= residual_target(cfg) {
            Verdict::Semistable
        } else {
            Verdict::Inconclusive
        }
    } else if gap > 10.0 * tol {
        Verdict::Unstable
    } else {
        Verdict::Inconclusive
    };
    Ok(StabilityReport { verdict, gap, gap_exact, canonical_value, canonical_residual, minimum })
}

/// The canonical point is fed to the residual exactly, so only
/// finite-difference noise remains; this allows for it.
fn residual_target(cfg: &OptimizerConfig) -> f64 {
    cfg.tolerance * 10.0
}

/// Test-suite oracle: the base is K-semistable iff the barycenter of
/// `{ m : <m, v_i> >= -1 }` is the origin.
pub fn barycenter_oracle(rays: &[RationalVector]) -> Result<bool, Error> {
    check_fano(rays)?;
    let hs: Vec<Halfspace> = rays.iter().map(|v| Halfspace::at_least(v.clone(), -Rational::one())).collect();
    let p = hrep_to_vrep(&hs)?;
    let b = p.barycenter().ok_or(Error::EmptyPolytope)?;
    Ok(b.is_zero())
}

/// `tau = A(xi) / r`.
pub fn nef_threshold(d: &FanoConeData, xi: &RationalVector) -> Result<Rational, Error> {
    Ok(d.cone.log_discrepancy(xi)? / &d.r)
}

/// `lambda_* = r / A(xi)`.
pub fn lambda_star(d: &FanoConeData, xi: &RationalVector) -> Result<Rational, Error> {
    Ok(nef_threshold(d, xi)?.recip())
}

/// Polynomial coefficients, constant term first.
type Poly = Vec<Rational>;

fn poly_eval(p: &[Rational], t: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
}

/// `p(alpha u + beta)` as a polynomial in `u`.
fn poly_compose_linear(p: &[Rational], alpha: &Rational, beta: &Rational) -> Poly {
    let mut out: Poly = vec![Rational::zero(); p.len()];
    // Horner in polynomial arithmetic.
    for c in p.iter().rev() {
        let mut next: Poly = vec![Rational::zero(); p.len()];
        for (j, o) in out.iter().enumerate() {
            if o.is_zero() {
                continue;
            }
            next[j] += o * beta;
            if j + 1 < next.len() {
                next[j + 1] += o * alpha;
            }
        }
        next[0] += c;
        out = next;
    }
    out
}

/// `int_{u0}^{u1} p(u) u^{-m} du` for `deg p < m - 1` and `0 < u0 <= u1`.
fn integrate_against_power(p: &[Rational], m: usize, u0: &Rational, u1: &Rational) -> Rational {
    let mut total = Rational::zero();
    for (j, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        assert!(j + 1 < m, "antiderivative would need a logarithm");
        let e = (m - j - 1) as i32;
        // int u^{j-m} = -u^{-e} / e
        let prim = |u: &Rational| -(pow(&u.recip(), e as usize)) / int(e as i64);
        total += c * (prim(u1) - prim(u0));
    }
    total
}

fn integrate_poly(p: &[Rational], a: &Rational, b: &Rational) -> Rational {
    p.iter()
        .enumerate()
        .map(|(j, c)| {
            let k = int(j as i64 + 1);
            c * (pow(b, j + 1) - pow(a, j + 1)) / k
        })
        .sum()
}

/// The volume function of the filtration induced by `xi` on the sections of
/// `L`, as exact polynomial pieces.
#[derive(Clone, Debug)]
pub struct Filtration<'a> {
    data: &'a FanoConeData,
    xi: RationalVector,
    /// `c_1 = min_Q g`.
    pub c1: Rational,
    /// `max_Q g`, beyond which the filtration volume vanishes.
    pub t_max: Rational,
    /// Sorted distinct vertex values of `g`.
    pub breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
}

impl<'a> Filtration<'a> {
    pub fn new(data: &'a FanoConeData, xi: &RationalVector) -> Result<Filtration<'a>, Error> {
        data.cone.check_interior(xi)?;
        let n = data.dim();
        let g = |m: &RationalVector| with_last(m, Rational::one()).dot(xi);
        let mut breakpoints: Vec<Rational> = data.sections.vertices().iter().map(g).collect();
        breakpoints.sort();
        breakpoints.dedup();
        let c1 = breakpoints[0].clone();
        let t_max = breakpoints.last().expect("Q has vertices").clone();
        let mut f = Filtration { data, xi: xi.clone(), c1, t_max, breakpoints: breakpoints.clone(), pieces: Vec::new() };
        // Degree n - 1 pieces, fixed by n equally spaced samples each.
        let pieces: Result<Vec<Poly>, Error> = breakpoints
            .windows(2)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|w| {
                let nodes: Vec<Rational> =
                    (0..n).map(|k| &w[0] + (&w[1] - &w[0]) * Rational::new(k.into(), (n - 1).into())).collect();
                let vals: Vec<Rational> = nodes.iter().map(|t| f.volume_at(t)).collect::<Result<_, _>>()?;
                let vander: linalg::Matrix = nodes.iter().map(|t| (0..n).map(|j| pow(t, j)).collect()).collect();
                Ok(linalg::solve(&vander, &vals).expect("distinct nodes"))
            })
            .collect();
        f.pieces = pieces?;
        Ok(f)
    }

    pub fn xi(&self) -> &RationalVector {
        &self.xi
    }

    /// `(n-1)! vol(Q ∩ { g >= t })`, computed directly as a polytope volume.
    pub fn volume_at(&self, t: &Rational) -> Result<Rational, Error> {
        if t <= &self.c1 {
            return Ok(self.data.degree.clone());
        }
        if t >= &self.t_max {
            return Ok(Rational::zero());
        }
        let n = self.data.dim();
        let head = RationalVector::new(self.xi.coords()[..n - 1].to_vec());
        let mut hs: Vec<Halfspace> = self.data.sections.halfspaces().to_vec();
        hs.push(Halfspace::at_least(head, t - &self.xi[n - 1]));
        let p = match hrep_to_vrep(&hs) {
            Ok(p) => p,
            Err(Error::EmptyPolytope) => return Ok(Rational::zero()),
            Err(e) => return Err(e),
        };
        Ok(polytope_volume(&p, &Lattice::standard(n - 1)).value * Rational::from_integer(factorial(n - 1)))
    }

    /// The same value from the interpolated pieces.
    pub fn volume_from_pieces(&self, t: &Rational) -> Rational {
        if t <= &self.c1 {
            return self.data.degree.clone();
        }
        if t >= &self.t_max {
            return Rational::zero();
        }
        let j = self.breakpoints.windows(2).position(|w| t <= &w[1]).expect("t is inside the range");
        poly_eval(&self.pieces[j], t)
    }

    /// `int_{c_1}^{inf} F(t) dt`.
    pub fn integral(&self) -> Rational {
        self.breakpoints.windows(2).zip(&self.pieces).map(|(w, p)| integrate_poly(p, &w[0], &w[1])).sum()
    }

    /// `L^{n-1} / c_1^n - n int F(t) t^{-n-1} dt`.
    pub fn volume_formula(&self) -> Rational {
        let n = self.data.dim();
        let tail: Rational = self
            .breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| integrate_against_power(p, n + 1, &w[0], &w[1]))
            .sum();
        &self.data.degree / pow(&self.c1, n) - int(n as i64) * tail
    }

    /// `Phi(lambda, s)` for `s` in `[0, 1]`.
    pub fn phi(&self, lambda: &Rational, s: &Rational) -> Rational {
        let n = self.data.dim();
        let l = &self.data.degree;
        if s.is_zero() {
            return l.clone();
        }
        let a = Rational::one() - s;
        let b = lambda * s;
        let head = l / pow(&(&b * &self.c1 + &a), n);
        let mut tail = Rational::zero();
        for (w, p) in self.breakpoints.windows(2).zip(&self.pieces) {
            // t = (u - a) / b
            let q = poly_compose_linear(p, &b.recip(), &(-&a / &b));
            let u0 = &a + &b * &w[0];
            let u1 = &a + &b * &w[1];
            tail += integrate_against_power(&q, n + 1, &u0, &u1) / &b;
        }
        head - int(n as i64) * &b * tail
    }

    /// Closed form `n lambda L^{n-1} (1/lambda - c_1 - int F / L^{n-1})`.
    pub fn phi_s_at_zero(&self, lambda: &Rational) -> Rational {
        let n = int(self.data.dim() as i64);
        let l = &self.data.degree;
        n * lambda * l * (lambda.recip() - &self.c1 - self.integral() / l)
    }
}

/// Adaptive Simpson on `[a, b]`; `None` if the recursion budget runs out.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Option<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Some(left + right + delta / 15.0);
        }
        if depth == 0 {
            return None;
        }
        Some(rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)? + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiltrationSample {
    #[serde(with = "crate::rational::serde_rational")]
    pub t: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub volume: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiltrationCurve {
    #[serde(with = "crate::rational::serde_rational")]
    pub c1: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub t_max: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub degree: Rational,
    pub samples: Vec<FiltrationSample>,
    /// `vol(xi)` from the cone directly.
    #[serde(with = "crate::rational::serde_rational")]
    pub volume_direct: Rational,
    /// The integral formula evaluated exactly on the polynomial pieces.
    #[serde(with = "crate::rational::serde_rational")]
    pub volume_formula: Rational,
    /// The integral formula by adaptive Simpson on direct polytope volumes.
    pub volume_formula_numeric: f64,
    /// False when the numerical integration did not reach its tolerance.
    pub integration_ok: bool,
}

/// Samples of the filtration volume and both sides of the volume identity.
pub fn filtration_volume_curve(d: &FanoConeData, xi: &RationalVector, t_grid: &[Rational]) -> Result<FiltrationCurve, Error> {
    let f = Filtration::new(d, xi)?;
    let samples = t_grid
        .par_iter()
        .map(|t| Ok(FiltrationSample { t: t.clone(), volume: f.volume_at(t)? }))
        .collect::<Result<Vec<_>, Error>>()?;
    let n = d.dim() as i32;
    let mut integration_ok = true;
    let mut tail = 0.0;
    for w in f.breakpoints.windows(2) {
        let g = |t: f64| {
            let q = crate::rational::from_f64(t).expect("finite");
            to_f64(&f.volume_at(&q).expect("volume of a bounded slice")) / t.powi(n + 1)
        };
        match adaptive_simpson(&g, to_f64(&w[0]), to_f64(&w[1]), 1e-11) {
            Some(v) => tail += v,
            None => integration_ok = false,
        }
    }
    let c1 = to_f64(&f.c1);
    let volume_formula_numeric = to_f64(&d.degree) / c1.powi(n) - n as f64 * tail;
    Ok(FiltrationCurve {
        c1: f.c1.clone(),
        t_max: f.t_max.clone(),
        degree: d.degree.clone(),
        samples,
        volume_direct: d.cone.volume(xi)?,
        volume_formula: f.volume_formula(),
        volume_formula_numeric,
        integration_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiSample {
    #[serde(with = "crate::rational::serde_rational")]
    pub s: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiCurve {
    #[serde(with = "crate::rational::serde_rational")]
    pub lambda: Rational,
    pub samples: Vec<PhiSample>,
    /// `Phi(lambda, 1)` from the integral formula.
    #[serde(with = "crate::rational::serde_rational")]
    pub at_one: Rational,
    /// `lambda^{-n} vol(xi)`, computed on the cone.
    #[serde(with = "crate::rational::serde_rational")]
    pub expected_at_one: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub at_zero: Rational,
    /// `vol(canonical) = L^{n-1}`.
    #[serde(with = "crate::rational::serde_rational")]
    pub expected_at_zero: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub derivative_closed_form: Rational,
    /// One-sided difference quotient with step `1e-12`.
    pub derivative_finite_difference: f64,
    /// `n lambda L^{n-1}`, the scale used for relative comparisons.
    pub derivative_scale: f64,
}

impl PhiCurve {
    pub fn endpoints_match(&self) -> bool {
        self.at_one == self.expected_at_one && self.at_zero == self.expected_at_zero
    }

    /// Largest violation of the secant inequality over consecutive sample
    /// triples (samples sorted by `s`).
    pub fn convexity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.samples.windows(3) {
            let (a, b, c) = (&w[0], &w[1], &w[2]);
            let theta = (&b.s - &a.s) / (&c.s - &a.s);
            let chord = &a.value + (&c.value - &a.value) * theta;
            worst = worst.max(to_f64(&(&b.value - chord)));
        }
        worst
    }

    /// `|closed form - finite difference|` relative to the larger of the two
    /// and `n lambda L^{n-1}`.
    pub fn derivative_discrepancy(&self) -> f64 {
        let cf = to_f64(&self.derivative_closed_form);
        let fd = self.derivative_finite_difference;
        (cf - fd).abs() / cf.abs().max(fd.abs()).max(self.derivative_scale)
    }
}

/// `Phi(lambda, s)` on `s_grid`, its endpoint identities and its derivative
/// at `s = 0` by the closed form and by a difference quotient.
pub fn phi_curve(d: &FanoConeData, xi: &RationalVector, lambda: &Rational, s_grid: &[Rational]) -> Result<PhiCurve, Error> {
    if !lambda.is_positive() {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be positive")));
    }
    if let Some(s) = s_grid.iter().find(|s| s.is_negative() || *s > &Rational::one()) {
        return Err(Error::InvalidInput(format!("s = {s} is outside [0, 1]")));
    }
    let f = Filtration::new(d, xi)?;
    let mut grid = s_grid.to_vec();
    grid.sort();
    grid.dedup();
    let samples: Vec<PhiSample> = grid.par_iter().map(|s| PhiSample { s: s.clone(), value: f.phi(lambda, s) }).collect();
    let n = d.dim();
    let h = Rational::new(1.into(), num_bigint::BigInt::from(10u64).pow(12));
    let fd = (f.phi(lambda, &h) - f.phi(lambda, &Rational::zero())) / &h;
    Ok(PhiCurve {
        lambda: lambda.clone(),
        samples,
        at_one: f.phi(lambda, &Rational::one()),
        expected_at_one: d.cone.volume(xi)? / pow(lambda, n),
        at_zero: f.phi(lambda, &Rational::zero()),
        expected_at_zero: d.cone.volume(&d.canonical_xi)?,
        derivative_closed_form: f.phi_s_at_zero(lambda),
        derivative_finite_difference: to_f64(&fd),
        derivative_scale: to_f64(&(int(n as i64) * lambda * &d.degree)),
    })
}

/// Evenly spaced rationals `0, 1/k, ..., 1`.
pub fn unit_grid(k: u32) -> Vec<Rational> {
    (0..=k).map(|j| Rational::new(j.into(), k.into())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn rays(v: &[&[i64]]) -> Vec<RationalVector> {
        v.iter().map(|r| RationalVector::from_i64s(r)).collect()
    }

    #[test]
    fn projective_line_degree_one_is_the_plane() {
        let d = build_cone_over_fano(&rays(&[&[1], &[-1]]), &int(2)).unwrap();
        let c = d.cone();
        assert_eq!(c.volume(&c.default_xi()).unwrap() * int(4), c.normalized_volume(&c.default_xi()).unwrap());
        assert_eq!(d.degree(), &int(1));
        assert_eq!(c.normalized_volume(d.canonical_xi()).unwrap(), int(4));
        assert_eq!(c.lattice().covolume(), int(1));
        assert_eq!(c.gorenstein_covector(), &with_last(&d.shift().scale(&-d.r().clone()), d.r().clone()));
    }

    #[test]
    fn projective_plane_anticanonical() {
        let d = build_cone_over_fano(&rays(&[&[1, 0], &[0, 1], &[-1, -1]]), &int(1)).unwrap();
        assert_eq!(d.degree(), &int(9));
        let c = d.cone();
        assert_eq!(c.normalized_volume(d.canonical_xi()).unwrap(), int(9));
        assert_eq!(c.volume(d.canonical_xi()).unwrap(), int(9));
        assert_eq!(nef_threshold(&d, d.canonical_xi()).unwrap(), int(1));
    }

    #[test]
    fn invalid_fans() {
        let not_complete = build_cone_over_fano(&rays(&[&[1, 0], &[0, 1]]), &int(1));
        assert!(matches!(not_complete, Err(Error::NotFano { .. })));
        let on_edge = build_cone_over_fano(&rays(&[&[2, -1], &[-1, 2], &[-1, -1], &[1, 0]]), &int(1));
        assert!(matches!(on_edge, Err(Error::NotFano { ref ray, .. }) if ray == &RationalVector::from_i64s(&[1, 0])));
        let not_cartier = build_cone_over_fano(&rays(&[&[1, 0], &[0, 1], &[-1, -1]]), &int(2));
        assert!(matches!(not_cartier, Err(Error::NotCartier { .. })));
    }

    #[test]
    fn plane_filtration_for_weight_one_two() {
        let d = build_cone_over_fano(&rays(&[&[1], &[-1]]), &int(2)).unwrap();
        // the lifted rays form a basis; express the weight (1, 2) in it
        let g = d.cone().generators();
        let xi = &g[0].clone() + &g[1].scale(&int(2));
        let w0 = d.cone().dual_generators().iter().map(|y| y.dot(&xi)).min().unwrap();
        assert_eq!(w0, int(1));
        assert_eq!(d.cone().volume(&xi).unwrap(), rat(1, 2));
        let f = Filtration::new(&d, &xi).unwrap();
        assert_eq!(f.volume_formula(), rat(1, 2));
        let lambda = lambda_star(&d, &xi).unwrap();
        assert_eq!(lambda, rat(2, 3));
        assert_eq!(f.phi_s_at_zero(&lambda), int(0));
        assert_eq!(f.phi(&lambda, &int(1)), rat(1, 2) / pow(&lambda, 2));
    }

    #[test]
    fn pieces_agree_with_direct_volumes() {
        let d = build_cone_over_fano(&rays(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]]), &int(1)).unwrap();
        let xi = RationalVector::new(vec![rat(1, 3), rat(-1, 5), int(2)]);
        let f = Filtration::new(&d, &xi).unwrap();
        for k in 0..=20 {
            let t = &f.c1 + (&f.t_max - &f.c1) * rat(k, 20);
            assert_eq!(f.volume_at(&t).unwrap(), f.volume_from_pieces(&t));
        }
        assert_eq!(f.volume_formula(), d.cone().volume(&xi).unwrap());
    }

    #[test]
    fn polynomial_helpers() {
        // p(t) = 1 + 2t + 3t^2 at t = 2u + 1
        let p = vec![int(1), int(2), int(3)];
        let q = poly_compose_linear(&p, &int(2), &int(1));
        assert_eq!(q, vec![int(6), int(16), int(12)]);
        assert_eq!(integrate_poly(&p, &int(0), &int(1)), int(3));
        // int_1^2 (1 + u) u^-3 du = 1/2 - 1/8 + 1 - 1/2
        assert_eq!(integrate_against_power(&[int(1), int(1)], 3, &int(1), &int(2)), rat(7, 8));
        let s = adaptive_simpson(&|x| x.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((s - (std::f64::consts::E - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn barycenters() {
        assert!(barycenter_oracle(&rays(&[&[1, 0], &[0, 1], &[-1, -1]])).unwrap());
        assert!(!barycenter_oracle(&rays(&[&[1, 0], &[0, 1], &[-1, -1], &[1, 1]])).unwrap());
        assert!(barycenter_oracle(&rays(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]])).unwrap());
    }
}
