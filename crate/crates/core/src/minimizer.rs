//! Multi-start descent for `vol-hat` over a slice of the valuation space.
//!
//! The objective is always scale invariant, so the search runs on an affine
//! slice (`A = 1` for toric cones, `w(f) = 1` on one linearity region for
//! hypersurfaces). Gradients are central differences of `ln f` along an
//! orthonormal basis of the slice's tangent space, and steps are
//! Barzilai-Borwein with Armijo backtracking. Every accepted step lowers the
//! objective.
//!
//! The float minimum is then rationalized, snapped back to the slice and
//! re-evaluated exactly. Uniqueness is certified only in a weak sense: the
//! converged restarts must cluster, and exact midpoint probes around the
//! candidate must show strict convexity along random directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::linalg::project_out;
use crate::geometry::{lp_optimize, Halfspace, RationalVector, Sense};
use crate::hypersurface::WeightedHypersurface;
use crate::rational::{from_f64, simplest_near, to_f64, Rational};
use crate::toric::{dot, FloatVolume, ToricSingularity};
use crate::Error;

use num_traits::{One, Signed, Zero};

/// Relative finite-difference step.
const FD_STEP: f64 = 2e-6;
/// Hypersurfaces with more terms than this are not searched region by region.
pub const MAX_HYPERSURFACE_TERMS: usize = 12;
const PROBES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Target for the relative stationarity residual `|x| |grad ln f|`.
    pub tolerance: f64,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub rationalize_denominator_bound: u64,
    /// Converged restarts further apart than this (relative distance of
    /// unit directions) disprove uniqueness.
    pub cluster_radius: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            tolerance: 1e-9,
            restarts: 16,
            max_iters: 5000,
            seed: 0,
            rationalize_denominator_bound: 10_000,
            cluster_radius: 1e-6,
        }
    }
}

/// A scale-invariant objective restricted to an affine slice.
pub trait SliceObjective: Sync {
    fn dim(&self) -> usize;
    /// Normals of the linear constraints cutting out the slice; the tangent
    /// space is their orthogonal complement.
    fn constraint_normals(&self) -> Vec<Vec<f64>>;
    /// `None` outside the domain.
    fn value(&self, x: &[f64]) -> Option<f64>;
    /// Maps a nearby point back onto the slice.
    fn normalize(&self, x: &mut [f64]);
    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    /// Exact objective on the full (unsliced) space.
    fn exact_value(&self, q: &RationalVector) -> Option<Rational>;
    /// Exact projection of a rational point onto the slice.
    fn snap(&self, q: &RationalVector) -> Option<RationalVector>;
    /// Probe directions are taken orthogonal to these vectors.
    fn probe_normals(&self, center: &RationalVector) -> Vec<RationalVector>;
    /// Float objective on the full space, for probes without a rational
    /// candidate.
    fn global_value(&self, x: &[f64]) -> Option<f64> {
        self.value(x)
    }
}

/// One descent from one starting point.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub start: Vec<f64>,
    pub arg: Vec<f64>,
    pub value: f64,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Objective value after every accepted step, starting point included.
    pub trajectory: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartSummary {
    pub index: usize,
    pub value: f64,
    pub stationarity_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalCandidate {
    pub arg: RationalVector,
    /// Primitive integer vector on the ray through `arg`.
    pub direction: Vec<String>,
    #[serde(with = "crate::rational::serde_rational")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimizerReport {
    pub arg: Vec<f64>,
    pub value: f64,
    pub stationarity_residual: f64,
    pub converged: bool,
    pub rational_candidate: Option<RationalCandidate>,
    pub unique: bool,
    pub max_pairwise_distance: f64,
    pub restarts: Vec<RestartSummary>,
    /// Hypersurfaces only: the terms of `f` active at the minimizer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_initial_form: Option<bool>,
    pub certification_scope: String,
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + a * di).collect()
}

/// Orthonormal vectors spanning the complement of `normals` in `R^dim`.
pub fn tangent_basis(dim: usize, normals: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    let push = |v: &[f64], q: &mut Vec<Vec<f64>>| -> bool {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for b in q.iter() {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let n = norm(&w);
        if n > 1e-8 * norm(v).max(1e-300) {
            q.push(w.iter().map(|x| x / n).collect());
            true
        } else {
            false
        }
    };
    for v in normals {
        push(v, &mut q);
    }
    let k = q.len();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        push(&e, &mut q);
    }
    q.split_off(k)
}

/// Gradient of `ln f` in the coordinates of `basis`.
fn log_gradient<O: SliceObjective + ?Sized>(obj: &O, basis: &[Vec<f64>], x: &[f64], fx: f64) -> Option<Vec<f64>> {
    let h = FD_STEP * norm(x).max(f64::MIN_POSITIVE);
    let lf = fx.ln();
    basis
        .iter()
        .map(|b| {
            let plus = obj.value(&axpy(x, h, b)).map(f64::ln);
            let minus = obj.value(&axpy(x, -h, b)).map(f64::ln);
            match (plus, minus) {
                (Some(p), Some(m)) => Some((p - m) / (2.0 * h)),
                (Some(p), None) => Some((p - lf) / h),
                (None, Some(m)) => Some((lf - m) / h),
                (None, None) => None,
            }
        })
        .collect()
}

/// Relative stationarity residual `|x| |grad ln f|` of `obj` at `x`;
/// infinite off the domain.
pub fn stationarity_residual<O: SliceObjective + ?Sized>(obj: &O, x: &[f64]) -> f64 {
    let basis = tangent_basis(obj.dim(), &obj.constraint_normals());
    let Some(fx) = obj.value(x) else { return f64::INFINITY };
    match log_gradient(obj, &basis, x, fx) {
        Some(g) => norm(x) * norm(&g),
        None => f64::INFINITY,
    }
}

/// Descends from `start` until the residual drops below the tolerance, the
/// line search stalls, or the iteration budget runs out.
pub fn descend<O: SliceObjective + ?Sized>(obj: &O, start: Vec<f64>, cfg: &OptimizerConfig) -> Run {
    let basis = tangent_basis(obj.dim(), &obj.constraint_normals());
    let mut x = start.clone();
    obj.normalize(&mut x);
    let failed = |x: Vec<f64>| Run {
        start: start.clone(),
        arg: x,
        value: f64::INFINITY,
        residual: f64::INFINITY,
        converged: false,
        iterations: 0,
        trajectory: Vec::new(),
    };
    let Some(mut f) = obj.value(&x) else { return failed(x) };
    let mut trajectory = vec![f];
    if basis.is_empty() {
        return Run { start, arg: x, value: f, residual: 0.0, converged: true, iterations: 0, trajectory };
    }
    let Some(mut g) = log_gradient(obj, &basis, &x, f) else { return failed(x) };
    let scale = norm(&x);
    let mut alpha = 1e-2 * scale / norm(&g).max(1e-300);
    let mut residual = scale * norm(&g);
    let mut iterations = 0;
    let mut flat_steps = 0;
    while residual > cfg.tolerance && iterations < cfg.max_iters {
        iterations += 1;
        let dir: Vec<f64> = (0..x.len()).map(|i| -basis.iter().zip(&g).map(|(b, gj)| gj * b[i]).sum::<f64>()).collect();
        let g2 = dot(&g, &g);
        let lf = f.ln();
        let mut a = alpha;
        let mut accepted = None;
        for _ in 0..80 {
            let mut xn = axpy(&x, a, &dir);
            obj.normalize(&mut xn);
            if let Some(fnew) = obj.value(&xn) {
                if fnew.ln() <= lf - 1e-4 * a * g2 {
                    accepted = Some((xn, fnew));
                    break;
                }
            }
            a *= 0.5;
            if a * norm(&dir) < 1e-18 * scale {
                break;
            }
        }
        let Some((xn, fnew)) = accepted else { break };
        let Some(gn) = log_gradient(obj, &basis, &xn, fnew) else { break };
        let s: Vec<f64> = basis.iter().map(|b| dot(b, &xn) - dot(b, &x)).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(p, q)| p - q).collect();
        let sy = dot(&s, &y);
        alpha = if sy > 0.0 { dot(&s, &s) / sy } else { 2.0 * a };
        // Creeping along a domain boundary: no real progress for a while.
        if f - fnew <= 1e-15 * f {
            flat_steps += 1;
            if flat_steps >= 25 {
                break;
            }
        } else {
            flat_steps = 0;
        }
        x = xn;
        f = fnew;
        g = gn;
        residual = scale * norm(&g);
        trajectory.push(f);
    }
    Run { start, arg: x, value: f, residual, converged: residual <= cfg.tolerance, iterations, trajectory }
}

fn restart_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `cfg.restarts` independent descents in parallel, returned in index order.
/// Restart `i` draws its start from stream `(stream << 32) | i` of the seed.
pub fn multistart<O: SliceObjective + ?Sized>(obj: &O, cfg: &OptimizerConfig, stream: u64) -> Vec<Run> {
    (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = restart_rng(cfg.seed, (stream << 32) | i as u64);
            let start = obj.random_start(&mut rng);
            descend(obj, start, cfg)
        })
        .collect()
}

fn unit_direction(x: &[f64]) -> Vec<f64> {
    let n = norm(x);
    x.iter().map(|v| v / n).collect()
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).find(|(x, y)| x != y).map(|(x, y)| x < y).unwrap_or(false)
}

/// Index of the best run: least value among converged runs (all runs if none
/// converged), ties within relative `1e-9` broken by the lexicographically
/// smallest unit direction.
pub fn best_run(runs: &[Run]) -> Option<usize> {
    let any_converged = runs.iter().any(|r| r.converged);
    let pool: Vec<usize> =
        (0..runs.len()).filter(|&i| runs[i].value.is_finite() && (runs[i].converged || !any_converged)).collect();
    let min = pool.iter().map(|&i| runs[i].value).fold(f64::INFINITY, f64::min);
    pool.into_iter()
        .filter(|&i| runs[i].value <= min + 1e-9 * min.abs().max(1.0))
        .min_by(|&i, &j| {
            let (a, b) = (unit_direction(&runs[i].arg), unit_direction(&runs[j].arg));
            if lex_less(&a, &b) {
                std::cmp::Ordering::Less
            } else if lex_less(&b, &a) {
                std::cmp::Ordering::Greater
            } else {
                i.cmp(&j)
            }
        })
}

/// Largest distance between unit directions of converged runs whose value is
/// within relative `1e-7` of `best`.
fn cluster_spread(runs: &[&Run], best: f64) -> f64 {
    let near: Vec<Vec<f64>> = runs
        .iter()
        .filter(|r| r.converged && r.value <= best + 1e-7 * best.abs().max(1.0))
        .map(|r| unit_direction(&r.arg))
        .collect();
    let mut spread: f64 = 0.0;
    for i in 0..near.len() {
        for j in i + 1..near.len() {
            let d: Vec<f64> = near[i].iter().zip(&near[j]).map(|(a, b)| a - b).collect();
            spread = spread.max(norm(&d));
        }
    }
    spread
}

/// Rationalizes `x` up to scale: coordinates are divided by the largest
/// magnitude, each is replaced by the simplest nearby rational, and the
/// result is snapped onto the slice and verified exactly against the float
/// value.
pub fn rational_candidate<O: SliceObjective + ?Sized>(
    obj: &O,
    x: &[f64],
    value: f64,
    cfg: &OptimizerConfig,
) -> Option<RationalCandidate> {
    let m = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !(m > 0.0) {
        return None;
    }
    let coords: Option<Vec<Rational>> = x
        .iter()
        .map(|v| {
            let t = v / m;
            simplest_near(t, 1e-6 * t.abs().max(1.0), cfg.rationalize_denominator_bound)
        })
        .collect();
    let q = obj.snap(&RationalVector::new(coords?))?;
    let exact = obj.exact_value(&q)?;
    let slack = cfg.tolerance.max(1e-12) * value.abs().max(1.0);
    if (to_f64(&exact) - value).abs() > slack.max(1e-9 * value.abs()) {
        return None;
    }
    let direction = q.primitive_integers().iter().map(|z| z.to_string()).collect();
    Some(RationalCandidate { arg: q, direction, value: exact })
}

fn random_integer_direction(rng: &mut ChaCha8Rng, dim: usize) -> RationalVector {
    RationalVector::from_i64s(&(0..dim).map(|_| rng.gen_range(-4i64..=4)).collect::<Vec<_>>())
}

/// Exact probes: `f(c) < (f(c + t d) + f(c - t d)) / 2` along random
/// directions, with `t = 1/64` halved until both points are in the domain.
fn exact_midpoint_probes<O: SliceObjective + ?Sized>(obj: &O, c: &RationalVector, fc: &Rational, seed: u64) -> bool {
    let mut rng = restart_rng(seed, u64::MAX);
    let normals: Vec<Vec<Rational>> = obj.probe_normals(c).into_iter().map(|v| v.into_coords()).collect();
    let two = Rational::from_integer(2.into());
    let mut done = 0;
    let mut attempts = 0;
    while done < PROBES {
        attempts += 1;
        if attempts > 100 {
            return false;
        }
        let d = RationalVector::new(project_out(&normals, random_integer_direction(&mut rng, c.dim()).coords()));
        if d.is_zero() {
            continue;
        }
        let scale = c.max_abs() / d.max_abs();
        let mut t = Rational::new(1.into(), 64.into()) * scale;
        let mut pair = None;
        for _ in 0..30 {
            let step = d.scale(&t);
            if let (Some(p), Some(m)) = (obj.exact_value(&(c + &step)), obj.exact_value(&(c - &step))) {
                pair = Some((p, m));
                break;
            }
            t /= &two;
        }
        let Some((p, m)) = pair else { return false };
        if !(fc * &two < p + m) {
            return false;
        }
        done += 1;
    }
    true
}

fn float_midpoint_probes<O: SliceObjective + ?Sized>(obj: &O, c: &[f64], seed: u64) -> bool {
    let Some(fc) = obj.global_value(c) else { return false };
    let center = RationalVector::new(c.iter().map(|&v| from_f64(v).unwrap_or_else(Rational::zero)).collect());
    let normals: Vec<Vec<f64>> = obj.probe_normals(&center).iter().map(|v| v.to_f64()).collect();
    let basis = tangent_basis(c.len(), &normals);
    if basis.is_empty() {
        return true;
    }
    let mut rng = restart_rng(seed, u64::MAX);
    for _ in 0..PROBES {
        let coef: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let d: Vec<f64> = (0..c.len()).map(|i| basis.iter().zip(&coef).map(|(b, k)| k * b[i]).sum()).collect();
        let dn = norm(&d);
        if dn == 0.0 {
            continue;
        }
        let mut t = norm(c) / 64.0 / dn;
        let mut ok = false;
        for _ in 0..30 {
            if let (Some(p), Some(m)) = (obj.global_value(&axpy(c, t, &d)), obj.global_value(&axpy(c, -t, &d))) {
                ok = 2.0 * fc < (p + m) * (1.0 - 1e-12);
                break;
            }
            t *= 0.5;
        }
        if !ok {
            return false;
        }
    }
    true
}

/// Uniqueness certificate: clustering of the converged restarts plus
/// midpoint-convexity probes around the minimizer.
pub fn uniqueness_certificate<O: SliceObjective + ?Sized>(
    obj: &O,
    runs: &[&Run],
    best: &Run,
    candidate: Option<&RationalCandidate>,
    cfg: &OptimizerConfig,
) -> (bool, f64) {
    let spread = cluster_spread(runs, best.value);
    if !best.converged || spread > cfg.cluster_radius {
        return (false, spread);
    }
    let probes = match candidate {
        Some(c) => exact_midpoint_probes(obj, &c.arg, &c.value, cfg.seed),
        None => float_midpoint_probes(obj, &best.arg, cfg.seed),
    };
    (probes, spread)
}

fn summaries(runs: &[Run]) -> Vec<RestartSummary> {
    runs.iter()
        .enumerate()
        .map(|(index, r)| RestartSummary {
            index,
            value: r.value,
            stationarity_residual: r.residual,
            converged: r.converged,
            iterations: r.iterations,
        })
        .collect()
}

/// `vol-hat` on the slice `A = 1` of the open Reeb cone.
pub struct ToricObjective<'a> {
    s: &'a ToricSingularity,
    float: FloatVolume,
    generators: Vec<Vec<f64>>,
}

impl<'a> ToricObjective<'a> {
    pub fn new(s: &'a ToricSingularity) -> Self {
        ToricObjective { s, float: s.float_volume(), generators: s.generators().iter().map(|g| g.to_f64()).collect() }
    }
}

impl SliceObjective for ToricObjective<'_> {
    fn dim(&self) -> usize {
        self.s.dim()
    }

    fn constraint_normals(&self) -> Vec<Vec<f64>> {
        vec![self.float.gorenstein().to_vec()]
    }

    fn value(&self, x: &[f64]) -> Option<f64> {
        if !(self.float.log_discrepancy(x) > 0.0) {
            return None;
        }
        self.float.normalized_volume(x)
    }

    fn normalize(&self, x: &mut [f64]) {
        let a = self.float.log_discrepancy(x);
        if a > 0.0 {
            x.iter_mut().for_each(|v| *v /= a);
        }
    }

    /// Dirichlet-weighted combination of the primitive generators.
    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for g in &self.generators {
            let lambda = -(1.0 - rng.gen::<f64>()).ln();
            x.iter_mut().zip(g).for_each(|(xi, gi)| *xi += lambda * gi);
        }
        x
    }

    fn exact_value(&self, q: &RationalVector) -> Option<Rational> {
        self.s.normalized_volume(q).ok()
    }

    fn snap(&self, q: &RationalVector) -> Option<RationalVector> {
        let a = self.s.log_discrepancy(q).ok()?;
        Some(q.scale(&a.recip()))
    }

    fn probe_normals(&self, _center: &RationalVector) -> Vec<RationalVector> {
        vec![self.s.gorenstein_covector().clone()]
    }
}

/// Minimizes `vol-hat` over the Reeb cone of a toric singularity.
pub fn minimize_toric(s: &ToricSingularity, cfg: &OptimizerConfig) -> Result<MinimizerReport, Error> {
    let obj = ToricObjective::new(s);
    let runs = multistart(&obj, cfg, 0);
    let best = best_run(&runs).ok_or_else(|| Error::InvalidInput("no restart reached the domain".into()))?;
    let b = &runs[best];
    let candidate = if b.converged { rational_candidate(&obj, &b.arg, b.value, cfg) } else { None };
    let refs: Vec<&Run> = runs.iter().collect();
    let (unique, spread) = uniqueness_certificate(&obj, &refs, b, candidate.as_ref(), cfg);
    Ok(MinimizerReport {
        arg: b.arg.clone(),
        value: b.value,
        stationarity_residual: b.residual,
        converged: b.converged,
        rational_candidate: candidate,
        unique,
        max_pairwise_distance: spread,
        restarts: summaries(&runs),
        region: None,
        degenerate_initial_form: None,
        certification_scope: "minimum over toric valuations (the Reeb cone); for toric singularities this is \
                              the global minimum of the normalized volume"
            .into(),
    })
}

/// A linearity region of `w |-> w(f)`: the weights where exactly the terms in
/// `active` attain the minimum, sliced by `w(f) = 1`.
pub struct HypersurfaceRegion<'a> {
    h: &'a WeightedHypersurface,
    active: Vec<usize>,
    base: RationalVector,
    base_f: Vec<f64>,
    /// Orthonormal basis of the span of the active exponents.
    span: Vec<Vec<f64>>,
    terms: Vec<Vec<f64>>,
}

impl<'a> HypersurfaceRegion<'a> {
    /// Some interior point of the region, found by an exact LP maximizing the
    /// slack of every strict inequality; `None` if the region is empty.
    pub fn new(h: &'a WeightedHypersurface, active: Vec<usize>) -> Option<Self> {
        let n = h.ambient_dim();
        let lift = |v: &RationalVector, s: i64| {
            let mut c = v.coords().to_vec();
            c.push(Rational::from_integer(s.into()));
            RationalVector::new(c)
        };
        let one = Rational::one();
        let mut hs = Vec::new();
        for i in 0..h.terms().len() {
            let t = h.term_vector(i);
            if active.contains(&i) {
                hs.push(Halfspace::new(lift(&t, 0), one.clone()));
                hs.push(Halfspace::at_least(lift(&t, 0), one.clone()));
            } else {
                hs.push(Halfspace::at_least(lift(&t, -1), one.clone()));
            }
        }
        for i in 0..n {
            hs.push(Halfspace::at_least(lift(&RationalVector::unit(n, i), -1), Rational::zero()));
        }
        hs.push(Halfspace::at_least(lift(&RationalVector::from_i64s(&vec![1; n]), -1), one.clone()));
        hs.push(Halfspace::new(RationalVector::unit(n + 1, n), one));
        let sol = lp_optimize(&RationalVector::unit(n + 1, n), &hs, Sense::Max).ok()?;
        if !sol.value.is_positive() {
            return None;
        }
        let base = RationalVector::new(sol.point.coords()[..n].to_vec());
        let terms: Vec<Vec<f64>> = (0..h.terms().len()).map(|i| h.term_vector(i).to_f64()).collect();
        let active_rows: Vec<Vec<f64>> = active.iter().map(|&i| terms[i].clone()).collect();
        let complement = tangent_basis(n, &active_rows);
        let span = tangent_basis(n, &complement);
        Some(HypersurfaceRegion { h, base_f: base.to_f64(), base, active, span, terms })
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn interior_point(&self) -> &RationalVector {
        &self.base
    }

    pub fn tangent_dim(&self) -> usize {
        self.h.ambient_dim() - self.span.len()
    }

    fn inside(&self, w: &[f64]) -> bool {
        w.iter().all(|&x| x > 0.0)
            && w.iter().sum::<f64>() > 1.0
            && (0..self.terms.len()).all(|i| self.active.contains(&i) || dot(&self.terms[i], w) >= 1.0)
    }

    /// Largest `t` keeping `base + t d` inside the linear constraints.
    fn max_step(&self, d: &[f64]) -> f64 {
        let w = &self.base_f;
        let mut t = f64::INFINITY;
        let mut limit = |value: f64, rate: f64| {
            if rate < 0.0 {
                t = t.min(value / -rate);
            }
        };
        for i in 0..w.len() {
            limit(w[i], d[i]);
        }
        limit(w.iter().sum::<f64>() - 1.0, d.iter().sum());
        for (i, term) in self.terms.iter().enumerate() {
            if !self.active.contains(&i) {
                limit(dot(term, w) - 1.0, dot(term, d));
            }
        }
        t
    }
}

impl SliceObjective for HypersurfaceRegion<'_> {
    fn dim(&self) -> usize {
        self.h.ambient_dim()
    }

    fn constraint_normals(&self) -> Vec<Vec<f64>> {
        self.active.iter().map(|&i| self.terms[i].clone()).collect()
    }

    /// `(sum(w) - 1)^n / prod(w)`, the normalized volume when `w(f) = 1`.
    fn value(&self, w: &[f64]) -> Option<f64> {
        if !self.inside(w) {
            return None;
        }
        let a = w.iter().sum::<f64>() - 1.0;
        Some(a.powi(self.h.dim() as i32) / w.iter().product::<f64>())
    }

    fn normalize(&self, w: &mut [f64]) {
        let mut d: Vec<f64> = w.iter().zip(&self.base_f).map(|(a, b)| a - b).collect();
        for b in &self.span {
            let c = dot(&d, b);
            d.iter_mut().zip(b).for_each(|(di, bi)| *di -= c * bi);
        }
        w.iter_mut().zip(self.base_f.iter().zip(&d)).for_each(|(wi, (b, di))| *wi = b + di);
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let basis = tangent_basis(self.dim(), &self.constraint_normals());
        if basis.is_empty() {
            return self.base_f.clone();
        }
        let coef: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let d: Vec<f64> = (0..self.dim()).map(|i| basis.iter().zip(&coef).map(|(b, k)| k * b[i]).sum()).collect();
        let cap = 10.0 * norm(&self.base_f) / norm(&d).max(1e-300);
        let t = 0.9 * rng.gen::<f64>() * self.max_step(&d).min(cap);
        axpy(&self.base_f, t, &d)
    }

    fn exact_value(&self, q: &RationalVector) -> Option<Rational> {
        self.h.normalized_volume(q).ok()
    }

    fn snap(&self, q: &RationalVector) -> Option<RationalVector> {
        // q is only known up to scale: first fix w(f) = 1 on the active
        // terms, then project onto their affine span.
        let t0 = self.h.term_vector(self.active[0]).dot(q);
        if !t0.is_positive() {
            return None;
        }
        let q = q.scale(&t0.recip());
        let rows: Vec<Vec<Rational>> = self.active.iter().map(|&i| self.h.term_vector(i).into_coords()).collect();
        let diff = &q - &self.base;
        let p = RationalVector::new(project_out(&rows, diff.coords()));
        Some(&self.base + &p)
    }

    fn probe_normals(&self, center: &RationalVector) -> Vec<RationalVector> {
        vec![center.clone()]
    }

    fn global_value(&self, w: &[f64]) -> Option<f64> {
        self.h.float_objective().normalized_volume(w)
    }
}

/// Nonempty linearity regions of `w(f)` meeting the klt domain.
pub fn hypersurface_regions(h: &WeightedHypersurface) -> Result<Vec<HypersurfaceRegion<'_>>, Error> {
    let m = h.terms().len();
    if m > MAX_HYPERSURFACE_TERMS {
        return Err(Error::InvalidInput(format!(
            "region search supports at most {MAX_HYPERSURFACE_TERMS} terms, got {m}"
        )));
    }
    let subsets: Vec<Vec<usize>> =
        (1u32..(1 << m)).map(|mask| (0..m).filter(|&i| mask & (1 << i) != 0).collect()).collect();
    Ok(subsets.into_par_iter().filter_map(|t| HypersurfaceRegion::new(h, t)).collect())
}

/// Minimizes `vol-hat` over monomial weights `w > 0` on a hypersurface,
/// searching each linearity region of `w(f)` separately.
pub fn minimize_hypersurface(h: &WeightedHypersurface, cfg: &OptimizerConfig) -> Result<MinimizerReport, Error> {
    if !h.nondegenerate() && h.family().is_none() {
        return Err(Error::NondegeneracyUnknown(
            "minimization needs the closed-form volume, which requires a nondegenerate polynomial".into(),
        ));
    }
    let regions = hypersurface_regions(h)?;
    if regions.is_empty() {
        return Err(Error::NotKlt("no monomial weight has positive log discrepancy".into()));
    }
    let per_region: Vec<Vec<Run>> = regions
        .iter()
        .enumerate()
        .map(|(k, r)| {
            if r.tangent_dim() == 0 {
                return vec![descend(r, r.base_f.clone(), cfg)];
            }
            // A region whose minimum sits on its boundary is covered by a
            // smaller region; one probe descent is enough to find out.
            let probe = descend(r, r.base_f.clone(), cfg);
            if !probe.converged {
                return vec![probe];
            }
            multistart(r, cfg, k as u64 + 1)
        })
        .collect();
    // Only runs that converge inside their region are critical points of
    // the true objective.
    let mut winners: Vec<(usize, usize)> = Vec::new();
    for (k, runs) in per_region.iter().enumerate() {
        if let Some(i) = best_run(runs).filter(|&i| runs[i].converged) {
            winners.push((k, i));
        }
    }
    let flat: Vec<Run> = winners.iter().map(|&(k, i)| per_region[k][i].clone()).collect();
    let (k, b) = match best_run(&flat) {
        Some(j) => winners[j],
        None => {
            let all: Vec<(usize, usize)> =
                (0..per_region.len()).flat_map(|k| (0..per_region[k].len()).map(move |i| (k, i))).collect();
            let flat_all: Vec<Run> = all.iter().map(|&(k, i)| per_region[k][i].clone()).collect();
            let j = best_run(&flat_all).ok_or_else(|| Error::InvalidInput("no restart reached the domain".into()))?;
            all[j]
        }
    };
    let region = &regions[k];
    let best = &per_region[k][b];
    let candidate = if best.converged { rational_candidate(region, &best.arg, best.value, cfg) } else { None };
    let refs: Vec<&Run> = per_region.iter().flatten().collect();
    let (unique, spread) = uniqueness_certificate(region, &refs, best, candidate.as_ref(), cfg);
    let active_terms: Vec<Vec<u32>> = region.active.iter().map(|&i| h.terms()[i].clone()).collect();
    let degenerate = active_terms.len() == 1 || (0..h.ambient_dim()).any(|j| active_terms.iter().all(|t| t[j] > 0));
    Ok(MinimizerReport {
        arg: best.arg.clone(),
        value: best.value,
        stationarity_residual: best.residual,
        converged: best.converged,
        rational_candidate: candidate,
        unique,
        max_pairwise_distance: spread,
        restarts: summaries(&per_region[k]),
        region: Some(active_terms),
        degenerate_initial_form: Some(degenerate),
        certification_scope: "minimum over monomial weights only; the normalized volume of the singularity \
                              may be smaller when the minimizer is not monomial"
            .into(),
    })
}
