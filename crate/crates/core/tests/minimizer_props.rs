use normvol::hypersurface::{Family, WeightedHypersurface};
use normvol::minimizer::{
    best_run, descend, minimize_hypersurface, minimize_toric, multistart, rational_candidate, uniqueness_certificate,
    OptimizerConfig, Run, SliceObjective, ToricObjective,
};
use normvol::rational::{rat, Rational};
use normvol::toric::ToricSingularity;
use normvol::RationalVector;
use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Objective on the slice `x + y = 1` whose minimum is attained on the whole
/// segment `1/4 <= x <= 3/4`.
struct Plateau;

fn excess(s: f64) -> f64 {
    ((s - 0.5).abs() - 0.25).max(0.0)
}

impl SliceObjective for Plateau {
    fn dim(&self) -> usize {
        2
    }
    fn constraint_normals(&self) -> Vec<Vec<f64>> {
        vec![vec![1.0, 1.0]]
    }
    fn value(&self, x: &[f64]) -> Option<f64> {
        (x[0] > 0.0 && x[1] > 0.0).then(|| 1.0 + excess(x[0] / (x[0] + x[1])).powi(2))
    }
    fn normalize(&self, x: &mut [f64]) {
        let s = x[0] + x[1];
        x.iter_mut().for_each(|v| *v /= s);
    }
    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let t: f64 = rng.gen_range(0.05..0.95);
        vec![t, 1.0 - t]
    }
    fn exact_value(&self, q: &RationalVector) -> Option<Rational> {
        let (a, b) = (&q[0], &q[1]);
        if *a <= rat(0, 1) || *b <= rat(0, 1) {
            return None;
        }
        let s = a / (a + b);
        let d = (&s - rat(1, 2)).abs() - rat(1, 4);
        let e = if d > rat(0, 1) { d } else { rat(0, 1) };
        Some(rat(1, 1) + &e * &e)
    }
    fn snap(&self, q: &RationalVector) -> Option<RationalVector> {
        let s = &q[0] + &q[1];
        Some(q.scale(&s.recip()))
    }
    fn probe_normals(&self, _center: &RationalVector) -> Vec<RationalVector> {
        vec![RationalVector::from_i64s(&[1, 1])]
    }
}

#[test]
fn plateau_is_not_certified_unique() {
    let cfg = OptimizerConfig::default();
    let runs = multistart(&Plateau, &cfg, 0);
    let b = best_run(&runs).unwrap();
    let best = &runs[b];
    assert!(best.converged);
    assert!((best.value - 1.0).abs() < 1e-12);
    let candidate = rational_candidate(&Plateau, &best.arg, best.value, &cfg);
    let refs: Vec<&Run> = runs.iter().collect();
    let (unique, spread) = uniqueness_certificate(&Plateau, &refs, best, candidate.as_ref(), &cfg);
    assert!(!unique);
    assert!(spread > cfg.cluster_radius);
}

#[test]
fn trajectories_decrease() {
    let s = ToricSingularity::from_cyclic_quotient(7, &[1, 3]).unwrap();
    let obj = ToricObjective::new(&s);
    let cfg = OptimizerConfig::default();
    for run in multistart(&obj, &cfg, 3) {
        assert!(run.converged);
        assert!(run.trajectory.windows(2).all(|w| w[1] <= w[0]), "{:?}", run.trajectory);
        assert_eq!(*run.trajectory.last().unwrap(), run.value);
    }
    let far = descend(&obj, vec![1.0, 40.0], &cfg);
    assert!(far.trajectory.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let s = ToricSingularity::new(
        normvol::Lattice::standard(3),
        &[[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1], [1, 1, 1]].map(|r| RationalVector::from_i64s(&r)),
    )
    .unwrap();
    let h = WeightedHypersurface::from_family(Family::E7 { dim: 3 }).unwrap();
    let cfg = OptimizerConfig { seed: 11, ..OptimizerConfig::default() };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| (minimize_toric(&s, &cfg).unwrap(), minimize_hypersurface(&h, &cfg).unwrap()))
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(1));
}

#[test]
fn different_seeds_agree_on_the_minimum() {
    let s = ToricSingularity::from_cyclic_quotient(5, &[1, 2]).unwrap();
    for seed in 0..4 {
        let cfg = OptimizerConfig { seed, ..OptimizerConfig::default() };
        let r = minimize_toric(&s, &cfg).unwrap();
        assert!(r.unique);
        assert_eq!(r.rational_candidate.unwrap().value, rat(4, 5));
    }
}

#[test]
fn residual_is_reported_against_the_tolerance() {
    let s = ToricSingularity::smooth(3);
    let cfg = OptimizerConfig { tolerance: 1e-7, ..OptimizerConfig::default() };
    let r = minimize_toric(&s, &cfg).unwrap();
    assert!(r.converged);
    assert!(r.stationarity_residual <= 1e-7);
    assert_eq!(r.restarts.len(), cfg.restarts);
    let starved = OptimizerConfig { max_iters: 0, ..OptimizerConfig::default() };
    let r = minimize_toric(&ToricSingularity::from_cyclic_quotient(7, &[1, 3]).unwrap(), &starved).unwrap();
    assert!(!r.converged);
    assert!(r.rational_candidate.is_none());
}
