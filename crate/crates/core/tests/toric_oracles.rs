use normvol::minimizer::{minimize_toric, OptimizerConfig};
use normvol::rational::{int, rat, to_f64, Rational};
use normvol::toric::{finite_cover_scaling_check, ToricSingularity};
use normvol::{Lattice, RationalVector};
use proptest::prelude::*;

fn v(xs: &[i64]) -> RationalVector {
    RationalVector::from_i64s(xs)
}

/// Counts points of `Z^n` in `{<m, r_i> >= 0, <m, xi> <= k}`, each weighted by
/// one half per tight constraint; `n! / k^n` times the weighted count
/// approximates the volume to second order. Works directly from the rays of
/// `sigma`, so the dual cone is never computed.
fn counted_volume(rays: &[Vec<i64>], xi: &[i64], k: i64) -> f64 {
    let n = xi.len();
    let bound = 3 * k;
    let mut total = 0.0;
    let mut m = vec![-bound; n];
    loop {
        let level: i64 = m.iter().zip(xi).map(|(a, b)| a * b).sum();
        let pairings: Vec<i64> = rays.iter().map(|r| r.iter().zip(&m).map(|(a, b)| a * b).sum()).collect();
        if level <= k && pairings.iter().all(|&p| p >= 0) {
            let tight = pairings.iter().filter(|&&p| p == 0).count() + (level == k) as usize;
            total += 0.5f64.powi(tight as i32);
        }
        let mut i = 0;
        while i < n {
            if m[i] < bound {
                m[i] += 1;
                break;
            }
            m[i] = -bound;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    fact * total / (k as f64).powi(n as i32)
}

#[test]
fn volume_matches_lattice_point_count() {
    let cases: &[(&[Vec<i64>], &[i64])] = &[
        (&[vec![1, 0], vec![1, 3]], &[2, 1]),
        (&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], &[1, 2, 3]),
        (&[vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]], &[0, 0, 1]),
        (&[vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]], &[1, 0, 3]),
    ];
    for (rays, xi) in cases {
        let s = ToricSingularity::new(Lattice::standard(xi.len()), &rays.iter().map(|r| v(r)).collect::<Vec<_>>()).unwrap();
        let exact = to_f64(&s.volume(&v(xi)).unwrap());
        let counted = counted_volume(rays, xi, if xi.len() == 2 { 200 } else { 30 });
        assert!((counted - exact).abs() <= 0.02 * exact, "{rays:?} {xi:?}: {counted} vs {exact}");
        assert_eq!(s.volume(&v(xi)).unwrap(), s.volume_by_triangulation(&v(xi)).unwrap());
    }
}

#[test]
fn cyclic_quotients_have_value_n_to_the_n_over_r() {
    let cfg = OptimizerConfig::default();
    for (r, a) in [(2u64, vec![1i64, 1]), (3, vec![1, 2]), (7, vec![1, 3]), (3, vec![1, 1, 1]), (5, vec![1, 2, 3])] {
        let s = ToricSingularity::from_cyclic_quotient(r, &a).unwrap();
        let n = a.len() as i64;
        let expected = rat(n.pow(n as u32), r as i64);
        // the symmetric point is the minimizer of the quotient of C^n
        assert_eq!(s.normalized_volume(&v(&vec![1; a.len()])).unwrap(), expected);
        let rep = minimize_toric(&s, &cfg).unwrap();
        assert_eq!(rep.rational_candidate.unwrap().value, expected, "1/{r}{a:?}");
    }
}

#[test]
fn quotient_1_5_12_grid_sweep() {
    // Closed form on the quotient of C^2: A = x + y, vol = 1 / (5 x y).
    let s = ToricSingularity::from_cyclic_quotient(5, &[1, 2]).unwrap();
    let mut grid_min = Rational::from_integer(1000.into());
    for q in 1..=60i64 {
        for p in 1..=3 * q {
            let xi = RationalVector::new(vec![int(1), rat(p, q)]);
            let y = rat(p, q);
            let a = int(1) + &y;
            let closed = &a * &a / (int(5) * &y);
            let got = s.normalized_volume(&xi).unwrap();
            assert_eq!(got, closed);
            grid_min = grid_min.min(got);
        }
    }
    let rep = minimize_toric(&s, &OptimizerConfig::default()).unwrap();
    let c = rep.rational_candidate.unwrap();
    assert!(c.value <= grid_min);
    assert_eq!(c.value, rat(4, 5));
    assert_eq!(c.direction, vec!["1", "1"]);
}

#[test]
fn smooth_cover_multiplies_by_the_index() {
    for (r, a) in [(2u64, vec![1i64, 1]), (5, vec![1, 2]), (4, vec![1, 1, 1]), (7, vec![1, 2, 4])] {
        let s = ToricSingularity::from_cyclic_quotient(r, &a).unwrap();
        let n = a.len();
        let xi = RationalVector::new((0..n).map(|i| rat(i as i64 + 2, 3)).collect());
        let c = finite_cover_scaling_check(&s, &Lattice::standard(n), &xi).unwrap();
        assert_eq!(c.covolume_ratio, int(r as i64));
        assert_eq!(c.volume_ratio, int(r as i64));
    }
}

#[test]
fn ramified_cover_is_rejected() {
    let s = ToricSingularity::smooth(2);
    let sub = Lattice::from_basis(&[v(&[2, 0]), v(&[0, 1])]).unwrap();
    assert!(finite_cover_scaling_check(&s, &sub, &v(&[1, 1])).is_err());
}

#[test]
fn boundary_and_exterior_xi_are_rejected() {
    let s = ToricSingularity::smooth(3);
    assert!(s.normalized_volume(&v(&[1, 1, 0])).is_err());
    assert!(s.normalized_volume(&v(&[1, -1, 2])).is_err());
}

fn three_d_cone() -> impl Strategy<Value = Vec<Vec<i64>>> {
    // rays over a polygon at height one
    prop::sample::subsequence(
        vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1], vec![1, 1, 1], vec![-1, 2, 1], vec![2, -1, 1]],
        3..=7,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn normalized_volume_is_homogeneous(rays in three_d_cone(), c in 1i64..7, d in 1i64..7) {
        let rays: Vec<RationalVector> = rays.iter().map(|r| v(r)).collect();
        if let Ok(s) = ToricSingularity::new(Lattice::standard(3), &rays) {
            let xi = s.default_xi();
            let scaled = xi.scale(&rat(c, d));
            prop_assert_eq!(s.normalized_volume(&xi).unwrap(), s.normalized_volume(&scaled).unwrap());
            let f = rat(c, d);
            prop_assert_eq!(s.volume(&scaled).unwrap() * &f * &f * &f, s.volume(&xi).unwrap());
            prop_assert_eq!(s.volume(&xi).unwrap(), s.volume_by_triangulation(&xi).unwrap());
        }
    }

    #[test]
    fn permutation_equivariance(rays in three_d_cone(), perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let rays: Vec<RationalVector> = rays.iter().map(|r| v(r)).collect();
        if let Ok(s) = ToricSingularity::new(Lattice::standard(3), &rays) {
            let xi = s.default_xi();
            let t = s.permuted(&perm);
            prop_assert_eq!(s.normalized_volume(&xi).unwrap(), t.normalized_volume(&xi.permuted(&perm)).unwrap());
        }
    }

    #[test]
    fn float_mirror_agrees(rays in three_d_cone(), p in prop::collection::vec(1i64..9, 2)) {
        let rays: Vec<RationalVector> = rays.iter().map(|r| v(r)).collect();
        if let Ok(s) = ToricSingularity::new(Lattice::standard(3), &rays) {
            // stay inside: the default xi is interior, so a small shift is too
            let xi = &s.default_xi().scale(&int(8)) + &RationalVector::new(vec![rat(p[0], 9), rat(p[1], 9), int(0)]);
            if s.check_interior(&xi).is_ok() {
                let exact = to_f64(&s.normalized_volume(&xi).unwrap());
                let float = s.float_volume().normalized_volume(&xi.to_f64()).unwrap();
                prop_assert!((exact - float).abs() <= 1e-12 * exact);
            }
        }
    }
}
