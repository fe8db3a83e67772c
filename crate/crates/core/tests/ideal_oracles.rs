use std::sync::Arc;

use normvol::ideals::{convergence_report, valuative_ideal, GradedFamily, MonomialIdeal};
use normvol::rational::{int, rat, Rational};
use normvol::toric::ToricSingularity;
use normvol::RationalVector;
use proptest::prelude::*;

/// Lower convex hull of the staircase generated by `pts` together with the
/// two axis points, via a monotone chain.
fn lower_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut p = pts.to_vec();
    p.sort();
    p.dedup();
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut h: Vec<(i64, i64)> = Vec::new();
    for q in p {
        while h.len() >= 2 && cross(h[h.len() - 2], h[h.len() - 1], q) <= 0 {
            h.pop();
        }
        h.push(q);
    }
    // keep the decreasing part, from the y-axis point to the x-axis point
    let start = h.iter().position(|q| q.0 == 0).unwrap();
    let end = h.iter().position(|q| q.1 == 0).unwrap();
    h[start..=end].to_vec()
}

/// `2 * area` of the region under the hull, by the shoelace formula.
fn hull_multiplicity(h: &[(i64, i64)]) -> Rational {
    let mut poly = vec![(0, 0)];
    poly.extend(h.iter().rev());
    let twice: i64 = (0..poly.len()).map(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        a.0 * b.1 - a.1 * b.0
    }).sum();
    int(twice.abs())
}

/// `1 / t` where `(t, t)` meets the hull.
fn hull_lct(h: &[(i64, i64)]) -> Rational {
    for w in h.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        // on the segment x0 + s (x1 - x0) = y0 + s (y1 - y0)
        let den = (x1 - x0) - (y1 - y0);
        if den == 0 {
            continue;
        }
        let s = rat(y0 - x0, den);
        if s >= int(0) && s <= int(1) {
            let t = int(x0) + s * int(x1 - x0);
            return int(1) / t;
        }
    }
    panic!("diagonal misses the hull");
}

fn staircase() -> impl Strategy<Value = Vec<(i64, i64)>> {
    (1i64..12, 1i64..12, prop::collection::vec((1i64..12, 1i64..12), 0..5)).prop_map(|(a, b, rest)| {
        let mut v = vec![(a, 0), (0, b)];
        v.extend(rest);
        v
    })
}

fn smooth_ideal(pts: &[(i64, i64)]) -> MonomialIdeal {
    MonomialIdeal::smooth(2, &pts.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plane_ideals_match_the_hull_oracle(pts in staircase()) {
        let h = lower_hull(&pts);
        let i = smooth_ideal(&pts);
        prop_assert_eq!(i.multiplicity().unwrap(), hull_multiplicity(&h));
        prop_assert_eq!(i.lct().unwrap(), hull_lct(&h));
    }

    #[test]
    fn powers_scale_mult_and_lct(pts in staircase(), k in 1usize..4) {
        let i = smooth_ideal(&pts);
        let p = i.power(k);
        let kk = int(k as i64);
        prop_assert_eq!(p.lct().unwrap(), i.lct().unwrap() / &kk);
        prop_assert_eq!(p.multiplicity().unwrap(), i.multiplicity().unwrap() * &kk * &kk);
        prop_assert_eq!(p.normalized_multiplicity().unwrap(), i.normalized_multiplicity().unwrap());
    }
}

#[test]
fn powers_of_the_maximal_ideal() {
    let m2 = MonomialIdeal::smooth(2, &[vec![1, 0], vec![0, 1]]).unwrap();
    for k in 1..=10 {
        let p = m2.power(k);
        assert_eq!(p.multiplicity().unwrap(), int((k * k) as i64));
        assert_eq!(p.lct().unwrap(), rat(2, k as i64));
    }
    let m3 = MonomialIdeal::smooth(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    for k in 1..=5 {
        let p = m3.power(k);
        assert_eq!(p.multiplicity().unwrap(), int((k * k * k) as i64));
        assert_eq!(p.lct().unwrap(), rat(3, k as i64));
        assert_eq!(p.normalized_multiplicity().unwrap(), int(27));
    }
}

#[test]
fn non_primary_ideal_has_no_multiplicity() {
    let i = MonomialIdeal::smooth(2, &[vec![1, 1]]).unwrap();
    assert!(i.multiplicity().is_err());
    assert_eq!(i.lct().unwrap(), rat(1, 1));
}

/// Points of `sigma^vee ∩ M` in a box for the 1/5(1,2) quotient and for `C^2`.
fn monomials(s: &ToricSingularity, bound: i64) -> Vec<RationalVector> {
    let mut out = Vec::new();
    for a in 0..=bound {
        for b in 0..=bound {
            let y = RationalVector::from_i64s(&[a, b]);
            if s.dual_lattice().contains(&y) {
                out.push(y);
            }
        }
    }
    out
}

#[test]
fn valuative_ideals_have_the_expected_colength() {
    for s in [ToricSingularity::smooth(2), ToricSingularity::from_cyclic_quotient(5, &[1, 2]).unwrap()] {
        let s = Arc::new(s);
        for xi in [[1i64, 1], [2, 3], [1, 4]] {
            let xi = RationalVector::from_i64s(&xi);
            for k in [1i64, 3, 7, 12] {
                let a = valuative_ideal(&s, &xi, &int(k)).unwrap();
                let in_ideal = |y: &RationalVector| {
                    a.generators().iter().any(|g| {
                        let d = y - g;
                        d.coords().iter().all(|c| *c >= int(0)) && s.dual_lattice().contains(&d)
                    })
                };
                for y in monomials(&s, 4 * k) {
                    assert_eq!(in_ideal(&y), y.dot(&xi) >= int(k), "{y} at k = {k}");
                }
            }
        }
    }
}

#[test]
fn graded_family_is_graded() {
    let s = Arc::new(ToricSingularity::from_cyclic_quotient(3, &[1, 1]).unwrap());
    let f = GradedFamily::new(s, RationalVector::new(vec![int(1), rat(3, 2)])).unwrap();
    for k in 1..5 {
        for l in 1..5 {
            assert!(f.is_graded_at(&int(k), &int(l)));
        }
    }
}

#[test]
fn finite_stage_inequality_and_limit() {
    let s = Arc::new(ToricSingularity::smooth(2));
    let xi = RationalVector::new(vec![int(1), rat(5, 2)]);
    let rows = convergence_report(&s, &xi, 40).unwrap();
    assert!(rows.iter().all(|r| r.inequality_holds()));
    let target = s.normalized_volume(&xi).unwrap();
    let last = normvol::rational::to_f64(&rows.last().unwrap().scaled_multiplicity);
    let t = normvol::rational::to_f64(&target);
    assert!((last - t).abs() <= 0.02 * t, "{last} vs {t}");
}
