use normvol::geometry::lp::is_feasible;
use normvol::geometry::{hrep_to_vrep, lp_optimize, polytope_volume, BoundedPolytope, Sense};
use normvol::rational::{int, Rational};
use normvol::{Halfspace, Lattice, PolyhedralCone, RationalVector};
use proptest::prelude::*;

fn vecs(rows: &[Vec<i64>]) -> Vec<RationalVector> {
    rows.iter().map(|r| RationalVector::from_i64s(r)).collect()
}

/// Integer vectors pairing positively with (1, ..., 1), so the generated cone
/// is pointed.
fn pointed_generators(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, dim), dim..dim + 4).prop_map(move |mut rows| {
        for r in rows.iter_mut() {
            let s: i64 = r.iter().sum();
            if s <= 0 {
                r[0] += 1 - s;
            }
        }
        rows
    })
}

fn random_polytope(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, dim), dim + 1..dim + 6)
}

fn unimodular(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    // product of elementary shears
    prop::collection::vec((0..dim, 0..dim, -2i64..=2), 1..6).prop_map(move |ops| {
        let mut m: Vec<Vec<i64>> = (0..dim).map(|i| (0..dim).map(|j| (i == j) as i64).collect()).collect();
        for (i, j, c) in ops {
            if i != j {
                for k in 0..dim {
                    m[i][k] += c * m[j][k];
                }
            }
        }
        m
    })
}

fn apply(m: &[Vec<i64>], v: &RationalVector) -> RationalVector {
    RationalVector::new(
        m.iter().map(|row| row.iter().zip(v.coords()).map(|(a, x)| int(*a) * x).sum()).collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dual_is_an_involution(rows in (2usize..=5).prop_flat_map(pointed_generators)) {
        let dim = rows[0].len();
        let lattice = Lattice::standard(dim);
        if let Ok(c) = PolyhedralCone::from_rays(&vecs(&rows), lattice.clone()) {
            let dual = PolyhedralCone::from_rays(c.dual().rays(), lattice.clone()).unwrap();
            let back = PolyhedralCone::from_rays(dual.dual().rays(), lattice).unwrap();
            let mut a = back.rays().to_vec();
            let mut b = c.rays().to_vec();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
            for r in c.rays() {
                for f in c.facets() {
                    prop_assert!(r.dot(f) >= Rational::from_integer(0.into()));
                }
            }
        }
    }

    #[test]
    fn volume_is_unimodular_invariant(pts in random_polytope(3), m in unimodular(3)) {
        let pts = vecs(&pts);
        let p = BoundedPolytope::from_points(&pts).unwrap();
        let moved: Vec<RationalVector> = pts.iter().map(|x| apply(&m, x)).collect();
        let q = BoundedPolytope::from_points(&moved).unwrap();
        let l = Lattice::standard(3);
        prop_assert_eq!(polytope_volume(&p, &l).value, polytope_volume(&q, &l).value);
    }

    #[test]
    fn volume_scales_with_the_dimension_power(pts in random_polytope(3), c in 1i64..5, d in 1i64..4) {
        let pts = vecs(&pts);
        let factor = Rational::new(c.into(), d.into());
        let scaled: Vec<RationalVector> = pts.iter().map(|x| x.scale(&factor)).collect();
        let l = Lattice::standard(3);
        let v = polytope_volume(&BoundedPolytope::from_points(&pts).unwrap(), &l).value;
        let w = polytope_volume(&BoundedPolytope::from_points(&scaled).unwrap(), &l).value;
        prop_assert_eq!(w, v * &factor * &factor * &factor);
    }

    #[test]
    fn hrep_vrep_roundtrip(pts in random_polytope(3)) {
        let p = BoundedPolytope::from_points(&vecs(&pts)).unwrap();
        if !p.halfspaces().is_empty() {
            let q = hrep_to_vrep(p.halfspaces()).unwrap();
            prop_assert_eq!(q.vertices(), p.vertices());
            for v in p.vertices() {
                prop_assert!(p.halfspaces().iter().all(|h| h.contains(v)));
            }
        }
    }

    #[test]
    fn lp_optimum_matches_best_vertex(pts in random_polytope(3), obj in prop::collection::vec(-5i64..=5, 3)) {
        let p = BoundedPolytope::from_points(&vecs(&pts)).unwrap();
        if !p.halfspaces().is_empty() {
            let c = RationalVector::from_i64s(&obj);
            let best = p.vertices().iter().map(|v| c.dot(v)).max().unwrap();
            let sol = lp_optimize(&c, p.halfspaces(), Sense::Max).unwrap();
            prop_assert_eq!(&sol.value, &best);
            prop_assert!(p.halfspaces().iter().all(|h| h.contains(&sol.point)));
            let worst = p.vertices().iter().map(|v| c.dot(v)).min().unwrap();
            prop_assert_eq!(lp_optimize(&c, p.halfspaces(), Sense::Min).unwrap().value, worst);
        }
    }
}

#[test]
fn unit_cube_and_simplex() {
    let cube: Vec<Halfspace> = (0..3)
        .flat_map(|i| {
            let e = RationalVector::unit(3, i);
            [Halfspace::new(e.clone(), int(1)), Halfspace::at_least(e, int(0))]
        })
        .collect();
    let p = hrep_to_vrep(&cube).unwrap();
    assert_eq!(p.vertices().len(), 8);
    assert_eq!(polytope_volume(&p, &Lattice::standard(3)).value, int(1));
    let simplex = BoundedPolytope::from_points(&vecs(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])).unwrap();
    assert_eq!(polytope_volume(&simplex, &Lattice::standard(3)).value, Rational::new(1.into(), 6.into()));
    assert_eq!(
        simplex.barycenter().unwrap(),
        RationalVector::new(vec![Rational::new(1.into(), 4.into()); 3])
    );
}

#[test]
fn infeasible_and_unbounded_systems_are_named() {
    let e = RationalVector::unit(2, 0);
    let empty = [Halfspace::new(e.clone(), int(-1)), Halfspace::at_least(e.clone(), int(0))];
    assert!(!is_feasible(&empty, 2));
    assert!(hrep_to_vrep(&empty).is_err());
    let half = [Halfspace::at_least(e, int(0)), Halfspace::new(RationalVector::unit(2, 1), int(1))];
    assert!(matches!(hrep_to_vrep(&half), Err(normvol::Error::Unbounded { .. })));
}
