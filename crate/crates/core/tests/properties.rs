use greedylab_core::bases::{BasisRep, IndexSet};
use greedylab_core::dkk::{DkkSpace, OrderedPartition};
use greedylab_core::params::decompose_projection;
use greedylab_core::spaces::SpaceSpec;
use greedylab_core::tga::{count_greedy_sets, greedy_set, greedy_sets, is_greedy_set, TieRule};
use proptest::prelude::*;

fn vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0f64..4.0, len)
}

/// Coefficients with many ties: small integers.
fn tied_vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-2i32..=2).prop_map(f64::from), len)
}

fn spaces(dim: usize) -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::lp(0.5, dim).unwrap(),
        SpaceSpec::lp(1.0, dim).unwrap(),
        SpaceSpec::lp(2.0, dim).unwrap(),
        SpaceSpec::lp(3.0, dim).unwrap(),
        SpaceSpec::mixed_z(0.5, 2.0, 3, dim).unwrap(),
        SpaceSpec::mixed_b(1.0, 0.5, None, dim).unwrap(),
        SpaceSpec::direct_sum_d(0.5, 2.0, dim).unwrap(),
    ]
}

proptest! {
    #[test]
    fn norms_are_homogeneous(f in vector(9), c in -3.0f64..3.0) {
        for s in spaces(9) {
            let scaled: Vec<f64> = f.iter().map(|x| c * x).collect();
            let lhs = s.norm(&scaled).unwrap();
            let rhs = c.abs() * s.norm(&f).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0), "{}: {lhs} vs {rhs}", s.label());
        }
    }

    #[test]
    fn r_triangle_inequality(f in vector(9), g in vector(9)) {
        for s in spaces(9) {
            let r = s.banach_exponent().unwrap();
            let sum: Vec<f64> = f.iter().zip(&g).map(|(x, y)| x + y).collect();
            let lhs = s.norm(&sum).unwrap().powf(r);
            let rhs = s.norm(&f).unwrap().powf(r) + s.norm(&g).unwrap().powf(r);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{}: {lhs} > {rhs}", s.label());
        }
    }

    #[test]
    fn lp_is_rearrangement_invariant(mut f in vector(8), seed in 0u64..1000) {
        let s = SpaceSpec::lp(0.7, 8).unwrap();
        let before = s.norm(&f).unwrap();
        let k = (seed % 8) as usize;
        f.rotate_left(k);
        if seed % 2 == 0 {
            f.iter_mut().for_each(|x| *x = -*x);
        }
        let after = s.norm(&f).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
    }

    #[test]
    fn averaging_is_an_exact_projection(f in vector(15)) {
        let part = OrderedPartition::dyadic(4).unwrap();
        let (p, q) = part.averaging_projection(&f).unwrap();
        let (pp, qp) = part.averaging_projection(&p).unwrap();
        prop_assert_eq!(&pp, &p);
        prop_assert!(qp.iter().all(|x| *x == 0.0));
        for (j, (a, b)) in p.iter().zip(&q).enumerate() {
            prop_assert!((a + b - f[j]).abs() <= 1e-12 * f[j].abs().max(1.0));
        }
    }

    #[test]
    fn greedy_sets_are_greedy(a in tied_vector(8), m in 0usize..=8) {
        for tie in [TieRule::LowestIndex, TieRule::HighestIndex] {
            let set = greedy_set(&a, m, tie).unwrap();
            prop_assert_eq!(set.len(), m);
            prop_assert!(is_greedy_set(&a, &set));
        }
        let all = greedy_sets(&a, m, TieRule::AllMaximal).unwrap();
        prop_assert_eq!(all.len() as u128, count_greedy_sets(&a, m).unwrap());
        prop_assert!(all.iter().all(|s| is_greedy_set(&a, s)));
    }

    #[test]
    fn difference_round_trip(a in vector(10)) {
        let b = BasisRep::difference(0.5, 10).unwrap();
        let f = b.synthesize(&a).unwrap();
        let back = b.analyze(&f).unwrap();
        for (x, y) in a.iter().zip(&back) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn difference_is_monotone(a in vector(16), m in 1usize..=16) {
        let b = BasisRep::difference(0.5, 16).unwrap();
        let mut head = a.clone();
        head[m..].iter_mut().for_each(|x| *x = 0.0);
        prop_assert!(b.norm(&head).unwrap() <= b.norm(&a).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn projection_decomposition_is_exact(f in tied_vector(15), m in 1usize..=15) {
        let set = greedy_set(&f, m, TieRule::HighestIndex).unwrap();
        let (lhs, rhs) = decompose_projection(&f, &set, m);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lifting_inverts_h(b in vector(4)) {
        let space = DkkSpace::default_instance(4).unwrap();
        let f = space.lift(&b).unwrap();
        let h = space.v_dual_coeffs(&f).unwrap();
        for (x, y) in b.iter().zip(&h) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
        let (q, _) = space.norm_parts(&f).unwrap();
        prop_assert!(q <= 1e-12);
    }

    #[test]
    fn index_set_algebra(xs in prop::collection::btree_set(1usize..40, 0..12),
                         ys in prop::collection::btree_set(1usize..40, 0..12)) {
        let a = IndexSet::from_indices(xs.iter().copied()).unwrap();
        let b = IndexSet::from_indices(ys.iter().copied()).unwrap();
        let union = a.union(&b);
        prop_assert_eq!(union.len(), a.len() + b.len() - a.intersection(&b).len());
        prop_assert_eq!(a.difference(&b).union(&a.intersection(&b)), a);
    }
}
