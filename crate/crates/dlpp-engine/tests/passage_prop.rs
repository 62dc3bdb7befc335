//! Property tests for the last-passage recursion: monotonicity in the
//! target, positivity, and consistency of reconstructed maximal paths.

use dlpp_engine::{last_passage, quadrangle_check, reconstruct_path};
use lattice_core::{LatticePoint, PeriodVector, WeightField};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn passage_is_positive_and_monotone_in_the_target(
        seed in any::<u64>(),
        x1 in 1i64..12,
        x2 in 1i64..12,
        dx in 0i64..4,
        dy in 0i64..4,
    ) {
        let field = WeightField::iid(seed);
        let p = LatticePoint::new(1, 1);
        let q = LatticePoint::new(x1, x2);
        let g = last_passage(&field, p, q).unwrap();
        prop_assert!(g > 0.0);
        let larger = last_passage(&field, p, LatticePoint::new(x1 + dx, x2 + dy)).unwrap();
        prop_assert!(larger >= g);
    }

    #[test]
    fn reconstructed_path_is_a_maximal_up_right_path(
        seed in any::<u64>(),
        x1 in 1i64..12,
        x2 in 1i64..12,
    ) {
        let field = WeightField::iid(seed);
        let p = LatticePoint::new(1, 1);
        let q = LatticePoint::new(x1, x2);
        let path = reconstruct_path(&field, p, q).unwrap();
        prop_assert_eq!(path.points.first().copied(), Some(p));
        prop_assert_eq!(path.points.last().copied(), Some(q));
        prop_assert_eq!(path.points.len() as i64, (x1 - 1) + (x2 - 1) + 1);
        for w in path.points.windows(2) {
            let step = w[1] - w[0];
            prop_assert!(
                (step.x1 == 1 && step.x2 == 0) || (step.x1 == 0 && step.x2 == 1)
            );
        }
        let g = last_passage(&field, p, q).unwrap();
        prop_assert!((path.total_weight - g).abs() <= 1e-12 * g.abs().max(1.0));
    }

    #[test]
    fn quadrangle_inequality_holds_on_random_feasible_instances(
        seed in any::<u64>(),
        v1 in 1i64..4,
        v2 in 1i64..4,
        a in 0i64..5,
        b in 0i64..5,
    ) {
        let field = WeightField::iid(seed);
        let c_a = LatticePoint::new(1, 6);
        let v = PeriodVector::new(v1, -v2).unwrap();
        let c_b = c_a + v.as_point();
        // q + v must stay weakly above c_a: second coordinate offset >= v2.
        let q = LatticePoint::new(c_b.x1 + a, 6 + v2 + b);
        prop_assert!(quadrangle_check(&field, c_a, c_b, q, v).unwrap());
    }
}
