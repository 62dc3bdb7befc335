//! Property tests for the fundamental-domain reduction: the canonical
//! representative is translation-invariant and its x-coefficient in the
//! (v, axis) basis lies in (−1/2, 1/2], checked in exact integer arithmetic.

use lattice_core::{canonicalize, LatticePoint, PeriodVector};
use proptest::prelude::*;

/// Exact check that cross(c, axis)/cross(v, axis) ∈ (−1/2, 1/2].
fn x_coeff_in_half_open(c: LatticePoint, v: PeriodVector, axis: LatticePoint) -> bool {
    let mut a = c.cross(axis);
    let mut b = v.as_point().cross(axis);
    if b < 0 {
        a = -a;
        b = -b;
    }
    -b < 2 * a && 2 * a <= b
}

proptest! {
    #[test]
    fn canonical_form_is_invariant_and_in_domain(
        x1 in -100i64..100,
        x2 in -100i64..100,
        k in -20i64..20,
    ) {
        let v = PeriodVector::new(5, -3).unwrap();
        let axis = LatticePoint::new(7, 4);
        let p = LatticePoint::new(x1, x2);

        let (c, s) = canonicalize(p, v, axis).unwrap();
        prop_assert_eq!(c, p - s * v.as_point());
        prop_assert!(x_coeff_in_half_open(c, v, axis));

        // Any v-translate reduces to the same representative.
        let (c2, _) = canonicalize(p + k * v.as_point(), v, axis).unwrap();
        prop_assert_eq!(c, c2);
    }

    #[test]
    fn canonical_form_for_random_geometry(
        x1 in -1000i64..1000,
        x2 in -1000i64..1000,
        v1 in 1i64..40,
        v2 in -40i64..-1,
        a1 in 1i64..50,
        a2 in 1i64..50,
    ) {
        let v = PeriodVector::new(v1, v2).unwrap();
        let axis = LatticePoint::new(a1, a2);
        let p = LatticePoint::new(x1, x2);
        match canonicalize(p, v, axis) {
            Ok((c, s)) => {
                prop_assert_eq!(c, p - s * v.as_point());
                prop_assert!(x_coeff_in_half_open(c, v, axis));
            }
            // Only a degenerate axis may fail.
            Err(_) => prop_assert_eq!(v.as_point().cross(axis), 0),
        }
    }
}
