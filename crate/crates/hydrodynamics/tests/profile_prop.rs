//! Property tests for the hydrodynamic layer: density bounds, periodicity,
//! shock-time ordering, and scaling-frame sanity.

use hydrodynamics::{burgers_density, shock_interval, shock_time, ScalingFrame};
use proptest::prelude::*;

proptest! {
    #[test]
    fn density_is_a_periodic_profile_within_bounds(
        rho_num in 2u32..10,
        t in 0.0f64..5.0,
        x in -3.0f64..3.0,
    ) {
        // rho = 1 / rho_num <= 1/2.
        let rho = 1.0 / rho_num as f64;
        let q = burgers_density(rho, t, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
        let shifted = burgers_density(rho, t, x + 1.0).unwrap();
        prop_assert!((q - shifted).abs() <= 1e-9);
    }

    #[test]
    fn shock_times_are_ordered_and_intervals_tile(
        rho_num in 2u32..8,
        alpha in 0.05f64..0.95,
        j in 0i64..6,
    ) {
        let rho = 1.0 / rho_num as f64;
        let s_j = shock_time(rho, alpha, j).unwrap();
        let s_next = shock_time(rho, alpha, j + 1).unwrap();
        prop_assert!(s_j > 0.0);
        prop_assert!(s_next > s_j);
        let (lo, hi) = shock_interval(rho, alpha, j).unwrap();
        prop_assert_eq!(lo, s_j);
        prop_assert_eq!(hi, s_next);
    }

    #[test]
    fn scaling_frames_have_sane_parameters(
        rho_num in 2u32..8,
        alpha in 0.05f64..0.95,
        j in 0i64..4,
        f in 0.1f64..0.9,
    ) {
        let rho = 1.0 / rho_num as f64;
        let (lo, hi) = shock_interval(rho, alpha, j).unwrap();
        let frame = ScalingFrame::away_from_shock(rho, alpha, j, lo + f * (hi - lo)).unwrap();
        prop_assert!(frame.mu > 0.0 && frame.mu < 1.0);
        prop_assert!(frame.kappa2 > 0.0);
        prop_assert!(frame.sigma2 > 0.0);
        prop_assert!(!frame.at_shock);
        let shock = ScalingFrame::at_shock(rho, alpha, j.max(1)).unwrap();
        prop_assert!(shock.at_shock);
        let r = shock.mixing_ratio().unwrap();
        prop_assert!(r.is_finite() && r > 0.0);
    }
}
