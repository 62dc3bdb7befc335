//! Cross-checks between the three realizations of the exclusion dynamics:
//! event-driven clocks, tandem service recursion, and boundary last passage
//! values, plus agreement with the hydrodynamic mean path.

use dlpp_engine::{boundary_values_on_row, BoundaryPath};
use lattice_core::{replica_seed, LatticePoint, PeriodVector, WeightField};
use tasep_sim::*;

fn ring_period(ic: &BoundaryPath) -> PeriodVector {
    let (n, l) = match *ic {
        BoundaryPath::PeriodicStep { n, l } => (n, l),
        BoundaryPath::Flat { n, d } => (n, n * d),
    };
    PeriodVector::for_ring(n, l).unwrap()
}

#[test]
fn single_free_particle_is_poisson() {
    // One particle on two sites is never blocked, so its jump count at time
    // 10 is Poisson(10): mean 10, sd of the sample mean sqrt(10/1000).
    let ic = BoundaryPath::PeriodicStep { n: 1, l: 2 };
    let mut total = 0.0;
    let reps = 1000;
    for i in 0..reps {
        let mut sim = RingTasep::new(&ic).unwrap();
        let mut rng = StreamRng::new(replica_seed(0xFACE, i));
        sim.evolve_to(10.0, &mut rng).unwrap();
        total += (sim.position(1) - ic.initial_position(1)) as f64;
    }
    let mean = total / reps as f64;
    assert!((mean - 10.0).abs() < 0.3, "mean = {mean}");
}

#[test]
fn exclusion_and_ordering_are_preserved() {
    let ic = BoundaryPath::PeriodicStep { n: 5, l: 12 };
    for seed in 0..20 {
        let mut sim = RingTasep::new(&ic).unwrap();
        let mut rng = StreamRng::new(seed);
        let mut prev: Vec<i64> = (1..=5).map(|k| sim.position(k)).collect();
        for step in 1..=10 {
            sim.evolve_to(step as f64 * 1.5, &mut rng).unwrap();
            let cur: Vec<i64> = (1..=5).map(|k| sim.position(k)).collect();
            for k in 0..5 {
                assert!(cur[k] >= prev[k], "particles never move left");
            }
            for k in 0..4 {
                assert!(cur[k + 1] > cur[k], "strict ordering");
            }
            assert!(cur[0] + 12 >= cur[4] + 1, "ring exclusion");
            prev = cur;
        }
    }
}

#[test]
fn service_recursion_equals_boundary_passage_values() {
    // The tandem recursion and the forward boundary sweep accumulate sums in
    // the same order, so agreement is exact, not approximate.
    let ic = BoundaryPath::PeriodicStep { n: 3, l: 7 };
    let v = ring_period(&ic);
    let axis = LatticePoint::new(1, 1);
    for seed in 0..30u64 {
        for (field, wrap) in [
            (WeightField::iid(seed), false),
            (WeightField::periodic(seed, v, axis).unwrap(), true),
        ] {
            let mut service = ServiceTasep::new(&field, ic, wrap);
            for k in 1..=3i64 {
                for m in 1..=12i64 {
                    let d = service.completion_time(k, m).unwrap();
                    let q1 = 3 + ic.initial_position(k) + m - k;
                    let q2 = 3 + 1 - k;
                    let (base, values) =
                        boundary_values_on_row(&field, &ic, q2, q1).unwrap();
                    let f = values[(q1 - base) as usize];
                    assert_eq!(d.to_bits(), f.to_bits(), "k={k} m={m} seed={seed}");
                }
            }
        }
    }
}

#[test]
fn service_ring_labels_wrap_exactly() {
    let ic = BoundaryPath::PeriodicStep { n: 3, l: 7 };
    let v = ring_period(&ic);
    let field = WeightField::periodic(7, v, LatticePoint::new(1, 1)).unwrap();
    let mut service = ServiceTasep::new(&field, ic, true);
    for k in 1..=3i64 {
        for m in 1..=8i64 {
            let a = service.completion_time(k, m).unwrap();
            let b = service.completion_time(k + 3, m).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn passage_positions_match_service_positions() {
    let ic = BoundaryPath::Flat { n: 6, d: 2 };
    for seed in 0..15u64 {
        let field = WeightField::iid(seed);
        let mut service = ServiceTasep::new(&field, ic, false);
        for k in 1..=6i64 {
            for t in [0.0, 0.7, 1.9, 4.2, 9.5] {
                let a = service.position_at(k, t).unwrap();
                let b = position_from_passage(&field, &ic, k, t).unwrap();
                assert_eq!(a, b, "k={k} t={t} seed={seed}");
            }
        }
    }
}

#[test]
fn equivalence_sweep_has_zero_violations() {
    for (n, l) in [(2i64, 5i64), (3, 7), (4, 9), (5, 11)] {
        let ic = BoundaryPath::PeriodicStep { n, l };
        let v = ring_period(&ic);
        for seed in 0..10u64 {
            let iid = WeightField::iid(seed);
            let rep = equivalence_sweep(&iid, &ic, false, 1..=n, 6).unwrap();
            assert_eq!(rep.violations, 0, "iid n={n} l={l} seed={seed}");
            assert!(rep.checks > 0);
            let per = WeightField::periodic(seed, v, LatticePoint::new(1, 1)).unwrap();
            let rep = equivalence_sweep(&per, &ic, true, 1..=n, 6).unwrap();
            assert_eq!(rep.violations, 0, "periodic n={n} l={l} seed={seed}");
        }
    }
    let flat = BoundaryPath::Flat { n: 4, d: 2 };
    for seed in 0..10u64 {
        let iid = WeightField::iid(seed);
        let rep = equivalence_sweep(&iid, &flat, false, 1..=4, 6).unwrap();
        assert_eq!(rep.violations, 0, "flat seed={seed}");
    }
}

#[test]
fn clock_and_service_dynamics_share_their_mean() {
    // Two unrelated realizations of the same ring process. Compare mean total
    // displacement at a fixed time over independent seeds.
    let ic = BoundaryPath::PeriodicStep { n: 3, l: 7 };
    let v = ring_period(&ic);
    let t = 3.0;
    let reps = 3000u64;
    let mut clock_mean = 0.0;
    for i in 0..reps {
        let mut sim = RingTasep::new(&ic).unwrap();
        let mut rng = StreamRng::new(replica_seed(0xC10C, i));
        sim.evolve_to(t, &mut rng).unwrap();
        clock_mean += (1..=3).map(|k| sim.position(k) - ic.initial_position(k)).sum::<i64>() as f64;
    }
    clock_mean /= reps as f64;
    let mut service_mean = 0.0;
    for i in 0..reps {
        let field =
            WeightField::periodic(replica_seed(0x5E11, i), v, LatticePoint::new(1, 1)).unwrap();
        let mut service = ServiceTasep::new(&field, ic, true);
        service_mean += (1..=3)
            .map(|k| service.position_at(k, t).unwrap() - ic.initial_position(k))
            .sum::<i64>() as f64;
    }
    service_mean /= reps as f64;
    assert!(
        (clock_mean - service_mean).abs() < 0.2,
        "clock {clock_mean} vs service {service_mean}"
    );
}

#[test]
fn ring_tracks_the_hydrodynamic_tagged_path() {
    // Particle 300 of 600 on an 1800-site ring, observed at rescaled time 4.
    let n = 600i64;
    let l = 1800i64;
    let ic = BoundaryPath::PeriodicStep { n, l };
    let tau = 4.0;
    let t = tau * l as f64;
    let predicted = hydrodynamics::tagged_particle_location(1.0 / 3.0, 0.5, tau).unwrap() * l as f64;
    let mut err_sum = 0.0;
    let reps = 3;
    for i in 0..reps {
        let mut sim = RingTasep::new(&ic).unwrap();
        let mut rng = StreamRng::new(replica_seed(0x7A66, i));
        sim.evolve_to(t, &mut rng).unwrap();
        err_sum += sim.position(300) as f64 - predicted;
    }
    let err = err_sum / reps as f64;
    let tol = 5.0 * (l as f64).powf(2.0 / 3.0);
    assert!(err.abs() < tol, "mean deviation {err} exceeds {tol}");
}

#[test]
fn observables_are_centered_at_moderate_size() {
    // Sanity: the flat observable of a simulated ring at moderate size lies
    // within a few units of zero (its limit law has mean O(1)).
    let ic = BoundaryPath::Flat { n: 300, d: 2 };
    let t = 300.0;
    let mut sim = RingTasep::new(&ic).unwrap();
    let mut rng = StreamRng::new(42);
    sim.evolve_to(t, &mut rng).unwrap();
    let k = 150i64;
    let x0 = ic.initial_position(k);
    let val = flat_observable(sim.position(k), x0, 0.5, t).unwrap();
    assert!(val.abs() < 8.0, "flat observable {val}");
}

#[test]
fn snapshot_csv_shape() {
    let ic = BoundaryPath::PeriodicStep { n: 3, l: 7 };
    let mut sim = RingTasep::new(&ic).unwrap();
    let mut rng = StreamRng::new(1);
    sim.evolve_to(2.0, &mut rng).unwrap();
    let mut buf = Vec::new();
    sim.snapshot_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        assert_eq!(line.split(',').count(), 4);
    }
}
