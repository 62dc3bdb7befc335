//! Covariance-decay diagnostic: passage times to endpoints tilted off the
//! diagonal decorrelate as the tilt grows, on the n^{2/3} transversal scale.

use dlpp_engine::last_passage;
use lattice_core::{replica_seed, LatticePoint, WeightField};
use rayon::prelude::*;
use stats_ref::covariance_decay;

#[test]
fn correlation_decays_in_the_transversal_parameter() {
    let n = 500i64;
    let replicas = 2000u64;
    let scale = (n as f64).powf(2.0 / 3.0);
    let tilts = [0.0, 0.0, 0.5, 2.0];
    let p = LatticePoint::new(1, 1);
    let per_seed: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let field = WeightField::iid(replica_seed(0xc0_47, i));
            tilts
                .iter()
                .map(|&u| {
                    let k = (u * scale).round() as i64;
                    last_passage(&field, p, LatticePoint::new(n + k, n - k)).unwrap()
                })
                .collect()
        })
        .collect();
    let columns: Vec<Vec<f64>> = (0..tilts.len())
        .map(|j| per_seed.iter().map(|row| row[j]).collect())
        .collect();
    let corr = covariance_decay(&columns).unwrap();
    assert!(corr.iter().all(|c| (-1.0..=1.0).contains(c)));
    // Identical columns correlate exactly.
    assert_eq!(corr[0], 1.0);
    assert_eq!(corr[1], 1.0);
    // Decay with 2-sigma separation: sd of a correlation estimate is about
    // (1 - r^2) / sqrt(replicas).
    let sigma = |r: f64| (1.0 - r * r) / (replicas as f64).sqrt();
    assert!(
        corr[3] < corr[2] - 2.0 * (sigma(corr[2]) + sigma(corr[3])),
        "correlations {corr:?} not separated"
    );
}
