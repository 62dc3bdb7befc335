//! Last passage times under the v-periodized weight field and the coupled
//! comparison with the iid field sharing the same seed.
//!
//! The periodic measure is realized concretely as the pushforward of the iid
//! field through the fundamental-domain tiling, so every comparison between
//! H (periodic) and G (iid) here is a per-seed coupling, not merely a
//! statement about distributions.

use dlpp_engine::{last_passage, point_segment_distance, DlppError, MaximalPath};
use lattice_core::{weight_at, LatticeError, LatticePoint, PeriodVector, WeightField};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PeriodicDlppError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Dlpp(#[from] DlppError),
}

/// Point-to-point last passage time over the v-periodized field: identical
/// dynamic program to the iid case, with every weight lookup canonicalized
/// into the fundamental domain spanned by (v, axis).
pub fn periodic_last_passage(
    seed: u64,
    v: PeriodVector,
    axis: LatticePoint,
    p: LatticePoint,
    q: LatticePoint,
) -> Result<f64, PeriodicDlppError> {
    let field = WeightField::periodic(seed, v, axis)?;
    Ok(last_passage(&field, p, q)?)
}

/// Transversal-band statistics of a path in the periodic model, together
/// with the validity flag of the concentration estimate: the band argument
/// needs dist(v, p̄q̄) > (3/2)·y·|q−p|^{2/3} so that three consecutive band
/// strips carry independent weights.
#[derive(Debug, Clone, Copy)]
pub struct BandExitReport {
    pub max_deviation: f64,
    pub exits: bool,
    pub valid: bool,
}

pub fn periodic_band_exit(
    path: &MaximalPath,
    p: LatticePoint,
    q: LatticePoint,
    y: f64,
    v: PeriodVector,
) -> BandExitReport {
    let (max_deviation, exits) = dlpp_engine::band_exit_statistics(path, p, q, y);
    let diag = q - p;
    let sep = point_segment_distance(v.as_point(), LatticePoint::new(0, 0), diag);
    BandExitReport {
        max_deviation,
        exits,
        valid: sep > 1.5 * y * diag.norm().powf(2.0 / 3.0),
    }
}

/// Separation between the period vector and the segment 0̄,(q−p): the
/// geometric quantity governing when the periodic and iid models are coupled
/// near that segment.
pub fn period_segment_separation(v: PeriodVector, p: LatticePoint, q: LatticePoint) -> f64 {
    point_segment_distance(v.as_point(), LatticePoint::new(0, 0), q - p)
}

/// Outcome of a coupling probe over a seed set.
#[derive(Debug, Clone)]
pub struct CouplingReport {
    /// Fraction of seeds with H(q′) ≠ G(q′) for at least one probed q′.
    pub disagreement_rate: f64,
    /// Side length of the declared probing sub-grid.
    pub subgrid: usize,
    /// Number of lattice points probed per seed.
    pub points_probed: usize,
}

/// For each seed, compare H(q′) and G(q′) (paths from the origin, shared
/// seed, axis = q) over a `subgrid`×`subgrid` sample of the ball
/// |q′−q| ≤ λ|q|^{2/3}, and report the fraction of seeds with any
/// disagreement. The full ball has O(|q|^{4/3}) points; the sub-grid is the
/// declared sampling.
pub fn coupling_probe(
    seeds: &[u64],
    v: PeriodVector,
    q: LatticePoint,
    lambda: f64,
    subgrid: usize,
) -> Result<CouplingReport, PeriodicDlppError> {
    let radius = lambda * q.norm().powf(2.0 / 3.0);
    let r = radius.floor() as i64;
    let mut targets = Vec::new();
    let g = subgrid.max(2) as i64;
    let mut offsets: Vec<i64> = (0..g)
        .map(|a| -r + (2 * r * a) / (g - 1))
        .collect();
    offsets.dedup();
    for &dy in &offsets {
        for &dx in &offsets {
            if (dx * dx + dy * dy) as f64 <= radius * radius {
                targets.push(q + LatticePoint::new(dx, dy));
            }
        }
    }
    targets.sort();
    targets.dedup();

    let origin = LatticePoint::new(0, 0);
    let mut disagreements = 0usize;
    for &seed in seeds {
        let iid = WeightField::iid(seed);
        let per = WeightField::periodic(seed, v, q)?;
        let g_vals = grid_values(&iid, origin, &targets);
        let h_vals = grid_values(&per, origin, &targets);
        if g_vals
            .iter()
            .zip(&h_vals)
            .any(|(a, b)| a.to_bits() != b.to_bits())
        {
            disagreements += 1;
        }
    }
    Ok(CouplingReport {
        disagreement_rate: disagreements as f64 / seeds.len().max(1) as f64,
        subgrid,
        points_probed: targets.len(),
    })
}

/// One forward sweep from `p` reading G_p at every target point (targets
/// must dominate `p`; sorted lexicographically by (x1, x2)).
fn grid_values(field: &WeightField, p: LatticePoint, targets: &[LatticePoint]) -> Vec<f64> {
    let x1_max = targets.iter().map(|t| t.x1).max().unwrap_or(p.x1);
    let x2_max = targets.iter().map(|t| t.x2).max().unwrap_or(p.x2);
    let width = (x1_max - p.x1 + 1) as usize;
    let mut row = vec![0f64; width];
    let mut out = vec![f64::NAN; targets.len()];
    for x2 in p.x2..=x2_max {
        for j in 0..width {
            let w = weight_at(field, LatticePoint::new(p.x1 + j as i64, x2));
            let left = if j > 0 { row[j - 1] } else { f64::NEG_INFINITY };
            let down = if x2 > p.x2 { row[j] } else { f64::NEG_INFINITY };
            let best = left.max(down);
            row[j] = if best == f64::NEG_INFINITY { w } else { w + best };
        }
        for (k, t) in targets.iter().enumerate() {
            if t.x2 == x2 {
                out[k] = row[(t.x1 - p.x1) as usize];
            }
        }
    }
    out
}
