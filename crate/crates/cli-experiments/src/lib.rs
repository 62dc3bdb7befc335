//! Reproducible experiment runner: named presets covering the laboratory's
//! claims, seeded parallel replicas, and CSV/JSON artifacts.

use std::io::Write;
use std::path::Path;

use dlpp_engine::{
    band_exit_statistics, last_passage, last_passage_from_boundary, quadrangle_check,
    reconstruct_path, BoundaryPath, DlppError,
};
use hydrodynamics::{HydroError, ScalingFrame};
use lattice_core::{
    counter_hash, d_constant, replica_seed, s_constant, LatticeError, LatticePoint, PeriodVector,
    WeightField,
};
use periodic_dlpp::{coupling_probe, periodic_band_exit, CouplingReport, PeriodicDlppError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stats_ref::{EmpiricalDistribution, ReferenceCdf, StatsError};
use tasep_sim::{
    equivalence_grid_sweep, flat_observable, position_from_passage_spanned, step_label,
    step_observable, RingTasep, SimError, StreamRng,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Dlpp(#[from] DlppError),
    #[error(transparent)]
    Periodic(#[from] PeriodicDlppError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Hydro(#[from] HydroError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Config(String),
    #[error("thread pool: {0}")]
    Threads(String),
}

pub const PRESET_NAMES: [&str; 9] = [
    "flat-goe",
    "step-gue-away",
    "step-shock-law",
    "coupling-probe",
    "transversal-band",
    "density-profile",
    "equivalence-sweep",
    "quadrangle-sweep",
    "corner-argmax",
];

/// Human-readable statement of what each preset tests.
pub fn preset_description(name: &str) -> Option<&'static str> {
    Some(match name {
        "flat-goe" => {
            "flat initial data, one-point fluctuation law: rescaled tagged-particle \
             displacement vs the GOE Tracy-Widom family, ring clocks and infinite \
             last-passage routes"
        }
        "step-gue-away" => {
            "periodic step initial data away from shocks: rescaled particle position \
             vs the GUE Tracy-Widom law, ring and infinite last-passage routes"
        }
        "step-shock-law" => {
            "periodic step initial data at a shock time: rescaled position vs the \
             maximum of two independent GUE Tracy-Widom variables with mixing ratio r"
        }
        "coupling-probe" => {
            "periodic vs independent weight fields: last-passage values near the \
             endpoint coincide when the period vector is long enough"
        }
        "transversal-band" => {
            "maximal-path transversal fluctuations stay inside a band of width \
             proportional to the two-thirds power of the endpoint distance"
        }
        "density-profile" => {
            "ring density profile matches the periodic Burgers entropy solution \
             with one shock per period"
        }
        "equivalence-sweep" => {
            "exact pathwise equivalence between exclusion-process thresholds and \
             boundary last-passage values on the shared weight field"
        }
        "quadrangle-sweep" => {
            "corner-to-point passage times satisfy the crossing-path quadrangle \
             inequality on every realization"
        }
        "corner-argmax" => {
            "flat-boundary last passage: the maximizing staircase corner \
             concentrates around its deterministic location"
        }
        _ => return None,
    })
}

/// Flat superset of all preset knobs, so a single config schema covers every
/// preset and round-trips through TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// Particle count N.
    pub particles: i64,
    /// Flat spacing d (density 1/d).
    pub spacing: i64,
    /// Ring sites per particle for step data (L = ratio * N).
    pub period_ratio: i64,
    /// Absolute time (flat preset).
    pub time: f64,
    /// Rescaled spatial parameter.
    pub u: f64,
    /// Label fraction alpha.
    pub alpha: f64,
    /// Density rho (step presets).
    pub density: f64,
    /// Shock counter j.
    pub shock_index: i64,
    /// Position inside the inter-shock interval (away preset), in (0, 1).
    pub interval_fraction: f64,
    /// Relative interval shrink for feasibility checks.
    pub epsilon_prime: f64,
    /// Shock-law reference with the infinite-index limit ratio r = 1.
    pub index_to_infinity: bool,
    /// Endpoint coordinate for square-endpoint probes: q = (q_coord, q_coord).
    pub q_coord: i64,
    /// Neighborhood size multiplier for the coupling probe.
    pub lambda: f64,
    /// Probing sub-grid side for the coupling probe.
    pub subgrid: usize,
    /// Period-length multipliers for the coupling probe.
    pub scales: Vec<f64>,
    /// Band half-width multipliers for the transversal band preset.
    pub band_widths: Vec<f64>,
    /// Period vector for periodic-field probes.
    pub period_v1: i64,
    pub period_v2: i64,
    /// Ring size for the density profile.
    pub sites: i64,
    /// Rescaled time t / L for the density profile.
    pub tau: f64,
    pub bins: usize,
    /// Bounds for the equivalence sweep.
    pub max_particles: i64,
    pub max_sites: i64,
    pub t_step: f64,
    pub t_max: f64,
    /// Instance count for the quadrangle sweep.
    pub count: u64,
    /// Absolute time for the corner-argmax preset.
    pub argmax_time: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            particles: 1000,
            spacing: 2,
            period_ratio: 3,
            time: 1000.0,
            u: 0.0,
            alpha: 0.5,
            density: 1.0 / 3.0,
            shock_index: 1,
            interval_fraction: 0.5,
            epsilon_prime: 0.1,
            index_to_infinity: false,
            q_coord: 800,
            lambda: 1.0,
            subgrid: 9,
            scales: vec![1.0, 1.5, 2.25],
            band_widths: vec![1.0, 2.0, 3.0],
            period_v1: 300,
            period_v2: -300,
            sites: 3000,
            tau: 2.0,
            bins: 100,
            max_particles: 5,
            max_sites: 11,
            t_step: 0.5,
            t_max: 30.0,
            count: 10_000,
            argmax_time: 400.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub preset: String,
    pub seed: u64,
    pub replicas: u64,
    /// 0 means: use the environment default (TASEP_LAB_THREADS) or rayon's.
    pub threads: usize,
    pub out_dir: String,
    pub params: Params,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: "flat-goe".into(),
            seed: 0x5eed,
            replicas: 2000,
            threads: 0,
            out_dir: "out".into(),
            params: Params::default(),
        }
    }
}

/// Preset-specific defaults on top of the shared schema.
pub fn default_config(preset: &str) -> Result<RunConfig, ExperimentError> {
    if !PRESET_NAMES.contains(&preset) {
        return Err(ExperimentError::UnknownPreset(preset.to_string()));
    }
    let mut cfg = RunConfig {
        preset: preset.to_string(),
        ..RunConfig::default()
    };
    match preset {
        "flat-goe" => {}
        "step-gue-away" | "step-shock-law" => {
            cfg.params.particles = 600;
        }
        "coupling-probe" => {
            cfg.replicas = 500;
        }
        "transversal-band" => {
            cfg.params.q_coord = 500;
        }
        "density-profile" => {
            cfg.replicas = 200;
        }
        "equivalence-sweep" => {
            cfg.replicas = 200;
        }
        "quadrangle-sweep" => {
            cfg.replicas = 1; // instance count lives in params.count
        }
        "corner-argmax" => {
            cfg.replicas = 500;
            cfg.params.particles = 800;
        }
        _ => unreachable!(),
    }
    Ok(cfg)
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRow {
    pub experiment: String,
    pub seed: u64,
    pub replicate: u64,
    pub u: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// "<=" or ">=".
    pub direction: &'static str,
    pub pass: bool,
}

impl Check {
    fn le(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, direction: "<=", pass: value <= threshold }
    }

    fn ge(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, direction: ">=", pass: value >= threshold }
    }
}

pub struct RunOutcome {
    pub samples: Vec<SampleRow>,
    pub checks: Vec<Check>,
    /// Extra artifact files: (file name, contents).
    pub extra_files: Vec<(String, String)>,
    pub status: String,
    pub metrics: serde_json::Value,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.status != "fail"
    }
}

fn ks_of(values: &[f64], reference: &ReferenceCdf) -> Result<f64, ExperimentError> {
    Ok(EmpiricalDistribution::new(values.to_vec())?.ks_distance(reference))
}

// ---------------------------------------------------------------------------
// Sample generators (also called directly by the acceptance tests)
// ---------------------------------------------------------------------------

/// Point-to-point passage value at (n, n), rescaled by the exact mean and
/// cube-root scale constants.
pub fn point_gue_values(master: u64, replicas: u64, n: i64) -> Result<Vec<f64>, ExperimentError> {
    let q = LatticePoint::new(n, n);
    let p = LatticePoint::new(1, 1);
    let d = d_constant(q)?;
    let s = s_constant(q)?;
    (0..replicas)
        .into_par_iter()
        .map(|i| {
            let field = WeightField::iid(replica_seed(master, i));
            let g = last_passage(&field, p, q)?;
            Ok((g - d) / s)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Event-driven ring dynamics with memoryless clocks.
    RingClocks,
    /// Boundary last passage on an independent field (infinite model).
    InfiniteField,
    /// Boundary last passage on a periodized field (ring model).
    RingField,
}

/// Flat-geometry one-point observable at spatial parameter `u`.
pub fn flat_goe_values(
    master: u64,
    replicas: u64,
    n: i64,
    d: i64,
    t: f64,
    u: f64,
    route: Route,
) -> Result<Vec<f64>, ExperimentError> {
    if d < 2 || n < 2 {
        return Err(ExperimentError::Infeasible(format!("flat geometry n={n} d={d}")));
    }
    let rho = 1.0 / d as f64;
    let ic = BoundaryPath::Flat { n, d };
    let (kappa1, sigma1) = hydrodynamics::flat_scales(rho)?;
    let label = n / 2 + (kappa1 * u * t.powf(2.0 / 3.0)).floor() as i64;
    let x0 = ic.initial_position(label);
    let span_hint = ((1.0 - rho) * t + 12.0 * sigma1 * t.powf(1.0 / 3.0)) as i64 + 64;
    (0..replicas)
        .into_par_iter()
        .map(|i| {
            let seed = replica_seed(master, i);
            let x_t = match route {
                Route::RingClocks => {
                    let mut sim = RingTasep::new(&ic)?;
                    let mut rng = StreamRng::new(seed);
                    sim.evolve_to(t, &mut rng)?;
                    sim.position(label)
                }
                Route::InfiniteField => {
                    let field = WeightField::iid(seed);
                    position_from_passage_spanned(&field, &ic, label, t, span_hint)?
                }
                Route::RingField => {
                    let v = PeriodVector::for_ring(n, n * d)?;
                    let field = WeightField::periodic(seed, v, LatticePoint::new(1, 1))?;
                    position_from_passage_spanned(&field, &ic, label, t, span_hint)?
                }
            };
            Ok(flat_observable(x_t, x0, rho, t)?)
        })
        .collect()
}

/// Scaling frame for the step presets, from the shared parameter block.
pub fn step_frame(p: &Params, at_shock: bool) -> Result<ScalingFrame, ExperimentError> {
    let rho = 1.0 / p.period_ratio as f64;
    if at_shock {
        Ok(ScalingFrame::at_shock(rho, p.alpha, p.shock_index)?)
    } else {
        let f = p.interval_fraction;
        if !(f >= p.epsilon_prime && f <= 1.0 - p.epsilon_prime) {
            return Err(ExperimentError::Infeasible(format!(
                "interval fraction {f} outside the shrunken inter-shock interval"
            )));
        }
        let (lo, hi) = hydrodynamics::shock_interval(rho, p.alpha, p.shock_index)?;
        Ok(ScalingFrame::away_from_shock(rho, p.alpha, p.shock_index, lo + f * (hi - lo))?)
    }
}

/// Step-geometry one-point observable at spatial parameter `u`.
pub fn step_values(
    master: u64,
    replicas: u64,
    n: i64,
    frame: &ScalingFrame,
    u: f64,
    route: Route,
) -> Result<Vec<f64>, ExperimentError> {
    let l = (n as f64 / frame.rho).round() as i64;
    let ic = BoundaryPath::PeriodicStep { n, l };
    let k = step_label(frame, n, u);
    let t = frame.time * n as f64;
    let x0 = ic.initial_position(k);
    let drift = (1.0 - 2.0 * frame.mu) * t
        + frame.shocks_met as f64 * n as f64 / frame.rho
        + 2.0 * frame.mu.powf(1.0 / 3.0) * (1.0 - frame.mu).powf(1.0 / 3.0)
            * u
            * t.powf(2.0 / 3.0);
    let span_hint = (drift - x0 as f64 + 25.0 * frame.sigma2 * t.powf(1.0 / 3.0)) as i64 + 256;
    (0..replicas)
        .into_par_iter()
        .map(|i| {
            let seed = replica_seed(master, i);
            let x_t = match route {
                Route::InfiniteField => {
                    let field = WeightField::iid(seed);
                    position_from_passage_spanned(&field, &ic, k, t, span_hint)?
                }
                Route::RingField => {
                    let v = PeriodVector::for_ring(n, l)?;
                    let field = WeightField::periodic(seed, v, LatticePoint::new(1, 1))?;
                    position_from_passage_spanned(&field, &ic, k, t, span_hint)?
                }
                Route::RingClocks => {
                    let mut sim = RingTasep::new(&ic)?;
                    let mut rng = StreamRng::new(seed);
                    sim.evolve_to(t, &mut rng)?;
                    sim.position(k)
                }
            };
            Ok(step_observable(frame, n, u, x_t))
        })
        .collect()
}

/// Coupling probe at |q| with period lengths scaled by `scales`.
pub fn coupling_scan(
    master: u64,
    replicas: u64,
    q_coord: i64,
    lambda: f64,
    subgrid: usize,
    scales: &[f64],
) -> Result<Vec<(f64, CouplingReport)>, ExperimentError> {
    let q = LatticePoint::new(q_coord, q_coord);
    // Period vector v = (m, -m) with m = |q|^{2/3} (log|q|)^{0.6} read
    // coordinate-wise on the diagonal endpoint, then scaled.
    let base = (q_coord as f64).powf(2.0 / 3.0) * (q_coord as f64).ln().powf(0.6);
    let seeds: Vec<u64> = (0..replicas).map(|i| replica_seed(master, i)).collect();
    scales
        .par_iter()
        .map(|&scale| {
            let m = (scale * base).round() as i64;
            let v = PeriodVector::new(m, -m)?;
            Ok((scale, coupling_probe(&seeds, v, q, lambda, subgrid)?))
        })
        .collect()
}

pub struct BandScan {
    pub widths: Vec<f64>,
    pub iid_rates: Vec<f64>,
    pub periodic_rates: Vec<f64>,
    pub periodic_valid: bool,
}

/// Transversal-band exit frequencies for iid and periodic fields.
pub fn band_scan(
    master: u64,
    replicas: u64,
    q_coord: i64,
    widths: &[f64],
    v1: i64,
    v2: i64,
) -> Result<BandScan, ExperimentError> {
    let p = LatticePoint::new(1, 1);
    let q = LatticePoint::new(q_coord, q_coord);
    let v = PeriodVector::new(v1, v2)?;
    let per_seed: Vec<(Vec<bool>, Vec<bool>, bool)> = (0..replicas)
        .into_par_iter()
        .map(|i| -> Result<_, ExperimentError> {
            let seed = replica_seed(master, i);
            let iid = WeightField::iid(seed);
            let path = reconstruct_path(&iid, p, q)?;
            let iid_exits: Vec<bool> = widths
                .iter()
                .map(|&y| band_exit_statistics(&path, p, q, y).1)
                .collect();
            let per = WeightField::periodic(seed, v, q)?;
            let path = reconstruct_path(&per, p, q)?;
            let mut valid = true;
            let per_exits: Vec<bool> = widths
                .iter()
                .map(|&y| {
                    let rep = periodic_band_exit(&path, p, q, y, v);
                    valid &= rep.valid;
                    rep.exits
                })
                .collect();
            Ok((iid_exits, per_exits, valid))
        })
        .collect::<Result<_, _>>()?;
    let rate = |pick: &dyn Fn(&(Vec<bool>, Vec<bool>, bool)) -> &Vec<bool>, j: usize| {
        per_seed.iter().filter(|s| pick(s)[j]).count() as f64 / replicas.max(1) as f64
    };
    Ok(BandScan {
        widths: widths.to_vec(),
        iid_rates: (0..widths.len()).map(|j| rate(&|s| &s.0, j)).collect(),
        periodic_rates: (0..widths.len()).map(|j| rate(&|s| &s.1, j)).collect(),
        periodic_valid: per_seed.iter().all(|s| s.2),
    })
}

pub struct DensityResult {
    pub centers: Vec<f64>,
    pub empirical: Vec<f64>,
    pub reference: Vec<f64>,
    pub excluded: Vec<bool>,
    pub max_error: f64,
    pub shock_position: f64,
    pub shock_gap: f64,
}

/// Ring density histogram at rescaled time tau vs the Burgers profile.
pub fn density_experiment(
    master: u64,
    replicas: u64,
    rho_inverse: i64,
    sites: i64,
    tau: f64,
    bins: usize,
) -> Result<DensityResult, ExperimentError> {
    if sites % rho_inverse != 0 || sites % bins as i64 != 0 {
        return Err(ExperimentError::Infeasible(format!(
            "sites {sites} must be divisible by {rho_inverse} and by bins {bins}"
        )));
    }
    let rho = 1.0 / rho_inverse as f64;
    let n = sites / rho_inverse;
    let ic = BoundaryPath::PeriodicStep { n, l: sites };
    let t = tau * sites as f64;
    let width = sites / bins as i64;
    let counts: Vec<u64> = (0..replicas)
        .into_par_iter()
        .map(|i| -> Result<Vec<u64>, ExperimentError> {
            let mut sim = RingTasep::new(&ic)?;
            let mut rng = StreamRng::new(replica_seed(master, i));
            sim.evolve_to(t, &mut rng)?;
            let mut local = vec![0u64; bins];
            for label in 1..=n {
                local[(sim.site(label) / width) as usize] += 1;
            }
            Ok(local)
        })
        .try_reduce(
            || vec![0u64; bins],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    let (shock_x, shock_gap) = hydrodynamics::shock_trajectory(rho, tau)?;
    let shock_frac = shock_x.rem_euclid(1.0);
    let mut centers = Vec::with_capacity(bins);
    let mut empirical = Vec::with_capacity(bins);
    let mut reference = Vec::with_capacity(bins);
    let mut excluded = Vec::with_capacity(bins);
    let mut max_error = 0.0f64;
    for b in 0..bins {
        let x = (b as f64 + 0.5) / bins as f64;
        let emp = counts[b] as f64 / (replicas.max(1) * width as u64) as f64;
        let rf = hydrodynamics::burgers_density(rho, tau, x)?;
        // Circular distance to the shock, in bin units.
        let dist = (x - shock_frac).rem_euclid(1.0).min((shock_frac - x).rem_euclid(1.0));
        let excl = dist * bins as f64 <= 1.5;
        if !excl && replicas > 0 {
            max_error = max_error.max((emp - rf).abs());
        }
        centers.push(x);
        empirical.push(emp);
        reference.push(rf);
        excluded.push(excl);
    }
    Ok(DensityResult {
        centers,
        empirical,
        reference,
        excluded,
        max_error,
        shock_position: shock_x,
        shock_gap,
    })
}

pub struct EquivalenceOutcome {
    pub checks: u64,
    pub violations: u64,
    pub instances: u64,
}

/// Exhaustive small-system equivalence sweep over step and flat ring
/// geometries, both field modes, on a uniform time grid.
pub fn equivalence_experiment(
    master: u64,
    replicas: u64,
    max_particles: i64,
    max_sites: i64,
    t_step: f64,
    t_max: f64,
) -> Result<EquivalenceOutcome, ExperimentError> {
    let mut geometries = Vec::new();
    for n in 1..=max_particles {
        for l in n + 1..=max_sites {
            geometries.push(BoundaryPath::PeriodicStep { n, l });
        }
        for d in 2..=max_sites {
            if n * d <= max_sites {
                geometries.push(BoundaryPath::Flat { n, d });
            }
        }
    }
    let totals: Vec<(u64, u64, u64)> = (0..replicas)
        .into_par_iter()
        .map(|i| -> Result<(u64, u64, u64), ExperimentError> {
            let seed = replica_seed(master, i);
            let mut checks = 0;
            let mut violations = 0;
            let mut instances = 0;
            for ic in &geometries {
                let (n, l) = match *ic {
                    BoundaryPath::PeriodicStep { n, l } => (n, l),
                    BoundaryPath::Flat { n, d } => (n, n * d),
                };
                let iid = WeightField::iid(seed);
                let rep = equivalence_grid_sweep(&iid, ic, false, t_step, t_max)?;
                checks += rep.checks;
                violations += rep.violations;
                let v = PeriodVector::for_ring(n, l)?;
                let per = WeightField::periodic(seed, v, LatticePoint::new(1, 1))?;
                let rep = equivalence_grid_sweep(&per, ic, true, t_step, t_max)?;
                checks += rep.checks;
                violations += rep.violations;
                instances += 2;
            }
            Ok((checks, violations, instances))
        })
        .collect::<Result<_, _>>()?;
    let mut out = EquivalenceOutcome { checks: 0, violations: 0, instances: 0 };
    for (c, v, i) in totals {
        out.checks += c;
        out.violations += v;
        out.instances += i;
    }
    Ok(out)
}

/// Random feasible corner/endpoint quadrangle instances inside an 8x8
/// envelope; returns (instances checked, violations).
pub fn quadrangle_experiment(master: u64, count: u64) -> Result<(u64, u64), ExperimentError> {
    let results: Vec<bool> = (0..count)
        .into_par_iter()
        .map(|i| -> Result<bool, ExperimentError> {
            let h = counter_hash(master, i as i64, 0x51);
            let v1 = 1 + (h % 3) as i64;
            let v2 = -(1 + ((h >> 2) % 3) as i64);
            let c_a = LatticePoint::new(1, 4);
            let v = PeriodVector::new(v1, v2)?;
            let c_b = c_a + v.as_point();
            let a = ((h >> 4) % ((8 - 2 * v1).max(1)) as u64) as i64;
            // All four corner-to-target passages must be feasible, which
            // requires q + v to stay weakly above c_a: b >= |v2|.
            let b = -v2 + ((h >> 9) % 3) as i64;
            let q = LatticePoint::new(c_b.x1 + a, 4 + b);
            let field = WeightField::iid(counter_hash(master, i as i64, 0x52));
            Ok(quadrangle_check(&field, c_a, c_b, q, v)?)
        })
        .collect::<Result<_, _>>()?;
    let violations = results.iter().filter(|ok| !**ok).count() as u64;
    Ok((count, violations))
}

pub struct ArgmaxOutcome {
    pub hits: u64,
    pub total: u64,
    pub target: f64,
    pub window: f64,
    pub indices: Vec<i64>,
}

/// Location of the maximizing flat-boundary corner for the cell probed by
/// the flat observable at time `t`, against its deterministic prediction.
pub fn corner_argmax_experiment(
    master: u64,
    replicas: u64,
    n: i64,
    t: f64,
) -> Result<ArgmaxOutcome, ExperimentError> {
    let d = 2i64;
    let rho = 0.5;
    let ic = BoundaryPath::Flat { n, d };
    // Cell reached by the central particle's typical displacement (1-rho) t.
    let a = ((1.0 - rho) * t) as i64;
    let k = 0i64;
    let q = LatticePoint::new(n + a - k, n + 1 - k);
    let target = n as f64 - rho * rho * t;
    let window = n as f64 / 4.0;
    let indices: Vec<i64> = (0..replicas)
        .into_par_iter()
        .map(|i| -> Result<i64, ExperimentError> {
            let field = WeightField::iid(replica_seed(master, i));
            let (_, idx) = last_passage_from_boundary(&field, &ic, q, None)?;
            Ok(idx)
        })
        .collect::<Result<_, _>>()?;
    let hits = indices.iter().filter(|i| (**i as f64 - target).abs() <= window).count() as u64;
    Ok(ArgmaxOutcome { hits, total: replicas, target, window, indices })
}

// ---------------------------------------------------------------------------
// Preset dispatch and artifact writing
// ---------------------------------------------------------------------------

fn rows_from(
    experiment: &str,
    master: u64,
    u: f64,
    values: &[f64],
) -> Vec<SampleRow> {
    values
        .iter()
        .enumerate()
        .map(|(i, &value)| SampleRow {
            experiment: experiment.to_string(),
            seed: replica_seed(master, i as u64),
            replicate: i as u64,
            u,
            value,
        })
        .collect()
}

/// Executes one preset and returns its samples and pass/fail checks.
pub fn run_preset(cfg: &RunConfig) -> Result<RunOutcome, ExperimentError> {
    let p = &cfg.params;
    let master = cfg.seed;
    let replicas = cfg.replicas;
    let mut samples = Vec::new();
    let mut checks = Vec::new();
    let mut extra_files = Vec::new();
    let mut metrics = serde_json::Map::new();
    match cfg.preset.as_str() {
        "flat-goe" => {
            if replicas > 0 {
                let reference = ReferenceCdf::ScaledTwGoe;
                let ring = flat_goe_values(
                    master, replicas, p.particles, p.spacing, p.time, p.u, Route::RingClocks,
                )?;
                checks.push(Check::le("ks-ring-clocks-vs-scaled-goe", ks_of(&ring, &reference)?, 0.10));
                samples.extend(rows_from("flat-goe/ring-clocks", master, p.u, &ring));
                let inf = flat_goe_values(
                    master, replicas, p.particles, p.spacing, p.time, p.u, Route::InfiniteField,
                )?;
                checks.push(Check::le("ks-infinite-field-vs-scaled-goe", ks_of(&inf, &reference)?, 0.10));
                samples.extend(rows_from("flat-goe/infinite-field", master, p.u, &inf));
            }
        }
        "step-gue-away" => {
            if replicas > 0 {
                let frame = step_frame(p, false)?;
                metrics.insert("rescaled_time".into(), frame.time.into());
                metrics.insert("mu".into(), frame.mu.into());
                let reference = ReferenceCdf::TwGue;
                for (route, tag) in [(Route::RingField, "ring-field"), (Route::InfiniteField, "infinite-field")] {
                    let vals = step_values(master, replicas, p.particles, &frame, p.u, route)?;
                    checks.push(Check::le(
                        format!("ks-{tag}-vs-gue"),
                        ks_of(&vals, &reference)?,
                        0.10,
                    ));
                    samples.extend(rows_from(&format!("step-gue-away/{tag}"), master, p.u, &vals));
                }
            }
        }
        "step-shock-law" => {
            if replicas > 0 {
                let frame = step_frame(p, true)?;
                let r = stats_ref::shock_r(&frame, p.index_to_infinity)?;
                metrics.insert("rescaled_time".into(), frame.time.into());
                metrics.insert("mixing_ratio".into(), r.into());
                let reference = ReferenceCdf::MaxTwoTwGue { r };
                for (route, tag) in [(Route::RingField, "ring-field"), (Route::InfiniteField, "infinite-field")] {
                    let vals = step_values(master, replicas, p.particles, &frame, p.u, route)?;
                    checks.push(Check::le(
                        format!("ks-{tag}-vs-max-two-gue"),
                        ks_of(&vals, &reference)?,
                        0.12,
                    ));
                    samples.extend(rows_from(&format!("step-shock-law/{tag}"), master, p.u, &vals));
                }
            }
        }
        "coupling-probe" => {
            if replicas > 0 {
                let scan = coupling_scan(master, replicas, p.q_coord, p.lambda, p.subgrid, &p.scales)?;
                let sigma = 2.0 * (0.05f64 * 0.95 / replicas as f64).sqrt();
                for (idx, (scale, rep)) in scan.iter().enumerate() {
                    samples.push(SampleRow {
                        experiment: format!("coupling-probe/scale-{scale}"),
                        seed: master,
                        replicate: idx as u64,
                        u: *scale,
                        value: rep.disagreement_rate,
                    });
                    if idx == 0 {
                        checks.push(Check::le("disagreement-rate-base-scale", rep.disagreement_rate, 0.05));
                    } else {
                        checks.push(Check::le(
                            format!("rate-non-increasing-{}", scale),
                            rep.disagreement_rate,
                            scan[idx - 1].1.disagreement_rate + sigma,
                        ));
                    }
                }
                metrics.insert(
                    "points_probed".into(),
                    scan.first().map(|s| s.1.points_probed).unwrap_or(0).into(),
                );
            }
        }
        "transversal-band" => {
            if replicas > 0 {
                let scan = band_scan(master, replicas, p.q_coord, &p.band_widths, p.period_v1, p.period_v2)?;
                let widest = scan.widths.len() - 1;
                checks.push(Check::le("iid-exit-rate-widest-band", scan.iid_rates[widest], 0.01));
                let sigma = (scan.iid_rates[widest].max(0.001) * 0.999 / replicas as f64).sqrt();
                checks.push(Check::le(
                    "periodic-exit-rate-vs-iid",
                    scan.periodic_rates[widest],
                    scan.iid_rates[widest] + (2.0 * sigma).max(0.003),
                ));
                checks.push(Check::ge(
                    "periodic-validity-condition",
                    scan.periodic_valid as u8 as f64,
                    1.0,
                ));
                for w in 1..scan.widths.len() {
                    checks.push(Check::le(
                        format!("iid-rate-monotone-y-{}", scan.widths[w]),
                        scan.iid_rates[w],
                        scan.iid_rates[w - 1],
                    ));
                }
                let mut band_csv = String::from("y,iid_exit_rate,periodic_exit_rate\n");
                for w in 0..scan.widths.len() {
                    band_csv.push_str(&format!(
                        "{:.2},{:.6},{:.6}\n",
                        scan.widths[w], scan.iid_rates[w], scan.periodic_rates[w]
                    ));
                }
                extra_files.push(("band.csv".into(), band_csv));
            }
        }
        "density-profile" => {
            if replicas > 0 {
                let res = density_experiment(master, replicas, p.period_ratio, p.sites, p.tau, p.bins)?;
                checks.push(Check::le("max-bin-error-off-shock", res.max_error, 0.03));
                checks.push(Check::le(
                    "shock-gap-product-identity",
                    (res.shock_gap * 2.0 * (p.tau * p.sites as f64 / p.sites as f64) - 1.0).abs(),
                    0.0,
                ));
                let rho = 1.0 / p.period_ratio as f64;
                let eps = 1e-9;
                let q_plus = hydrodynamics::burgers_density(rho, p.tau, res.shock_position + eps)?;
                let q_minus = hydrodynamics::burgers_density(rho, p.tau, res.shock_position - eps)?;
                checks.push(Check::le(
                    "rankine-hugoniot-speed",
                    ((1.0 - q_plus - q_minus) - (1.0 - 2.0 * rho)).abs(),
                    1e-10,
                ));
                let mut csv = String::from("x,empirical,reference,excluded\n");
                for b in 0..res.centers.len() {
                    csv.push_str(&format!(
                        "{:.6},{:.6},{:.6},{}\n",
                        res.centers[b], res.empirical[b], res.reference[b], res.excluded[b] as u8
                    ));
                }
                extra_files.push(("density.csv".into(), csv));
                metrics.insert("shock_position".into(), res.shock_position.into());
            }
        }
        "equivalence-sweep" => {
            if replicas > 0 {
                let out = equivalence_experiment(
                    master, replicas, p.max_particles, p.max_sites, p.t_step, p.t_max,
                )?;
                checks.push(Check::le("violations", out.violations as f64, 0.0));
                metrics.insert("checks".into(), out.checks.into());
                metrics.insert("instances".into(), out.instances.into());
            }
        }
        "quadrangle-sweep" => {
            if replicas > 0 {
                let (count, violations) = quadrangle_experiment(master, p.count)?;
                checks.push(Check::le("violations", violations as f64, 0.0));
                metrics.insert("instances".into(), count.into());
            }
        }
        "corner-argmax" => {
            if replicas > 0 {
                let out = corner_argmax_experiment(master, replicas, p.particles, p.argmax_time)?;
                let rate = out.hits as f64 / out.total.max(1) as f64;
                checks.push(Check::ge("concentration-rate", rate, 0.99));
                metrics.insert("target_corner".into(), out.target.into());
                metrics.insert("window".into(), out.window.into());
                samples.extend(out.indices.iter().enumerate().map(|(i, idx)| SampleRow {
                    experiment: "corner-argmax".into(),
                    seed: replica_seed(master, i as u64),
                    replicate: i as u64,
                    u: 0.0,
                    value: *idx as f64,
                }));
            }
        }
        other => return Err(ExperimentError::UnknownPreset(other.to_string())),
    }
    let status = if replicas == 0 {
        "no-data".to_string()
    } else if checks.iter().all(|c| c.pass) {
        "pass".to_string()
    } else {
        "fail".to_string()
    };
    Ok(RunOutcome {
        samples,
        checks,
        extra_files,
        status,
        metrics: serde_json::Value::Object(metrics),
    })
}

/// Runs a preset inside a dedicated thread pool and writes all artifacts.
pub fn run_to_dir(cfg: &RunConfig) -> Result<RunOutcome, ExperimentError> {
    let started = std::time::Instant::now();
    let threads = if cfg.threads > 0 {
        cfg.threads
    } else {
        std::env::var("TASEP_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ExperimentError::Threads(e.to_string()))?;
    let outcome = pool.install(|| run_preset(cfg))?;
    let dir = Path::new(&cfg.out_dir);
    std::fs::create_dir_all(dir)?;
    let mut csv = std::fs::File::create(dir.join("samples.csv"))?;
    writeln!(csv, "experiment,seed,replicate,u,value")?;
    for row in &outcome.samples {
        writeln!(
            csv,
            "{},{},{},{:.16e},{:.16e}",
            row.experiment, row.seed, row.replicate, row.u, row.value
        )?;
    }
    for (name, contents) in &outcome.extra_files {
        std::fs::write(dir.join(name), contents)?;
    }
    let summary = serde_json::json!({
        "preset": cfg.preset,
        "description": preset_description(&cfg.preset),
        "config": cfg,
        "count": outcome.samples.len(),
        "checks": outcome.checks,
        "metrics": outcome.metrics,
        "status": outcome.status,
        "wall_seconds": started.elapsed().as_secs_f64(),
    });
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary).unwrap())?;
    Ok(outcome)
}

/// Parses a TOML run configuration.
pub fn config_from_toml(text: &str) -> Result<RunConfig, ExperimentError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
    if !PRESET_NAMES.contains(&cfg.preset.as_str()) {
        return Err(ExperimentError::UnknownPreset(cfg.preset));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_nine_presets_with_descriptions() {
        assert_eq!(PRESET_NAMES.len(), 9);
        for name in PRESET_NAMES {
            assert!(preset_description(name).is_some());
            assert!(default_config(name).is_ok());
        }
        assert!(preset_description("nope").is_none());
        assert!(default_config("nope").is_err());
    }

    #[test]
    fn config_roundtrips_through_toml() {
        for name in PRESET_NAMES {
            let cfg = default_config(name).unwrap();
            let text = toml::to_string(&cfg).unwrap();
            let back = config_from_toml(&text).unwrap();
            assert_eq!(cfg, back);
        }
    }

    #[test]
    fn zero_replicas_reports_no_data() {
        let mut cfg = default_config("flat-goe").unwrap();
        cfg.replicas = 0;
        let out = run_preset(&cfg).unwrap();
        assert_eq!(out.status, "no-data");
        assert!(out.samples.is_empty());
        assert!(out.passed());
    }

    #[test]
    fn away_preset_rejects_infeasible_fraction() {
        let mut cfg = default_config("step-gue-away").unwrap();
        cfg.params.interval_fraction = 0.01;
        assert!(matches!(step_frame(&cfg.params, false), Err(ExperimentError::Infeasible(_))));
    }

    #[test]
    fn shock_law_with_infinite_index_has_unit_ratio() {
        let mut cfg = default_config("step-shock-law").unwrap();
        cfg.params.index_to_infinity = true;
        let frame = step_frame(&cfg.params, true).unwrap();
        assert_eq!(stats_ref::shock_r(&frame, true).unwrap(), 1.0);
    }
}
