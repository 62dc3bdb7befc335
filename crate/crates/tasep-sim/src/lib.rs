//! Totally asymmetric exclusion dynamics on a ring and on the line, built
//! two independent ways: an event-driven continuous-time simulation with
//! memoryless clocks, and the tandem service construction that reads particle
//! trajectories directly off a last passage field. The two agree in law; the
//! service route additionally agrees pathwise with the last passage values,
//! which is the exactness check exported here.

use std::collections::BinaryHeap;
use std::collections::HashMap;

use dlpp_engine::{boundary_values_on_row, BoundaryPath, DlppError};
use hydrodynamics::{flat_scales, HydroError, ScalingFrame};
use lattice_core::{exp_unit, mix64, weight_at, LatticePoint, WeightField, GAMMA};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("ring of {sites} sites cannot hold {particles} particles")]
    Overfull { sites: i64, particles: i64 },
    #[error("time must be nonnegative and finite, got {0}")]
    BadTime(f64),
    #[error("jump count must be positive, got {0}")]
    BadJumpCount(i64),
    #[error(transparent)]
    Dlpp(#[from] DlppError),
    #[error(transparent)]
    Hydro(#[from] HydroError),
}

/// Small deterministic stream generator (splitmix-style) for simulation clocks.
pub struct StreamRng {
    state: u64,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        StreamRng { state: mix64(seed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Unit-rate exponential variate.
    pub fn exp(&mut self) -> f64 {
        exp_unit(self.next_u64())
    }
}

/// Event-driven exclusion process on a ring. Positions are kept as absolute
/// integers (winding included); site coordinates are positions modulo the
/// ring size. Labels run 1..=n left to right.
pub struct RingTasep {
    sites: i64,
    /// positions[k] is the absolute location of particle k+1.
    positions: Vec<i64>,
    now: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Event {
    time: f64,
    idx: usize,
}

impl Eq for Event {}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reverse on time for a min-heap.
        other.time.total_cmp(&self.time).then_with(|| other.idx.cmp(&self.idx))
    }
}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl RingTasep {
    /// Ring with the occupation pattern generated by `ic` restricted to one
    /// period: `n` particles on `n * d` sites for flat spacing `d`, or `n`
    /// particles on `l` sites packed left for the step pattern.
    pub fn new(ic: &BoundaryPath) -> Result<Self, SimError> {
        let (n, sites) = match *ic {
            BoundaryPath::PeriodicStep { n, l } => (n, l),
            BoundaryPath::Flat { n, d } => (n, n * d),
        };
        if n > sites {
            return Err(SimError::Overfull { sites, particles: n });
        }
        let positions = (1..=n).map(|j| ic.initial_position(j)).collect();
        Ok(RingTasep { sites, positions, now: 0.0 })
    }

    pub fn particle_count(&self) -> usize {
        self.positions.len()
    }

    pub fn sites(&self) -> i64 {
        self.sites
    }

    pub fn time(&self) -> f64 {
        self.now
    }

    /// Absolute position of particle `label` (1-based; labels outside 1..=n
    /// refer to the same particle shifted by whole ring turns).
    pub fn position(&self, label: i64) -> i64 {
        let n = self.positions.len() as i64;
        let turns = (label - 1).div_euclid(n);
        let k = (label - 1).rem_euclid(n) as usize;
        self.positions[k] + turns * self.sites
    }

    /// Site coordinate (position modulo the ring size) of particle `label`.
    pub fn site(&self, label: i64) -> i64 {
        self.position(label).rem_euclid(self.sites)
    }

    fn gap_ahead(&self, k: usize) -> i64 {
        let n = self.positions.len();
        if n == 1 {
            return self.sites - 1;
        }
        let ahead = if k + 1 == n {
            self.positions[0] + self.sites
        } else {
            self.positions[k + 1]
        };
        ahead - self.positions[k] - 1
    }

    /// Runs the dynamics until the wall clock reaches `t`. Each particle
    /// attempts unit-rate jumps to the right; attempts into an occupied site
    /// are discarded. Memorylessness makes rescheduling after every attempt
    /// equivalent to persistent clocks.
    pub fn evolve_to(&mut self, t: f64, rng: &mut StreamRng) -> Result<(), SimError> {
        if !(t.is_finite() && t >= self.now) {
            return Err(SimError::BadTime(t));
        }
        let n = self.positions.len();
        let mut heap = BinaryHeap::with_capacity(n);
        for idx in 0..n {
            heap.push(Event { time: self.now + rng.exp(), idx });
        }
        while let Some(ev) = heap.pop() {
            if ev.time > t {
                break;
            }
            if self.gap_ahead(ev.idx) >= 1 {
                self.positions[ev.idx] += 1;
            }
            heap.push(Event { time: ev.time + rng.exp(), idx: ev.idx });
        }
        self.now = t;
        Ok(())
    }

    /// Writes one `time,label,position,site` row per particle.
    pub fn snapshot_csv(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        for (k, &x) in self.positions.iter().enumerate() {
            writeln!(
                out,
                "{:.17e},{},{},{}",
                self.now,
                k + 1,
                x,
                x.rem_euclid(self.sites)
            )?;
        }
        Ok(())
    }
}

/// Tandem service construction of the exclusion process driven by a last
/// passage weight field. The completion time of particle `k`'s `m`-th jump
/// satisfies the recursion
///
/// `D(k, m) = w(q(k, m)) + max(D(k, m-1), D(k+1, m+1-g_k))`
///
/// where `g_k` is the initial gap ahead of particle `k`, `q(k, m)` is the
/// lattice cell `(x_k(0) + m + n - k, n + 1 - k)`, and `D` vanishes for
/// `m <= 0`. With a periodic field this realizes the ring process through
/// the identity `D(k + n, m) = D(k, m)`; with an independent field it
/// realizes the infinite process.
pub struct ServiceTasep<'a> {
    field: &'a WeightField,
    ic: BoundaryPath,
    memo: HashMap<(i64, i64), f64>,
    /// Reduce labels modulo the particle count (ring dynamics).
    wrap: bool,
}

impl<'a> ServiceTasep<'a> {
    pub fn new(field: &'a WeightField, ic: BoundaryPath, wrap: bool) -> Self {
        ServiceTasep { field, ic, memo: HashMap::new(), wrap }
    }

    fn particles(&self) -> i64 {
        match self.ic {
            BoundaryPath::PeriodicStep { n, .. } | BoundaryPath::Flat { n, .. } => n,
        }
    }

    fn canonical_label(&self, k: i64) -> i64 {
        if self.wrap {
            let n = self.particles();
            (k - 1).rem_euclid(n) + 1
        } else {
            k
        }
    }

    fn cell(&self, k: i64, m: i64) -> LatticePoint {
        let n = self.particles();
        LatticePoint::new(self.ic.initial_position(k) + m + n - k, n + 1 - k)
    }

    /// Completion time of the `m`-th jump of particle `k` (m >= 1).
    pub fn completion_time(&mut self, k: i64, m: i64) -> Result<f64, SimError> {
        if m < 1 {
            return Err(SimError::BadJumpCount(m));
        }
        let k = self.canonical_label(k);
        // Iterative evaluation with an explicit stack: dependency chains in
        // the label direction can be long before the jump count decreases.
        let mut stack = vec![(k, m)];
        while let Some(&(k, m)) = stack.last() {
            if m < 1 || self.memo.contains_key(&(k, m)) {
                stack.pop();
                continue;
            }
            let gap = self.ic.initial_position(k + 1) - self.ic.initial_position(k) - 1;
            let up = (self.canonical_label(k + 1), m - gap);
            let same = (k, m - 1);
            let need_same = same.1 >= 1 && !self.memo.contains_key(&same);
            let need_up = up.1 >= 1 && !self.memo.contains_key(&up);
            if need_same {
                stack.push(same);
            }
            if need_up {
                stack.push(up);
            }
            if need_same || need_up {
                continue;
            }
            stack.pop();
            let lookup = |key: (i64, i64)| {
                if key.1 >= 1 {
                    self.memo[&key]
                } else {
                    0.0
                }
            };
            let w = weight_at(self.field, self.cell(k, m));
            let value = w + lookup(same).max(lookup(up));
            self.memo.insert((k, m), value);
        }
        Ok(self.memo[&(k, m)])
    }

    /// Position of particle `k` at time `t`: the initial position plus the
    /// number of jumps completed by `t`.
    pub fn position_at(&mut self, k: i64, t: f64) -> Result<i64, SimError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(SimError::BadTime(t));
        }
        let start = self.ic.initial_position(self.canonical_label(k));
        let mut m = 1;
        while self.completion_time(k, m)? <= t {
            m += 1;
        }
        Ok(start + m - 1)
    }
}

/// Position of particle `k` at time `t`, read off the boundary last passage
/// values: the particle sits at the largest `a` with passage value at
/// `(n + a - k, n + 1 - k)` not exceeding `t`. Uses an iid field for the
/// infinite process or a periodized field for the ring.
pub fn position_from_passage(
    field: &WeightField,
    ic: &BoundaryPath,
    k: i64,
    t: f64,
) -> Result<i64, SimError> {
    // Jumps completed by time t cannot exceed t plus fluctuations.
    let span = (t as i64 + 8 * ((t.sqrt() as i64) + 4)).max(16);
    position_from_passage_spanned(field, ic, k, t, span)
}

/// Same as [`position_from_passage`] but with a caller-supplied initial
/// bound on the jump count, useful when the expected displacement is much
/// smaller than `t`. The window still grows geometrically if the bound turns
/// out to be too small, so the result does not depend on the hint.
pub fn position_from_passage_spanned(
    field: &WeightField,
    ic: &BoundaryPath,
    k: i64,
    t: f64,
    span_hint: i64,
) -> Result<i64, SimError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(SimError::BadTime(t));
    }
    let n = match *ic {
        BoundaryPath::PeriodicStep { n, .. } | BoundaryPath::Flat { n, .. } => n,
    };
    let row = n + 1 - k;
    let start = ic.initial_position(k);
    let mut span = span_hint.max(16);
    loop {
        let x1_max = start + span + n - k;
        let (base, values) = boundary_values_on_row(field, ic, row, x1_max)?;
        debug_assert_eq!(base, start + 1 + n - k);
        if let Some(last) = values.last() {
            if *last <= t {
                span *= 2;
                continue;
            }
        }
        let jumps = values.iter().take_while(|v| **v <= t).count() as i64;
        return Ok(start + jumps);
    }
}

/// Pathwise equivalence report between the tandem service construction and
/// the boundary last passage values evaluated on the same weight field.
#[derive(Debug, Default)]
pub struct EquivalenceReport {
    pub checks: u64,
    pub violations: u64,
}

/// Verifies, for every particle label in `labels` and every displacement up
/// to `max_jumps`, that the threshold equivalence holds on the shared field:
/// the particle has reached `a` by time `t` exactly when the passage value of
/// the mapped cell is at most `t`. Times are taken at each jump completion
/// and at midpoints between consecutive completions.
pub fn equivalence_sweep(
    field: &WeightField,
    ic: &BoundaryPath,
    wrap: bool,
    labels: std::ops::RangeInclusive<i64>,
    max_jumps: i64,
) -> Result<EquivalenceReport, SimError> {
    let mut service = ServiceTasep::new(field, *ic, wrap);
    let mut report = EquivalenceReport::default();
    let n = match *ic {
        BoundaryPath::PeriodicStep { n, .. } | BoundaryPath::Flat { n, .. } => n,
    };
    for k in labels {
        let start = ic.initial_position(k);
        let mut probe_times = Vec::new();
        for m in 1..=max_jumps {
            let d = service.completion_time(k, m)?;
            probe_times.push(d);
            let next = service.completion_time(k, m + 1)?;
            probe_times.push(0.5 * (d + next));
        }
        probe_times.push(0.0);
        for &t in &probe_times {
            let x_sim = {
                let mut m = 1;
                while m <= max_jumps && service.completion_time(k, m)? <= t {
                    m += 1;
                }
                start + m - 1
            };
            for a in start..=start + max_jumps {
                let reached = x_sim >= a;
                let by_passage = if a == start {
                    true // below the boundary: trivially reached
                } else {
                    let q = LatticePoint::new(n + a - k, n + 1 - k);
                    let (base, values) = boundary_values_on_row(field, ic, q.x2, q.x1)?;
                    values[(q.x1 - base) as usize] <= t
                };
                report.checks += 1;
                if reached != by_passage {
                    report.violations += 1;
                }
            }
        }
    }
    Ok(report)
}

/// Grid-based variant of [`equivalence_sweep`]: for every label, every
/// displacement `a` up to one period beyond the start, and every time on the
/// uniform grid `0, t_step, ..., t_max`, checks that the service-recursion
/// position threshold agrees with the boundary passage value threshold on
/// the shared field.
pub fn equivalence_grid_sweep(
    field: &WeightField,
    ic: &BoundaryPath,
    wrap: bool,
    t_step: f64,
    t_max: f64,
) -> Result<EquivalenceReport, SimError> {
    let (n, period) = match *ic {
        BoundaryPath::PeriodicStep { n, l } => (n, l),
        BoundaryPath::Flat { n, d } => (n, n * d),
    };
    let mut service = ServiceTasep::new(field, *ic, wrap);
    let mut report = EquivalenceReport::default();
    let steps = (t_max / t_step).floor() as i64;
    for k in 1..=n {
        let start = ic.initial_position(k);
        let completions: Vec<f64> = (1..=period)
            .map(|m| service.completion_time(k, m))
            .collect::<Result<_, _>>()?;
        let (base, values) =
            boundary_values_on_row(field, ic, n + 1 - k, n + start + period - k)?;
        for s in 0..=steps {
            let t = s as f64 * t_step;
            let jumps = completions.iter().take_while(|d| **d <= t).count() as i64;
            for a in start..=start + period {
                let reached = start + jumps >= a;
                let by_passage = if a == start {
                    true // below the boundary: trivially reached
                } else {
                    let q1 = n + a - k;
                    values[(q1 - base) as usize] <= t
                };
                report.checks += 1;
                if reached != by_passage {
                    report.violations += 1;
                }
            }
        }
    }
    Ok(report)
}

/// Scaled one-point observable for the flat initial condition: centered at
/// the deterministic drift and normalized to the cube-root scale, so the
/// limit is the corresponding one-point law.
pub fn flat_observable(x_t: i64, x_0: i64, rho: f64, t: f64) -> Result<f64, SimError> {
    let (_, sigma1) = flat_scales(rho)?;
    Ok(((x_t - x_0) as f64 - (1.0 - rho) * t) / (-sigma1 * t.powf(1.0 / 3.0)))
}

/// Label of the particle probed at rescaled spatial parameter `u` for the
/// periodic step observable: `[alpha n + kappa2 u t^{2/3}]`.
pub fn step_label(frame: &ScalingFrame, n: i64, u: f64) -> i64 {
    let t = frame.time * n as f64;
    (frame.alpha * n as f64 + frame.kappa2 * u * t.powf(2.0 / 3.0)).floor() as i64
}

/// Scaled one-point observable for the periodic step initial condition away
/// from shocks (and on the high-density side at a shock): centers the probed
/// particle's position and normalizes to the cube-root scale.
pub fn step_observable(frame: &ScalingFrame, n: i64, u: f64, x_t: i64) -> f64 {
    let t = frame.time * n as f64;
    let mu = frame.mu;
    let y = x_t as f64
        - (1.0 - 2.0 * mu) * t
        - frame.shocks_met as f64 * n as f64 / frame.rho;
    let drift = 2.0 * mu.powf(1.0 / 3.0) * (1.0 - mu).powf(1.0 / 3.0) * u * t.powf(2.0 / 3.0);
    (y - drift) / (-frame.sigma2 * t.powf(1.0 / 3.0))
}
