//! Deterministic hydrodynamic quantities for the ring exclusion process with
//! periodic step initial data: shock times, scaling constants for the
//! one-point fluctuation limits, the entropy solution of the associated
//! Burgers equation on the unit torus, and the mean tagged-particle path.
//!
//! Space and time are rescaled by the ring period, so the density profile has
//! unit spatial period and the average density is `rho`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HydroError {
    #[error("density must lie in (0, 1), got {0}")]
    InvalidDensity(f64),
    #[error("density must lie in (0, 1/2] for shock-time formulas, got {0}")]
    DensityAboveHalf(f64),
    #[error("label fraction must lie in (0, 1], got {0}")]
    InvalidLabelFraction(f64),
    #[error("rescaled time {time} is outside the interval ({lo}, {hi})")]
    TimeOutsideInterval { time: f64, lo: f64, hi: f64 },
    #[error("shock index must be at least 1, got {0}")]
    InvalidShockIndex(i64),
    #[error("no shock exists before time {0}")]
    BeforeShockFormation(f64),
    #[error("time {0} precedes the first admissible tagged-particle window")]
    BeforeFirstWindow(f64),
    #[error("characteristic speed fraction {0} left (0, 1); parameters are degenerate")]
    DegenerateScale(f64),
}

fn check_density(rho: f64) -> Result<(), HydroError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(HydroError::InvalidDensity(rho));
    }
    Ok(())
}

fn check_label(alpha: f64) -> Result<(), HydroError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(HydroError::InvalidLabelFraction(alpha));
    }
    Ok(())
}

/// The mean time (in units of the particle count) at which the tagged
/// particle with label fraction `alpha` meets its `j`-th shock; `j = 0`
/// returns the mean time at which the particle first moves.
pub fn shock_time(rho: f64, alpha: f64, j: i64) -> Result<f64, HydroError> {
    check_density(rho)?;
    if rho > 0.5 {
        return Err(HydroError::DensityAboveHalf(rho));
    }
    check_label(alpha)?;
    if j < 0 {
        return Err(HydroError::InvalidShockIndex(j));
    }
    if j == 0 {
        return Ok(1.0 - alpha);
    }
    let jf = j as f64;
    let s = (jf - alpha + 1.0).sqrt() + (jf - alpha).sqrt();
    Ok(s * s / (4.0 * rho * rho))
}

/// The open time interval between successive shock encounters,
/// `(shock_time(j), shock_time(j + 1))`.
pub fn shock_interval(rho: f64, alpha: f64, j: i64) -> Result<(f64, f64), HydroError> {
    Ok((shock_time(rho, alpha, j)?, shock_time(rho, alpha, j + 1)?))
}

/// Shock schedule for densities above one half, where particles also
/// experience frozen periods (intervals of zero average speed).
///
/// The interval of ordinary fluctuation behaviour between shocks `j` and
/// `j + 1` is `(moving_start(j), frozen_start(j + 1))`; for small `j` these
/// leave gaps, which are the frozen times. From index `threshold` on, both
/// endpoints coincide with the plain shock times.
#[derive(Debug, Clone, Copy)]
pub struct FrozenSchedule {
    rho: f64,
    alpha: f64,
    /// Smallest shock index from which the schedule matches the low-density one.
    pub threshold: i64,
}

impl FrozenSchedule {
    pub fn new(rho: f64, alpha: f64) -> Result<Self, HydroError> {
        check_density(rho)?;
        if rho <= 0.5 {
            return Err(HydroError::InvalidDensity(rho));
        }
        check_label(alpha)?;
        let bound = rho / (1.0 - rho);
        let mut j = 1i64;
        loop {
            let jf = j as f64;
            let s = (jf - alpha).sqrt() + (jf + 1.0 - alpha).sqrt();
            if jf * s * s >= bound {
                break;
            }
            j += 1;
        }
        Ok(FrozenSchedule { rho, alpha, threshold: j })
    }

    fn plain_shock_time(&self, j: i64) -> f64 {
        let jf = j as f64;
        let s = (jf - self.alpha + 1.0).sqrt() + (jf - self.alpha).sqrt();
        s * s / (4.0 * self.rho * self.rho)
    }

    /// Start of the moving (ordinary) interval following shock `j`.
    pub fn moving_start(&self, j: i64) -> Result<f64, HydroError> {
        if j < 0 {
            return Err(HydroError::InvalidShockIndex(j));
        }
        if j < self.threshold {
            Ok(j as f64 + 1.0 - self.alpha)
        } else {
            Ok(self.plain_shock_time(j))
        }
    }

    /// Start of the frozen interval preceding shock `j`.
    pub fn frozen_start(&self, j: i64) -> Result<f64, HydroError> {
        if j < 1 {
            return Err(HydroError::InvalidShockIndex(j));
        }
        if j < self.threshold {
            let jf = j as f64;
            let s = (jf - self.alpha).sqrt() + (jf * (1.0 / self.rho - 1.0)).sqrt();
            Ok(s * s)
        } else {
            Ok(self.plain_shock_time(j))
        }
    }
}

/// Scaling constants for the tagged-particle fluctuation limits with
/// periodic step initial data.
///
/// `mu` is the local characteristic slope at the tagged particle; `kappa2`
/// and `sigma2` are the spatial and height scale factors. When the frame sits
/// exactly at a shock time the lower-density side carries its own slope
/// `mu_tilde` and the cross-side ratios `space_ratio` (spatial argument),
/// `height_ratio` (height scale), and the two-component mixing ratio `r` of
/// the limiting maximum of two independent GUE Tracy-Widom variables.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFrame {
    pub rho: f64,
    pub alpha: f64,
    pub shocks_met: i64,
    /// Rescaled time (time divided by particle count).
    pub time: f64,
    pub at_shock: bool,
    pub mu: f64,
    pub kappa2: f64,
    pub sigma2: f64,
    pub mu_tilde: Option<f64>,
    pub space_ratio: Option<f64>,
    pub height_ratio: Option<f64>,
}

fn check_slope(mu: f64) -> Result<(), HydroError> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(HydroError::DegenerateScale(mu));
    }
    Ok(())
}

impl ScalingFrame {
    /// Frame for a rescaled time strictly between two shock encounters.
    pub fn away_from_shock(rho: f64, alpha: f64, j: i64, time: f64) -> Result<Self, HydroError> {
        let (lo, hi) = shock_interval(rho, alpha, j)?;
        if !(time > lo && time < hi) {
            return Err(HydroError::TimeOutsideInterval { time, lo, hi });
        }
        let mu = ((j as f64 - alpha + 1.0) / time).sqrt();
        check_slope(mu)?;
        Ok(ScalingFrame {
            rho,
            alpha,
            shocks_met: j,
            time,
            at_shock: false,
            mu,
            kappa2: 2.0 * mu.powf(4.0 / 3.0) * (1.0 - mu).powf(1.0 / 3.0),
            sigma2: mu.powf(-1.0 / 3.0) * (1.0 - mu).powf(2.0 / 3.0),
            mu_tilde: None,
            space_ratio: None,
            height_ratio: None,
        })
    }

    /// Frame at exactly the `j`-th shock encounter time, `j >= 1`.
    pub fn at_shock(rho: f64, alpha: f64, j: i64) -> Result<Self, HydroError> {
        if j < 1 {
            return Err(HydroError::InvalidShockIndex(j));
        }
        let time = shock_time(rho, alpha, j)?;
        let mu = ((j as f64 - alpha + 1.0) / time).sqrt();
        let mu_tilde = ((j as f64 - alpha) / time).sqrt();
        check_slope(mu)?;
        check_slope(mu_tilde)?;
        let kappa2 = 2.0 * mu.powf(4.0 / 3.0) * (1.0 - mu).powf(1.0 / 3.0);
        let sigma2 = mu.powf(-1.0 / 3.0) * (1.0 - mu).powf(2.0 / 3.0);
        let space_ratio = mu_tilde.powf(4.0 / 3.0) * (1.0 - mu_tilde).powf(1.0 / 3.0)
            / (mu.powf(4.0 / 3.0) * (1.0 - mu).powf(1.0 / 3.0));
        let height_ratio = mu_tilde.powf(-1.0 / 3.0) * (1.0 - mu_tilde).powf(2.0 / 3.0)
            / (mu.powf(-1.0 / 3.0) * (1.0 - mu).powf(2.0 / 3.0));
        Ok(ScalingFrame {
            rho,
            alpha,
            shocks_met: j,
            time,
            at_shock: true,
            mu,
            kappa2,
            sigma2,
            mu_tilde: Some(mu_tilde),
            space_ratio: Some(space_ratio),
            height_ratio: Some(height_ratio),
        })
    }

    /// Mixing ratio for the at-shock limit law `max(X1, r * X2)` with
    /// independent GUE Tracy-Widom components, written in the algebraically
    /// equivalent closed form used for reference checks.
    pub fn mixing_ratio(&self) -> Option<f64> {
        if !self.at_shock {
            return None;
        }
        let j = self.shocks_met as f64;
        let a = self.alpha;
        let s = self.time;
        let front = ((j - a) / (j - a + 1.0)).powf(-1.0 / 6.0);
        let back = ((s.sqrt() - (j - a).sqrt()) / (s.sqrt() - (j - a + 1.0).sqrt())).powf(2.0 / 3.0);
        Some(front * back)
    }
}

/// Spatial and height scale factors for the flat initial condition of
/// density `rho`: the process-time spatial factor and the height factor
/// in front of the cube-root fluctuation scale.
pub fn flat_scales(rho: f64) -> Result<(f64, f64), HydroError> {
    check_density(rho)?;
    let kappa1 = 2.0f64.powf(5.0 / 3.0) * rho.powf(4.0 / 3.0) * (1.0 - rho).powf(1.0 / 3.0);
    let sigma1 = 2.0f64.powf(1.0 / 3.0) * rho.powf(-1.0 / 3.0) * (1.0 - rho).powf(2.0 / 3.0);
    Ok((kappa1, sigma1))
}

/// Position of the density shock at rescaled time `t >= 1/(4 rho)`, together
/// with the size of the downward density jump across it. The position is the
/// representative in `(-1/2 - ..., ...)` given by the linear trajectory of
/// slope `1 - 2 rho`; reduce mod 1 for a torus coordinate.
pub fn shock_trajectory(rho: f64, t: f64) -> Result<(f64, f64), HydroError> {
    check_density(rho)?;
    if rho > 0.5 {
        return Err(HydroError::DensityAboveHalf(rho));
    }
    if t < 1.0 / (4.0 * rho) {
        return Err(HydroError::BeforeShockFormation(t));
    }
    Ok((-0.5 + (1.0 - 2.0 * rho) * t, 1.0 / (2.0 * t)))
}

/// Entropy solution of the Burgers equation on the unit torus with initial
/// density one on a block of length `rho` ending at each integer and zero
/// elsewhere. `x` may be any real number; the profile has spatial period one.
pub fn burgers_density(rho: f64, t: f64, x: f64) -> Result<f64, HydroError> {
    check_density(rho)?;
    if rho > 0.5 {
        return Err(HydroError::DensityAboveHalf(rho));
    }
    if t < 0.0 {
        return Err(HydroError::TimeOutsideInterval { time: t, lo: 0.0, hi: f64::INFINITY });
    }
    if t == 0.0 {
        let y = -((-x).rem_euclid(1.0)); // representative in (-1, 0]
        return Ok(if y >= -rho { 1.0 } else { 0.0 });
    }
    let ramp = |x: f64| 0.5 - x / (2.0 * t);
    if t <= rho {
        // block still present; rarefaction fan opens at the block's right edge
        let y = -rho + (x + rho).rem_euclid(1.0); // representative in [-rho, 1-rho)
        Ok(if y <= -t {
            1.0
        } else if y < t {
            ramp(y)
        } else {
            0.0
        })
    } else if t < 1.0 / (4.0 * rho) {
        // fan has consumed the block but not yet the vacant stretch
        let a = t - 2.0 * (rho * t).sqrt();
        let y = a + (x - a).rem_euclid(1.0); // representative in [a, a+1)
        Ok(if y <= t { ramp(y) } else { 0.0 })
    } else {
        // single sawtooth: linear ramp with one shock per period
        let a = -0.5 + (1.0 - 2.0 * rho) * t;
        let y = a + (x - a).rem_euclid(1.0);
        Ok(ramp(y))
    }
}

/// Mean trajectory of the tagged particle with label fraction `alpha`,
/// in ring-period units of space and time. Valid from the first admissible
/// window onward (the particle has met at least one shock).
pub fn tagged_particle_location(rho: f64, alpha: f64, t: f64) -> Result<f64, HydroError> {
    check_density(rho)?;
    if rho > 0.5 {
        return Err(HydroError::DensityAboveHalf(rho));
    }
    check_label(alpha)?;
    let window_start = |k: f64| {
        let s = (k - alpha).sqrt() + (k + 1.0 - alpha).sqrt();
        s * s / (4.0 * rho)
    };
    if t < window_start(1.0) {
        return Err(HydroError::BeforeFirstWindow(t));
    }
    let mut k = 1.0f64;
    while t >= window_start(k + 1.0) {
        k += 1.0;
    }
    let start = -rho * (1.0 - alpha);
    Ok(t * (1.0 - rho) + ((t * rho).sqrt() - (k + 1.0 - alpha).sqrt()).powi(2)
        - (1.0 - rho) * (1.0 - alpha)
        + start)
}

/// Initial position of the tagged particle with label fraction `alpha` in
/// ring-period units.
pub fn tagged_particle_start(rho: f64, alpha: f64) -> Result<f64, HydroError> {
    check_density(rho)?;
    check_label(alpha)?;
    Ok(-rho * (1.0 - alpha))
}

/// Writes `x,density` rows (header included) sampling one spatial period of
/// the density profile on `bins` uniform cells, evaluated at cell centers.
pub fn density_profile_csv(
    rho: f64,
    t: f64,
    bins: usize,
    out: &mut dyn std::io::Write,
) -> Result<(), Box<dyn std::error::Error>> {
    writeln!(out, "x,density")?;
    for b in 0..bins {
        let x = (b as f64 + 0.5) / bins as f64;
        let q = burgers_density(rho, t, x)?;
        writeln!(out, "{x:.17e},{q:.17e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shock_times_increase() {
        let mut prev = shock_time(1.0 / 3.0, 0.5, 0).unwrap();
        for j in 1..40 {
            let s = shock_time(1.0 / 3.0, 0.5, j).unwrap();
            assert!(s > prev, "j={j}");
            prev = s;
        }
    }

    #[test]
    fn first_shock_value() {
        // rho = 1/2, alpha = 1: s_1 = (1 + 0)^2 / 1 = 1.
        assert!((shock_time(0.5, 1.0, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_shock_frame_rejected() {
        // rho = 1/2, alpha = 1, j = 1 gives slope exactly 1.
        assert!(matches!(
            ScalingFrame::at_shock(0.5, 1.0, 1),
            Err(HydroError::DegenerateScale(_))
        ));
    }

    #[test]
    fn frame_slope_in_unit_interval_across_intervals() {
        for j in 0..6 {
            let (lo, hi) = shock_interval(1.0 / 3.0, 0.5, j).unwrap();
            for f in [0.1, 0.5, 0.9] {
                let t = lo + f * (hi - lo);
                let fr = ScalingFrame::away_from_shock(1.0 / 3.0, 0.5, j, t).unwrap();
                assert!(fr.mu > 0.0 && fr.mu < 1.0);
                assert!(fr.kappa2 > 0.0 && fr.sigma2 > 0.0);
            }
        }
    }

    #[test]
    fn shock_frame_ratios() {
        let fr = ScalingFrame::at_shock(1.0 / 3.0, 0.5, 1).unwrap();
        let mu_t = fr.mu_tilde.unwrap();
        assert!(mu_t < fr.mu);
        let q = fr.space_ratio.unwrap();
        let r_ratio = fr.height_ratio.unwrap();
        assert!(q > 0.0 && q <= 1.0);
        assert!(r_ratio > 0.0);
        // Closed-form mixing ratio agrees with the height-scale ratio at the
        // shock time itself.
        let s = fr.time;
        assert!(s > 0.0);
        let r = fr.mixing_ratio().unwrap();
        assert!((r - r_ratio).abs() <= 1e-9 * r_ratio, "r={r} R={r_ratio}");
    }

    #[test]
    fn mixing_ratio_tends_to_one() {
        let fr = ScalingFrame::at_shock(1.0 / 3.0, 0.5, 1000).unwrap();
        assert!((fr.mixing_ratio().unwrap() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn frozen_schedule_basic() {
        let sched = FrozenSchedule::new(0.8, 0.5).unwrap();
        assert!(sched.threshold >= 1);
        for j in 1..sched.threshold {
            // Frozen gap: schedule pauses before each early shock.
            assert!(sched.frozen_start(j).unwrap() < sched.moving_start(j).unwrap());
        }
        let j = sched.threshold;
        let plain = sched.plain_shock_time(j);
        assert_eq!(sched.moving_start(j).unwrap(), plain);
        assert_eq!(sched.frozen_start(j).unwrap(), plain);
    }
}
