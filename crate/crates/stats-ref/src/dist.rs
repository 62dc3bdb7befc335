//! Empirical distributions, Kolmogorov-Smirnov distances, and the reference
//! laws used by the experiments.

use crate::painleve::{tw_tables, TABLE_HI, TABLE_LO};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empirical sample is empty or contains non-finite values")]
    BadSample,
    #[error("table must have at least two strictly increasing abscissae")]
    BadTable,
    #[error("scale parameter must be positive and finite, got {0}")]
    BadScale(f64),
}

/// Sorted sample with distribution-level queries.
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self, StatsError> {
        if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::BadSample);
        }
        samples.sort_by(|a, b| a.total_cmp(b));
        Ok(EmpiricalDistribution { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.sorted.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
            / (self.sorted.len() - 1).max(1) as f64
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.sorted.partition_point(|v| *v <= x);
        idx as f64 / self.sorted.len() as f64
    }

    /// Two-sided Kolmogorov-Smirnov distance against a reference law.
    pub fn ks_distance(&self, reference: &ReferenceCdf) -> f64 {
        let n = self.sorted.len() as f64;
        let mut d = 0.0f64;
        for (i, &x) in self.sorted.iter().enumerate() {
            let f = reference.eval(x);
            d = d.max((f - i as f64 / n).abs());
            d = d.max((f - (i as f64 + 1.0) / n).abs());
        }
        d
    }
}

/// Table-backed CDF with monotone (Fritsch-Carlson) cubic interpolation.
pub struct CdfTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
    slopes: Vec<f64>,
}

impl CdfTable {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self, StatsError> {
        if xs.len() < 2 || xs.len() != fs.len() {
            return Err(StatsError::BadTable);
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(StatsError::BadTable);
        }
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (fs[i + 1] - fs[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            if secants[i - 1] * secants[i] > 0.0 {
                // Harmonic mean keeps the interpolant monotone.
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                slopes[i] = (w1 + w2) / (w1 / secants[i - 1] + w2 / secants[i]);
            }
        }
        // Clamp endpoint-adjacent slopes to the monotonicity region.
        for i in 0..n - 1 {
            if secants[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
            } else {
                let a = slopes[i] / secants[i];
                let b = slopes[i + 1] / secants[i];
                let r = (a * a + b * b).sqrt();
                if r > 3.0 {
                    slopes[i] *= 3.0 / r;
                    slopes[i + 1] *= 3.0 / r;
                }
            }
        }
        Ok(CdfTable { xs, fs, slopes })
    }

    /// Interpolated value, clamped to [0, 1]; constant extension outside.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.fs[0].clamp(0.0, 1.0);
        }
        if x >= self.xs[n - 1] {
            return self.fs[n - 1].clamp(0.0, 1.0);
        }
        let hi = self.xs.partition_point(|v| *v <= x);
        let i = hi - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (f0, f1) = (self.fs[i], self.fs[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * m1;
        val.clamp(0.0, 1.0)
    }
}

/// Reference laws for distributional comparisons.
pub enum ReferenceCdf {
    /// GUE Tracy-Widom.
    TwGue,
    /// GOE Tracy-Widom.
    TwGoe,
    /// One-point law of the flat-geometry limit process: GOE Tracy-Widom
    /// evaluated at twice the argument.
    ScaledTwGoe,
    /// max(X1, r X2) for independent GUE Tracy-Widom X1, X2 and r > 0.
    MaxTwoTwGue { r: f64 },
    /// Unit-rate exponential scaled by `rate`.
    Exponential { rate: f64 },
    /// Arbitrary tabulated law.
    Table(CdfTable),
}

fn tw_table_eval(column: impl Fn(&'static crate::painleve::TwTables) -> &'static [f64], x: f64) -> f64 {
    let t = tw_tables();
    if x <= TABLE_LO {
        return 0.0;
    }
    if x >= TABLE_HI {
        return 1.0;
    }
    // Local cubic through the four surrounding uniform-grid rows.
    let step = crate::painleve::TABLE_STEP;
    let fs = column(t);
    let pos = (x - TABLE_LO) / step;
    let i = (pos.floor() as usize).clamp(1, fs.len() - 3);
    let u = pos - i as f64;
    let (f_m1, f_0, f_1, f_2) = (fs[i - 1], fs[i], fs[i + 1], fs[i + 2]);
    let val = f_0
        + u * (0.5 * (f_1 - f_m1)
            + u * (f_m1 - 2.5 * f_0 + 2.0 * f_1 - 0.5 * f_2
                + u * (1.5 * (f_0 - f_1) + 0.5 * (f_2 - f_m1))));
    val.clamp(0.0, 1.0)
}

/// GUE Tracy-Widom distribution function.
pub fn tw_gue_cdf(x: f64) -> f64 {
    tw_table_eval(|t| &t.f2, x)
}

/// GOE Tracy-Widom distribution function.
pub fn tw_goe_cdf(x: f64) -> f64 {
    tw_table_eval(|t| &t.f1, x)
}

impl ReferenceCdf {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ReferenceCdf::TwGue => tw_gue_cdf(x),
            ReferenceCdf::TwGoe => tw_goe_cdf(x),
            ReferenceCdf::ScaledTwGoe => tw_goe_cdf(2.0 * x),
            ReferenceCdf::MaxTwoTwGue { r } => tw_gue_cdf(x) * tw_gue_cdf(x / r),
            ReferenceCdf::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            ReferenceCdf::Table(t) => t.eval(x),
        }
    }
}

/// Limiting mixing ratio for the two-component shock law, `max(X1, r X2)`.
/// Finite shock index: the frame's closed-form ratio. If the shock index is
/// taken to infinity the ratio is 1.
pub fn shock_r(
    frame: &hydrodynamics::ScalingFrame,
    index_to_infinity: bool,
) -> Result<f64, StatsError> {
    if index_to_infinity {
        return Ok(1.0);
    }
    let r = frame.mixing_ratio().ok_or(StatsError::BadSample)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(StatsError::BadScale(r));
    }
    Ok(r)
}

/// Pearson correlations between the first sample column and every column,
/// for seed-paired samples indexed by a spatial grid. Column 0 is the base
/// point, so the first entry is 1.
pub fn covariance_decay(columns: &[Vec<f64>]) -> Result<Vec<f64>, StatsError> {
    if columns.len() < 2 {
        return Err(StatsError::BadSample);
    }
    columns
        .iter()
        .map(|c| pearson_correlation(&columns[0], c))
        .collect()
}

/// Pearson correlation of two equal-length samples.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(StatsError::BadSample);
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(StatsError::BadSample);
    }
    Ok(num / (va * vb).sqrt())
}
