//! Shared lattice geometry, the deterministic exponential weight field, and
//! the law-of-large-numbers constants for directed last passage percolation.
//!
//! The weight field is a pure function of `(seed, x1, x2)`: every site of ℤ²
//! carries an Exp(1) value produced by a counter-based mixing function, so
//! unbounded domains can be evaluated lazily and two fields sharing a seed are
//! coupled sample by sample. The periodic variant canonicalizes each query
//! into a fundamental domain before hashing, which makes `w(p) = w(p + v)`
//! hold exactly.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("axis is parallel to the period vector")]
    DegenerateAxis,
    #[error("period vector must satisfy v2 < 0 < v1, got ({0}, {1})")]
    InvalidPeriod(i64, i64),
    #[error("coordinate must be positive, got ({0}, {1})")]
    NonpositiveCoordinate(i64, i64),
    #[error("cone slopes must satisfy 0 < c1 < c2")]
    InvalidCone,
}

/// A point of ℤ² with the componentwise partial order used by path
/// operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub x1: i64,
    pub x2: i64,
}

impl LatticePoint {
    pub const fn new(x1: i64, x2: i64) -> Self {
        Self { x1, x2 }
    }

    /// Componentwise partial order: `self` ≤ `q` in both coordinates.
    pub fn dominated_by(&self, q: LatticePoint) -> bool {
        self.x1 <= q.x1 && self.x2 <= q.x2
    }

    /// Cross product `self.x1 * q.x2 - self.x2 * q.x1`, exact in i128.
    pub fn cross(&self, q: LatticePoint) -> i128 {
        self.x1 as i128 * q.x2 as i128 - self.x2 as i128 * q.x1 as i128
    }

    pub fn norm(&self) -> f64 {
        ((self.x1 as f64).powi(2) + (self.x2 as f64).powi(2)).sqrt()
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint::new(-self.x1, -self.x2)
    }
}

impl Mul<LatticePoint> for i64 {
    type Output = LatticePoint;
    fn mul(self, p: LatticePoint) -> LatticePoint {
        LatticePoint::new(self * p.x1, self * p.x2)
    }
}

/// Period vector of a periodic weight field; the model requires v2 < 0 < v1.
/// TASEP-derived instances use v = (L−N, −N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PeriodVector {
    v1: i64,
    v2: i64,
}

impl PeriodVector {
    pub fn new(v1: i64, v2: i64) -> Result<Self, LatticeError> {
        if v2 < 0 && v1 > 0 {
            Ok(Self { v1, v2 })
        } else {
            Err(LatticeError::InvalidPeriod(v1, v2))
        }
    }

    /// Period vector for a ring of L sites carrying N particles.
    pub fn for_ring(n: i64, l: i64) -> Result<Self, LatticeError> {
        if n >= 1 && n < l {
            Self::new(l - n, -n)
        } else {
            Err(LatticeError::InvalidPeriod(l - n, -n))
        }
    }

    pub fn v1(&self) -> i64 {
        self.v1
    }

    pub fn v2(&self) -> i64 {
        self.v2
    }

    pub fn as_point(&self) -> LatticePoint {
        LatticePoint::new(self.v1, self.v2)
    }

    pub fn norm(&self) -> f64 {
        self.as_point().norm()
    }
}

/// Open cone `c1 < x2/x1 < c2` in the positive quadrant.
#[derive(Debug, Clone, Copy)]
pub struct Cone {
    c1: f64,
    c2: f64,
}

impl Cone {
    pub fn new(c1: f64, c2: f64) -> Result<Self, LatticeError> {
        if c1 > 0.0 && c1 < c2 {
            Ok(Self { c1, c2 })
        } else {
            Err(LatticeError::InvalidCone)
        }
    }

    pub fn contains(&self, q: LatticePoint) -> bool {
        // Slope comparisons done multiplicatively to avoid dividing by x1.
        q.x1 > 0
            && q.x2 > 0
            && self.c1 * (q.x1 as f64) < q.x2 as f64
            && (q.x2 as f64) < self.c2 * q.x1 as f64
    }
}

/// Reduce `p` modulo the lattice line ℤ·v so that, writing `p = x·v + y·axis`
/// over the reals, the canonical representative has x ∈ (−1/2, 1/2]. Returns
/// the representative and the integer shift with `canonical = p − shift·v`.
///
/// The half-open boundary is decided in exact integer arithmetic: with
/// a = cross(p, axis) and b = cross(v, axis) > 0, the shift is the unique n
/// with −b < 2a − 2nb ≤ b, i.e. n = ⌈(2a − b) / (2b)⌉.
pub fn canonicalize(
    p: LatticePoint,
    v: PeriodVector,
    axis: LatticePoint,
) -> Result<(LatticePoint, i64), LatticeError> {
    let b = v.as_point().cross(axis);
    if b == 0 {
        return Err(LatticeError::DegenerateAxis);
    }
    let a = p.cross(axis);
    let (a, b) = if b > 0 { (a, b) } else { (-a, -b) };
    let n = div_ceil_i128(2 * a - b, 2 * b);
    let n64 = n as i64;
    Ok((p - n64 * v.as_point(), n64))
}

fn div_ceil_i128(a: i128, b: i128) -> i128 {
    // b > 0 by construction above.
    let q = a.div_euclid(b);
    if a.rem_euclid(b) == 0 {
        q
    } else {
        q + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldMode {
    Iid,
    Periodic { v: PeriodVector, axis: LatticePoint },
}

/// Deterministic coordinate-keyed Exp(1) random field.
#[derive(Debug, Clone, Copy)]
pub struct WeightField {
    seed: u64,
    mode: FieldMode,
}

impl WeightField {
    pub fn iid(seed: u64) -> Self {
        Self {
            seed,
            mode: FieldMode::Iid,
        }
    }

    /// Periodic field `w(p) = w(p + v)`, realized by canonicalizing each
    /// query into the fundamental domain spanned by `axis` before hashing.
    /// Sharing a seed with an iid field couples the two sample by sample.
    pub fn periodic(
        seed: u64,
        v: PeriodVector,
        axis: LatticePoint,
    ) -> Result<Self, LatticeError> {
        // Reject a degenerate axis up front so lookups cannot fail.
        canonicalize(LatticePoint::new(0, 0), v, axis)?;
        Ok(Self {
            seed,
            mode: FieldMode::Periodic { v, axis },
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }
}

/// Exp(1) weight at `p`; deterministic per (seed, canonical point).
pub fn weight_at(field: &WeightField, p: LatticePoint) -> f64 {
    let p = match field.mode {
        FieldMode::Iid => p,
        FieldMode::Periodic { v, axis } => {
            canonicalize(p, v, axis).expect("axis validated at construction").0
        }
    };
    exp_unit(counter_hash(field.seed, p.x1, p.x2))
}

/// SplitMix64 finalizer; full-avalanche mixing of one 64-bit word.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Counter-based PRF of (seed, x1, x2): three chained SplitMix64 rounds.
/// The seed is mixed before any coordinate is folded in and coordinates are
/// spread by an odd multiplier before the XOR, so distinct (seed, point)
/// keys cannot collide by mere addition (e.g. seed+1 with x1−1), which
/// would make whole fields translates of each other.
#[inline]
pub fn counter_hash(seed: u64, x1: i64, x2: i64) -> u64 {
    let h = mix64(seed.wrapping_add(GAMMA));
    let h = mix64(h ^ (x1 as u64).wrapping_mul(GAMMA));
    mix64(h ^ (x2 as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f))
}

/// Map a hash to Exp(1) by inverse CDF; u ∈ [0,1) excludes 1, so the result
/// is finite.
#[inline]
pub fn exp_unit(h: u64) -> f64 {
    let u = (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    -(-u).ln_1p()
}

/// Derived seed for replica `i`; extending the replica set never reshuffles
/// earlier replicas.
pub fn replica_seed(master: u64, i: u64) -> u64 {
    mix64(master.wrapping_add(GAMMA.wrapping_mul(i.wrapping_add(1))))
}

/// Law-of-large-numbers constant d(q) = (√q1 + √q2)².
pub fn d_constant(q: LatticePoint) -> Result<f64, LatticeError> {
    check_positive(q)?;
    let (a, b) = ((q.x1 as f64).sqrt(), (q.x2 as f64).sqrt());
    Ok((a + b).powi(2))
}

/// Fluctuation constant s(q) = (q1·q2)^{−1/6} (√q1 + √q2)^{4/3}.
pub fn s_constant(q: LatticePoint) -> Result<f64, LatticeError> {
    check_positive(q)?;
    let (a, b) = ((q.x1 as f64).sqrt(), (q.x2 as f64).sqrt());
    Ok((q.x1 as f64 * q.x2 as f64).powf(-1.0 / 6.0) * (a + b).powf(4.0 / 3.0))
}

fn check_positive(q: LatticePoint) -> Result<(), LatticeError> {
    if q.x1 >= 1 && q.x2 >= 1 {
        Ok(())
    } else {
        Err(LatticeError::NonpositiveCoordinate(q.x1, q.x2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_and_s_closed_forms() {
        let q = LatticePoint::new(1, 1);
        assert_eq!(d_constant(q).unwrap(), 4.0);
        assert!((s_constant(q).unwrap() - 2f64.powf(4.0 / 3.0)).abs() < 1e-14);

        let q = LatticePoint::new(4, 1);
        assert_eq!(d_constant(q).unwrap(), 9.0);
        let expect = 4f64.powf(-1.0 / 6.0) * 3f64.powf(4.0 / 3.0);
        assert!((s_constant(q).unwrap() - expect).abs() < 1e-14);

        for n in [2i64, 17, 500] {
            let q = LatticePoint::new(n, n);
            assert!((d_constant(q).unwrap() - 4.0 * n as f64).abs() < 1e-9);
            let expect = 2f64.powf(4.0 / 3.0) * (n as f64).powf(1.0 / 3.0);
            assert!((s_constant(q).unwrap() - expect).abs() < 1e-9 * expect);
        }

        assert!(d_constant(LatticePoint::new(0, 3)).is_err());
    }

    #[test]
    fn canonicalize_identity_and_period() {
        let v = PeriodVector::new(2, -1).unwrap();
        let axis = LatticePoint::new(3, 2);
        let origin = LatticePoint::new(0, 0);
        assert_eq!(canonicalize(origin, v, axis).unwrap(), (origin, 0));
        // p = v has x-coefficient exactly 1, outside (−1/2, 1/2].
        assert_eq!(
            canonicalize(v.as_point(), v, axis).unwrap(),
            (origin, 1)
        );
        // Degenerate axis rejected.
        assert_eq!(
            canonicalize(origin, v, LatticePoint::new(-4, 2)),
            Err(LatticeError::DegenerateAxis)
        );
    }

    #[test]
    fn cone_membership() {
        let cone = Cone::new(0.5, 2.0).unwrap();
        assert!(cone.contains(LatticePoint::new(3, 4)));
        assert!(!cone.contains(LatticePoint::new(1, 2))); // boundary slope
        assert!(!cone.contains(LatticePoint::new(-1, 1)));
        assert!(Cone::new(2.0, 1.0).is_err());
    }
}
