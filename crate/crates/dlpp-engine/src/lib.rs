//! Directed last passage percolation over a weight field: point-to-point and
//! line-to-point passage times, maximal-path reconstruction, and
//! transversal-band statistics.
//!
//! All passage times are computed by the standard corner-growth dynamic
//! program. Sums along a path are accumulated in path order (from the lower
//! left), so every value produced here is the exact floating-point maximum
//! over path-ordered sums; independent computations of the same quantity
//! agree bit for bit, which downstream equivalence checks rely on.

use lattice_core::{weight_at, LatticePoint, PeriodVector, WeightField};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DlppError {
    #[error("endpoint is not reachable (start must be ≤ end componentwise)")]
    Unreachable,
    #[error("no feasible boundary corner in the given window")]
    EmptyCornerWindow,
}

/// Staircase boundary generated from a TASEP initial condition. Its
/// lower-left corners seed line-to-point passage times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPath {
    /// Periodic step initial data on a ring of `l` sites with `n` particles:
    /// corners (1, 1) + i·(l−n, −n).
    PeriodicStep { n: i64, l: i64 },
    /// Flat initial data with density 1/d: corners ((1−d)i + d(n+1), i).
    Flat { n: i64, d: i64 },
}

impl BoundaryPath {
    /// Initial particle positions generating this boundary.
    pub fn initial_position(&self, j: i64) -> i64 {
        match *self {
            BoundaryPath::PeriodicStep { n, l } => {
                // x_{j+kn}(0) = −n + j + k·l for j in 1..=n.
                let k = (j - 1).div_euclid(n);
                -n + (j - k * n) + k * l
            }
            BoundaryPath::Flat { d, .. } => j * d,
        }
    }

    /// Lower-left corner i of the staircase.
    pub fn corner(&self, i: i64) -> LatticePoint {
        match *self {
            BoundaryPath::PeriodicStep { n, l } => {
                LatticePoint::new(1 + i * (l - n), 1 - i * n)
            }
            BoundaryPath::Flat { n, d } => {
                LatticePoint::new((1 - d) * i + d * (n + 1), i)
            }
        }
    }

    /// Leftmost column of the allowed region in row `x2`. A point is on or
    /// above the boundary iff it dominates (i + x_{N+1−i}(0), i) for some i,
    /// and the binding generator for a row is the one in that row.
    pub fn min_x1_allowed(&self, x2: i64) -> i64 {
        let n = match *self {
            BoundaryPath::PeriodicStep { n, .. } => n,
            BoundaryPath::Flat { n, .. } => n,
        };
        x2 + self.initial_position(n + 1 - x2)
    }

    /// Whether `p` lies on the boundary or in the region above/right of it.
    pub fn allows(&self, p: LatticePoint) -> bool {
        p.x1 >= self.min_x1_allowed(p.x2)
    }

    /// Inclusive range of corner indices with corner(i) ≤ q, or None.
    pub fn feasible_corners(&self, q: LatticePoint) -> Option<(i64, i64)> {
        let (lo, hi) = match *self {
            BoundaryPath::PeriodicStep { n, l } => {
                (ceil_div(1 - q.x2, n), floor_div(q.x1 - 1, l - n))
            }
            BoundaryPath::Flat { n, d } => {
                (ceil_div(d * (n + 1) - q.x1, d - 1), q.x2)
            }
        };
        (lo <= hi).then_some((lo, hi))
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    // b > 0 in all call sites.
    a.div_euclid(b) + (a.rem_euclid(b) != 0) as i64
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// Point-to-point last passage time over up/right paths from `p` to `q`,
/// weights at both endpoints included. O(area) time, one rolling row of
/// memory.
pub fn last_passage(
    field: &WeightField,
    p: LatticePoint,
    q: LatticePoint,
) -> Result<f64, DlppError> {
    if !p.dominated_by(q) {
        return Err(DlppError::Unreachable);
    }
    let width = (q.x1 - p.x1 + 1) as usize;
    let mut row = vec![0f64; width];
    for x2 in p.x2..=q.x2 {
        for j in 0..width {
            let w = weight_at(field, LatticePoint::new(p.x1 + j as i64, x2));
            let left = if j > 0 { row[j - 1] } else { f64::NEG_INFINITY };
            let down = if x2 > p.x2 { row[j] } else { f64::NEG_INFINITY };
            let best = left.max(down);
            row[j] = if best == f64::NEG_INFINITY { w } else { w + best };
        }
    }
    Ok(row[width - 1])
}

/// Reference implementation: exhaustive enumeration of every monotone path,
/// with sums accumulated in path order exactly as the dynamic program does.
/// Exponential; for small-grid oracle tests only.
pub fn exhaustive_last_passage(
    field: &WeightField,
    p: LatticePoint,
    q: LatticePoint,
) -> Result<f64, DlppError> {
    if !p.dominated_by(q) {
        return Err(DlppError::Unreachable);
    }
    fn dfs(field: &WeightField, r: LatticePoint, q: LatticePoint, acc: f64, best: &mut f64) {
        let acc = acc + weight_at(field, r);
        if r == q {
            *best = best.max(acc);
            return;
        }
        if r.x1 < q.x1 {
            dfs(field, r + LatticePoint::new(1, 0), q, acc, best);
        }
        if r.x2 < q.x2 {
            dfs(field, r + LatticePoint::new(0, 1), q, acc, best);
        }
    }
    let mut best = f64::NEG_INFINITY;
    dfs(field, p, q, 0.0, &mut best);
    Ok(best)
}

/// A maximal up/right path with its total weight.
#[derive(Debug, Clone)]
pub struct MaximalPath {
    pub points: Vec<LatticePoint>,
    pub total_weight: f64,
}

/// Reconstruct a maximal path from `p` to `q` by backtracking, preferring
/// the vertical predecessor on ties so the result is deterministic.
pub fn reconstruct_path(
    field: &WeightField,
    p: LatticePoint,
    q: LatticePoint,
) -> Result<MaximalPath, DlppError> {
    if !p.dominated_by(q) {
        return Err(DlppError::Unreachable);
    }
    let width = (q.x1 - p.x1 + 1) as usize;
    let height = (q.x2 - p.x2 + 1) as usize;
    // One bit per cell: true if the vertical predecessor was chosen.
    let mut from_below = vec![false; width * height];
    let mut row = vec![0f64; width];
    for i in 0..height {
        for j in 0..width {
            let w = weight_at(
                field,
                LatticePoint::new(p.x1 + j as i64, p.x2 + i as i64),
            );
            let left = if j > 0 { row[j - 1] } else { f64::NEG_INFINITY };
            let down = if i > 0 { row[j] } else { f64::NEG_INFINITY };
            from_below[i * width + j] = down >= left;
            let best = left.max(down);
            row[j] = if best == f64::NEG_INFINITY { w } else { w + best };
        }
    }
    let total_weight = row[width - 1];

    let mut points = Vec::with_capacity(width + height - 1);
    let (mut i, mut j) = (height - 1, width - 1);
    loop {
        points.push(LatticePoint::new(p.x1 + j as i64, p.x2 + i as i64));
        if i == 0 && j == 0 {
            break;
        }
        if j == 0 || (i > 0 && from_below[i * width + j]) {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    points.reverse();
    Ok(MaximalPath {
        points,
        total_weight,
    })
}

/// Line-to-point last passage time from the boundary `Λ` to `q`, as a
/// maximum over lower-left corners (every boundary point dominates a corner,
/// so corners suffice). Returns the value and the maximizing corner index,
/// with smallest-|i| tie-breaking. `window` restricts the corner indices;
/// by default all feasible corners are used.
pub fn last_passage_from_boundary(
    field: &WeightField,
    boundary: &BoundaryPath,
    q: LatticePoint,
    window: Option<(i64, i64)>,
) -> Result<(f64, i64), DlppError> {
    let (flo, fhi) = boundary.feasible_corners(q).ok_or(DlppError::EmptyCornerWindow)?;
    let (lo, hi) = match window {
        Some((wlo, whi)) => (wlo.max(flo), whi.min(fhi)),
        None => (flo, fhi),
    };
    if lo > hi {
        return Err(DlppError::EmptyCornerWindow);
    }

    // A window that truncates the feasible range must honor it exactly:
    // evaluate each requested corner by its own forward program.
    if (lo, hi) != (flo, fhi) {
        let mut best = f64::NEG_INFINITY;
        let mut best_i = lo;
        for i in lo..=hi {
            let val = last_passage(field, boundary.corner(i), q)?;
            if val > best || (val == best && i.abs() < best_i.abs()) {
                best = val;
                best_i = i;
            }
        }
        return Ok((best, best_i));
    }

    // Full feasible range: the forward boundary sweep gives the corner
    // maximum with sums accumulated in path order, bit-identical to
    // max_i last_passage(corner(i), q).
    let (base, vals) = boundary_values_on_row(field, boundary, q.x2, q.x1)?;
    debug_assert_eq!(base + vals.len() as i64 - 1, q.x1);
    let value = *vals.last().expect("nonempty row");

    // One reverse dynamic program from q covers every corner at once:
    // rev(p) = w(p) + max over up/right successors, so rev(corner) is the
    // point-to-point passage time corner → q (up to summation order, which
    // only matters for exact ties). It supplies the argmax.
    let mut x1min = q.x1;
    let mut x2min = q.x2;
    for i in lo..=hi {
        let c = boundary.corner(i);
        x1min = x1min.min(c.x1);
        x2min = x2min.min(c.x2);
    }
    let width = (q.x1 - x1min + 1) as usize;
    let mut row = vec![0f64; width];
    let mut best = f64::NEG_INFINITY;
    let mut best_i = lo;
    for x2 in (x2min..=q.x2).rev() {
        for j in (0..width).rev() {
            let w = weight_at(field, LatticePoint::new(x1min + j as i64, x2));
            let right = if j + 1 < width { row[j + 1] } else { f64::NEG_INFINITY };
            let up = if x2 < q.x2 { row[j] } else { f64::NEG_INFINITY };
            let next = right.max(up);
            row[j] = if next == f64::NEG_INFINITY { w } else { w + next };
        }
        for i in lo..=hi {
            let c = boundary.corner(i);
            if c.x2 == x2 {
                let val = row[(c.x1 - x1min) as usize];
                if val > best || (val == best && i.abs() < best_i.abs()) {
                    best = val;
                    best_i = i;
                }
            }
        }
    }
    Ok((value, best_i))
}

/// Line-to-point passage times G_Λ((x1, row)) for every x1 in
/// [min_x1_allowed(row), x1_max], via one forward sweep seeded on the
/// boundary. Returns the first column and the values.
///
/// The recursion floors every cell at 0 before adding its weight, which is
/// equivalent to seeding paths at corners (any allowed predecessor already
/// carries a nonnegative value) and matches the tandem service-time
/// recursion bit for bit.
pub fn boundary_values_on_row(
    field: &WeightField,
    boundary: &BoundaryPath,
    row_x2: i64,
    x1_max: i64,
) -> Result<(i64, Vec<f64>), DlppError> {
    let base = boundary.min_x1_allowed(row_x2);
    if base > x1_max {
        return Err(DlppError::EmptyCornerWindow);
    }
    // Lowest row whose allowed region intersects the column range; below it
    // no allowed cell can reach the target row without moving left.
    let mut bottom = row_x2;
    while boundary.min_x1_allowed(bottom - 1) <= x1_max {
        bottom -= 1;
    }
    let width = (x1_max - base + 1) as usize;
    let mut prev = vec![f64::NEG_INFINITY; width];
    let mut cur = vec![f64::NEG_INFINITY; width];
    for x2 in bottom..=row_x2 {
        let start = boundary.min_x1_allowed(x2).max(base);
        for x1 in start..=x1_max {
            let j = (x1 - base) as usize;
            let w = weight_at(field, LatticePoint::new(x1, x2));
            let left = if x1 > start { cur[j - 1] } else { f64::NEG_INFINITY };
            cur[j] = w + left.max(prev[j]).max(0.0);
        }
        std::mem::swap(&mut prev, &mut cur);
        cur[..].fill(f64::NEG_INFINITY);
    }
    Ok((base, prev))
}

/// Maximal deviation of a path from the straight segment p̄q̄ and whether it
/// leaves the band of half-width y·|q−p|^{2/3}.
pub fn band_exit_statistics(
    path: &MaximalPath,
    p: LatticePoint,
    q: LatticePoint,
    y: f64,
) -> (f64, bool) {
    let max_deviation = path
        .points
        .iter()
        .map(|&r| point_segment_distance(r, p, q))
        .fold(0f64, f64::max);
    let threshold = y * (q - p).norm().powf(2.0 / 3.0);
    (max_deviation, max_deviation > threshold)
}

/// Euclidean distance from `r` to the segment p̄q̄.
pub fn point_segment_distance(r: LatticePoint, p: LatticePoint, q: LatticePoint) -> f64 {
    let (dx, dy) = ((q.x1 - p.x1) as f64, (q.x2 - p.x2) as f64);
    let (rx, ry) = ((r.x1 - p.x1) as f64, (r.x2 - p.x2) as f64);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return (rx * rx + ry * ry).sqrt();
    }
    let t = ((rx * dx + ry * dy) / len2).clamp(0.0, 1.0);
    let (ex, ey) = (rx - t * dx, ry - t * dy);
    (ex * ex + ey * ey).sqrt()
}

/// Quadrangle inequality for passage times from two ordered sources to two
/// ordered targets: with c_b southeast of c_a (e.g. c_b = c_a + v) and q+v
/// southeast of q,
///     G_{c_a}(q) + G_{c_b}(q+v) ≥ G_{c_a}(q+v) + G_{c_b}(q)
/// must hold on every realization (crossing-path exchange argument).
///
/// The inequality is exact over the reals, but when maximal paths coalesce
/// the two sides are equal and their independently rounded f64 sums differ
/// by a few ulps; the comparison therefore allows a 1e-9 relative slack,
/// far below any genuine violation (which would be O(1)).
pub fn quadrangle_check(
    field: &WeightField,
    c_a: LatticePoint,
    c_b: LatticePoint,
    q: LatticePoint,
    v: PeriodVector,
) -> Result<bool, DlppError> {
    let qv = q + v.as_point();
    let g_aq = last_passage(field, c_a, q)?;
    let g_aqv = last_passage(field, c_a, qv)?;
    let g_bq = last_passage(field, c_b, q)?;
    let g_bqv = last_passage(field, c_b, qv)?;
    let (lhs, rhs) = (g_aq + g_bqv, g_aqv + g_bq);
    Ok(lhs >= rhs - 1e-9 * rhs.abs().max(1.0))
}
