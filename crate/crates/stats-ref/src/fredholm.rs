//! Independent oracle for the Tracy-Widom distribution functions: Fredholm
//! determinants discretized by Nystrom quadrature.
//!
//! F2(s) is the determinant of I minus the Airy kernel on (s, inf); F1(s) is
//! the determinant of I minus the kernel (x, y) -> Ai((x+y)/2) / 2 on the
//! same interval. Gauss-Legendre nodes on a truncated interval suffice
//! because both kernels decay superexponentially.

use crate::airy::{airy_pair, airy_ai};

/// Gauss-Legendre nodes and weights on [a, b], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess for the i-th root of P_n.
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (mut p0, mut p1) = (1.0f64, t);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let step = p1 / dp;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, t);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
        nodes[n - 1 - i] = 0.5 * (a + b) + 0.5 * (b - a) * t;
        weights[n - 1 - i] = (b - a) / ((1.0 - t * t) * dp * dp);
    }
    (nodes, weights)
}

/// Determinant by LU factorization with partial pivoting; consumes `a`.
fn determinant(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0f64;
    for col in 0..n {
        let mut pivot = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[pivot * n + col].abs() {
                pivot = r;
            }
        }
        if pivot != col {
            for c in 0..n {
                a.swap(col * n + c, pivot * n + c);
            }
            det = -det;
        }
        let d = a[col * n + col];
        if d == 0.0 {
            return 0.0;
        }
        det *= d;
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
        }
    }
    det
}

fn nystrom_det(kernel: &dyn Fn(f64, f64) -> f64, s: f64, n: usize) -> f64 {
    let upper = s.max(0.0) + 13.0;
    let (nodes, weights) = gauss_legendre(n, s, upper);
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            a[i * n + j] = delta - sq[i] * kernel(nodes[i], nodes[j]) * sq[j];
        }
    }
    determinant(a, n)
}

/// Airy two-point kernel, with the confluent diagonal limit.
pub fn airy_kernel(x: f64, y: f64) -> f64 {
    if (x - y).abs() < 1e-7 {
        let m = 0.5 * (x + y);
        let (ai, aip) = airy_pair(m);
        aip * aip - m * ai * ai
    } else {
        let (ax, apx) = airy_pair(x);
        let (ay, apy) = airy_pair(y);
        (ax * apy - apx * ay) / (x - y)
    }
}

/// Oracle value of the GUE Tracy-Widom distribution function.
pub fn tw_gue_oracle(s: f64) -> f64 {
    nystrom_det(&airy_kernel, s, 140)
}

/// Oracle value of the GOE Tracy-Widom distribution function.
pub fn tw_goe_oracle(s: f64) -> f64 {
    nystrom_det(&|x, y| 0.5 * airy_ai(0.5 * (x + y)), s, 140)
}
