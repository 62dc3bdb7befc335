//! The Airy function of the first kind and its derivative, accurate to
//! roughly 1e-12 absolute over [-10.5, inf).
//!
//! Strategy: for large arguments use the standard asymptotic expansion. For
//! the rest of the range, integrate the defining equation y'' = x y once,
//! downward from deep in the decaying regime (downward integration damps
//! contamination by the growing solution), caching values and derivatives on
//! a coarse grid; point evaluations then run a short Taylor series around the
//! nearest cached node, with coefficients generated by the same equation.

use std::sync::OnceLock;

/// Below this the cached-grid route is used; above, the asymptotic series.
const ASYMPTOTIC_CUTOFF: f64 = 9.75;
const GRID_LO: f64 = -10.5;
const GRID_HI: f64 = 10.5;
const GRID_STEP: f64 = 0.25;

fn asymptotic_pair(x: f64) -> (f64, f64) {
    debug_assert!(x >= ASYMPTOTIC_CUTOFF - 1e-9);
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let mut u = 1.0f64; // u_k coefficients
    let mut s_val = 1.0f64;
    let mut s_der = 1.0f64;
    let mut sign = 1.0f64;
    let mut zk = 1.0f64;
    for k in 0..24u32 {
        let kf = k as f64;
        u *= (3.0 * kf + 2.5) * (3.0 * kf + 1.5) * (3.0 * kf + 0.5)
            / (54.0 * (kf + 1.0) * (kf + 0.5));
        zk /= zeta;
        sign = -sign;
        let term_val = sign * u * zk;
        // v_k = (6k+1)/(1-6k) u_k with k -> k+1 here.
        let kk = kf + 1.0;
        let term_der = sign * u * (6.0 * kk + 1.0) / (1.0 - 6.0 * kk) * zk;
        s_val += term_val;
        s_der += term_der;
        if term_val.abs() < 1e-18 {
            break;
        }
    }
    let front = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let ai = front / x.powf(0.25) * s_val;
    let aip = -front * x.powf(0.25) * s_der;
    (ai, aip)
}

struct AiryGrid {
    ai: Vec<f64>,
    aip: Vec<f64>,
}

fn build_grid() -> AiryGrid {
    let nodes = ((GRID_HI - GRID_LO) / GRID_STEP).round() as usize + 1;
    let mut ai = vec![0.0; nodes];
    let mut aip = vec![0.0; nodes];
    let (mut y, mut yp) = asymptotic_pair(GRID_HI);
    ai[nodes - 1] = y;
    aip[nodes - 1] = yp;
    // Classical fourth-order Runge-Kutta on y'' = x y, stepping downward.
    let per_node = 8192usize;
    let h = -GRID_STEP / per_node as f64;
    let mut x = GRID_HI;
    for node in (0..nodes - 1).rev() {
        for _ in 0..per_node {
            let k1 = (yp, x * y);
            let k2 = (yp + 0.5 * h * k1.1, (x + 0.5 * h) * (y + 0.5 * h * k1.0));
            let k3 = (yp + 0.5 * h * k2.1, (x + 0.5 * h) * (y + 0.5 * h * k2.0));
            let k4 = (yp + h * k3.1, (x + h) * (y + h * k3.0));
            y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            yp += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            x += h;
        }
        x = GRID_LO + node as f64 * GRID_STEP; // resync against drift
        ai[node] = y;
        aip[node] = yp;
    }
    AiryGrid { ai, aip }
}

fn grid() -> &'static AiryGrid {
    static GRID: OnceLock<AiryGrid> = OnceLock::new();
    GRID.get_or_init(build_grid)
}

/// Taylor step off a node where the value and derivative are known, using
/// a_{n+2} = (x0 a_n + a_{n-1}) / ((n+1)(n+2)) from the defining equation.
fn taylor_pair(x0: f64, a0: f64, a1: f64, delta: f64) -> (f64, f64) {
    let mut coeff = [0.0f64; 26];
    coeff[0] = a0;
    coeff[1] = a1;
    for n in 0..24 {
        let prev = if n == 0 { 0.0 } else { coeff[n - 1] };
        coeff[n + 2] = (x0 * coeff[n] + prev) / (((n + 1) * (n + 2)) as f64);
    }
    let mut val = 0.0;
    let mut der = 0.0;
    for n in (0..26).rev() {
        val = val * delta + coeff[n];
        if n >= 1 {
            der = der * delta + coeff[n] * n as f64;
        }
    }
    (val, der)
}

/// Airy function value and derivative. Arguments below -10.5 are outside the
/// supported range and panic.
pub fn airy_pair(x: f64) -> (f64, f64) {
    assert!(x >= GRID_LO, "airy argument {x} below supported range");
    if x >= ASYMPTOTIC_CUTOFF {
        return asymptotic_pair(x);
    }
    let g = grid();
    let node = ((x - GRID_LO) / GRID_STEP).round() as usize;
    let x0 = GRID_LO + node as f64 * GRID_STEP;
    taylor_pair(x0, g.ai[node], g.aip[node], x - x0)
}

pub fn airy_ai(x: f64) -> f64 {
    airy_pair(x).0
}

pub fn airy_ai_prime(x: f64) -> f64 {
    airy_pair(x).1
}

/// Tail integral of the squared Airy function, in closed form.
pub fn airy_sq_tail(a: f64) -> f64 {
    let (ai, aip) = airy_pair(a);
    aip * aip - a * ai * ai
}

/// Tail integral of x -> x Ai(x)^2, in closed form.
pub fn airy_xsq_tail(a: f64) -> f64 {
    let (ai, aip) = airy_pair(a);
    (a * aip * aip - a * a * ai * ai - ai * aip) / 3.0
}

/// Tail integral of the Airy function itself, by composite Simpson far into
/// the superexponentially decaying regime.
pub fn airy_tail(a: f64) -> f64 {
    let hi = a.max(0.0) + 26.0;
    let n = (((hi - a) / 1e-3).ceil() as usize).max(2) & !1usize;
    let h = (hi - a) / n as f64;
    let mut s = airy_ai(a) + airy_ai(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * airy_ai(a + i as f64 * h);
    }
    s * h / 3.0
}
