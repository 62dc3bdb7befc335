//! Tracy-Widom distribution functions via the Hastings-McLeod solution of
//! Painleve II, q'' = x q + 2 q^3 with q(x) ~ Ai(x) at +infinity.
//!
//! One downward integration carries the solution together with the tail
//! integrals K = int q^2, M = int x q^2, and E = int q; the two distribution
//! functions are then
//!
//!   F2(x) = exp(-(M - x K)),      F1(x) = exp(-E / 2) sqrt(F2(x)).

use crate::airy::{airy_pair, airy_sq_tail, airy_tail, airy_xsq_tail};
use std::sync::OnceLock;

pub const TABLE_LO: f64 = -10.0;
pub const TABLE_HI: f64 = 10.0;
pub const TABLE_STEP: f64 = 0.05;

/// Values of the Hastings-McLeod solution and both distribution functions on
/// the uniform grid [TABLE_LO, TABLE_HI] with spacing TABLE_STEP.
pub struct TwTables {
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    pub f2: Vec<f64>,
    pub f1: Vec<f64>,
}

#[derive(Clone, Copy)]
struct State {
    q: f64,
    p: f64,
    k: f64,
    m: f64,
    e: f64,
}

fn derivative(x: f64, s: State) -> State {
    State {
        q: s.p,
        p: x * s.q + 2.0 * s.q * s.q * s.q,
        k: -s.q * s.q,
        m: -x * s.q * s.q,
        e: -s.q,
    }
}

fn advance(x: f64, s: State, h: f64) -> State {
    let add = |a: State, b: State, c: f64| State {
        q: a.q + c * b.q,
        p: a.p + c * b.p,
        k: a.k + c * b.k,
        m: a.m + c * b.m,
        e: a.e + c * b.e,
    };
    let k1 = derivative(x, s);
    let k2 = derivative(x + 0.5 * h, add(s, k1, 0.5 * h));
    let k3 = derivative(x + 0.5 * h, add(s, k2, 0.5 * h));
    let k4 = derivative(x + h, add(s, k3, h));
    let mut sum = add(k1, k2, 2.0);
    sum = add(sum, k3, 2.0);
    sum = add(sum, k4, 1.0);
    add(s, sum, h / 6.0)
}

fn build_tables() -> TwTables {
    let rows = ((TABLE_HI - TABLE_LO) / TABLE_STEP).round() as usize + 1;
    let (ai, aip) = airy_pair(TABLE_HI);
    let mut state = State {
        q: ai,
        p: aip,
        k: airy_sq_tail(TABLE_HI),
        m: airy_xsq_tail(TABLE_HI),
        e: airy_tail(TABLE_HI),
    };
    let mut x_col = vec![0.0; rows];
    let mut q_col = vec![0.0; rows];
    let mut f2_col = vec![0.0; rows];
    let mut f1_col = vec![0.0; rows];
    let record = |i: usize, x: f64, s: &State, xc: &mut [f64], qc: &mut [f64], f2: &mut [f64], f1: &mut [f64]| {
        let exponent = s.m - x * s.k;
        xc[i] = x;
        qc[i] = s.q;
        f2[i] = (-exponent).exp();
        f1[i] = (-0.5 * s.e - 0.5 * exponent).exp();
    };
    record(rows - 1, TABLE_HI, &state, &mut x_col, &mut q_col, &mut f2_col, &mut f1_col);
    let per_row = 512usize;
    let h = -TABLE_STEP / per_row as f64;
    let mut x = TABLE_HI;
    for row in (0..rows - 1).rev() {
        for _ in 0..per_row {
            state = advance(x, state, h);
            x += h;
        }
        x = TABLE_LO + row as f64 * TABLE_STEP; // resync against drift
        record(row, x, &state, &mut x_col, &mut q_col, &mut f2_col, &mut f1_col);
    }
    TwTables { x: x_col, q: q_col, f2: f2_col, f1: f1_col }
}

pub fn tw_tables() -> &'static TwTables {
    static TABLES: OnceLock<TwTables> = OnceLock::new();
    TABLES.get_or_init(build_tables)
}
