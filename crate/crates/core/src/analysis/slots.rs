//! Expected Method I slot counts and their closed-form upper bounds.
//!
//! Block `i` of phase 1 needs a phase-2 slot when all its `T-1` slots
//! collide. With `n_b` active nodes of type `b` hashing independently,
//!
//! ```text
//! u(n,i) = (1-p_i)^n            v(n,i) = n p_i (1-p_i)^(n-1)
//! Q1 = 1 - u(n_1) - v(n_1)
//! Q2 = v(n_1) · Π_{b≥2} (1 - u(n_b))
//! Q3 = u(n_1) · Π_{b≥2} (1 - u(n_b) - v(n_b))
//! E[K] = Σ_i Q1+Q2+Q3           E[R] = Σ_i Q1
//! ```

use crate::error::{Error, Result};
use crate::ids::ceil_log2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimationParams {
    /// Active nodes per type; the length is `T`.
    pub n: Vec<u64>,
    /// Bitmap length `t_T`.
    pub t: u32,
    pub s_w: u32,
}

impl EstimationParams {
    pub fn new(n: Vec<u64>, t: u32, s_w: u32) -> Result<Self> {
        if n.len() < 2 {
            return Err(Error::invalid("at least two types are required"));
        }
        if t < 1 || s_w < 1 {
            return Err(Error::invalid("t_T and S_W must be at least 1"));
        }
        Ok(Self { n, t, s_w })
    }

    pub fn type_count(&self) -> usize {
        self.n.len()
    }
}

/// Probability that a node's hash is `i` over `t` bins.
pub fn hash_prob(i: u32, t: u32) -> Result<f64> {
    if t < 1 || i >= t {
        return Err(Error::invalid(format!("hash index {i} outside 0..{t}")));
    }
    Ok(if i + 2 <= t {
        0.5f64.powi(i as i32 + 1)
    } else {
        0.5f64.powi(t as i32 - 1)
    })
}

fn u(n: u64, p: f64) -> f64 {
    (1.0 - p).powf(n as f64)
}

fn v(n: u64, p: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * p * (1.0 - p).powf(n as f64 - 1.0)
    }
}

/// `(Q1, Q2, Q3)` for block `i`.
pub fn block_collision_terms(params: &EstimationParams, i: u32) -> Result<(f64, f64, f64)> {
    let p = hash_prob(i, params.t)?;
    let n1 = params.n[0];
    let q1 = 1.0 - u(n1, p) - v(n1, p);
    let mut q2 = v(n1, p);
    let mut q3 = u(n1, p);
    for &nb in &params.n[1..] {
        q2 *= 1.0 - u(nb, p);
        q3 *= 1.0 - u(nb, p) - v(nb, p);
    }
    // 1 - u - v can round to a tiny negative for n <= 1
    Ok((q1.max(0.0), q2, q3.max(0.0)))
}

/// Expected number of phase-2 slots, `E[K_T]`.
pub fn expected_k(params: &EstimationParams) -> f64 {
    (0..params.t)
        .map(|i| {
            let (a, b, c) = block_collision_terms(params, i).expect("i < t");
            a + b + c
        })
        .sum()
}

/// Expected number of phase-3 rounds, `E[R_T]`.
pub fn expected_r(params: &EstimationParams) -> f64 {
    (0..params.t)
        .map(|i| block_collision_terms(params, i).expect("i < t").0)
        .sum()
}

/// `(T-1)t + ⌈t/S_W⌉ + E[K] + ⌈E[K]/S_W⌉ + (T-1)E[R]`, ceilings taken on
/// the expectations.
pub fn expected_total_method1(params: &EstimationParams) -> f64 {
    total_from(params, expected_k(params), expected_r(params))
}

fn total_from(params: &EstimationParams, k: f64, r: f64) -> f64 {
    let tm1 = (params.type_count() - 1) as f64;
    let t = params.t as f64;
    let sw = params.s_w as f64;
    tm1 * t + (t / sw).ceil() + k + (k / sw).ceil() + tm1 * r
}

/// `n_r`, `l = ⌈log2 n_r⌉` and `s = t_T - l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundParams {
    pub n_r: u64,
    pub l: u32,
    pub s: u32,
}

impl BoundParams {
    pub fn from_params(params: &EstimationParams) -> Result<Self> {
        let n_r = params.n.iter().copied().max().unwrap_or(0);
        let l = ceil_log2(n_r);
        if params.t < l {
            return Err(Error::invalid(format!(
                "bitmap length {} shorter than log2 of the largest count ({l})",
                params.t
            )));
        }
        Ok(Self {
            n_r,
            l,
            s: params.t - l,
        })
    }
}

/// Upper bound on `E[R_T]`.
pub fn bound_r(params: &EstimationParams, b: &BoundParams) -> f64 {
    if b.n_r == 0 {
        return 0.0;
    }
    let ratio = params.n[0] as f64 / b.n_r as f64;
    b.l as f64 - 1.0 + (2.0 / 3.0) * ratio * ratio * (1.0 + 2.0 / 4f64.powi(b.s as i32))
}

/// Upper bound on `E[K_T]`.
pub fn bound_k(params: &EstimationParams, b: &BoundParams) -> f64 {
    if b.n_r == 0 {
        return 0.0;
    }
    let tt = params.type_count() as i32;
    let nr = b.n_r as f64;
    let s = b.s as i32;
    let others: f64 = params.n[1..].iter().map(|&x| x as f64 / nr).product();
    let all = others * params.n[0] as f64 / nr;
    let four = 4f64.powi(tt - 1);
    let pairs = others * others / (2f64.powi(tt - 1) * (1.0 - 1.0 / four))
        * (1.0 - 2.0 / four.powi(s) * (1.0 - four / 2.0));
    let singles = all / (1.0 - 2f64.powi(-tt))
        * (1.0 - 2.0 / 2f64.powi(tt * s) * (1.0 - 2f64.powi(tt - 1)));
    bound_r(params, b) + pairs + singles
}

/// The total-slot expression evaluated at the two bounds.
pub fn bound_total_method1(params: &EstimationParams) -> Result<f64> {
    let b = BoundParams::from_params(params)?;
    Ok(total_from(params, bound_k(params, &b), bound_r(params, &b)))
}
