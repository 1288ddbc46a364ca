use crate::analysis::MacAnalysisParams;
use crate::error::Result;

use super::OracleBudget;

/// `r_{n-j}` with `p_{n-j} = min(1/(n̂ - j), 1)`.
fn r(params: &MacAnalysisParams, j: u32) -> f64 {
    let x = params.n as i64 - j as i64;
    if x <= 0 {
        return 0.0;
    }
    let denom = params.n_hat as f64 - j as f64;
    let p = if denom <= 0.0 { 1.0 } else { (1.0 / denom).min(1.0) };
    x as f64 * p * (1.0 - p).powi(x as i32 - 1)
}

/// `P(M = m)` as the literal `m`-fold sum over success positions
/// `k_1 < … < k_m ≤ W_m`.
pub fn nested_sum_pm(params: &MacAnalysisParams, m: u32, budget: &OracleBudget) -> Result<f64> {
    budget.check("nested sum m", m as u64, budget.max_nested_m as u64)?;
    budget.check("nested sum W", params.w as u64, budget.max_nested_w as u64)?;
    let room = params.w as i64 - m as i64 * params.d as i64;
    let wm = if room <= 0 { 0 } else { room / 2 };
    Ok(level(params, m, wm, 0, 0))
}

fn level(params: &MacAnalysisParams, m: u32, wm: i64, j: u32, prev: i64) -> f64 {
    if j == m {
        return (1.0 - r(params, m)).powi((wm - prev) as i32);
    }
    let hi = wm - m as i64 + j as i64 + 1;
    let mut total = 0.0;
    for k in prev + 1..=hi {
        let head = (1.0 - r(params, j)).powi((k - prev - 1) as i32) * r(params, j);
        total += head * level(params, m, wm, j + 1, k);
    }
    total
}
