//! Single-channel contention window model: distribution of the number of
//! successes `M` and the expected energy spent in UL, DL and data slots.
//!
//! After `j` successes the `n - j` remaining contenders each transmit with
//! `p_j = min(1/(n̂ - j), 1)`, so a UL slot succeeds with
//! `r_j = (n-j) p_j (1-p_j)^(n-j-1)`. With `m` successes the window holds
//! `W_m = ⌊(W - m d)/2⌋` UL/DL pairs.
//!
//! Three evaluators live here:
//! - [`pm_distribution`], [`expected_m`] and [`expected_energy`] follow the
//!   published model. The per-slot success probability given `M = m` is
//!   normalized by `P(M = m | N_i)`, which is exact for that model.
//! - [`expected_energy_marginal`] normalizes by the marginal `P(M = m)`
//!   instead. Its "probabilities" can exceed one and the result diverges
//!   for moderate `W`; it is kept for comparison.
//! - [`process_expectation`] is an exact DP for the process the simulator
//!   runs, where UL slot `k` exists while `k ≤ W_j` and a success is granted
//!   only if its `d` data slots still fit.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacAnalysisParams {
    /// True number of contenders.
    pub n: u32,
    /// Estimate used to set the contention probability.
    pub n_hat: u32,
    /// CDTW length in slots.
    pub w: u32,
    /// Data slots reserved per success.
    pub d: u32,
    pub gamma_i: f64,
    pub gamma_t: f64,
    pub gamma_r: f64,
}

impl MacAnalysisParams {
    pub fn new(n: u32, n_hat: u32, w: u32, d: u32) -> Result<Self> {
        let p = Self {
            n,
            n_hat,
            w,
            d,
            gamma_i: 1.0,
            gamma_t: 1.0,
            gamma_r: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_energy(mut self, gamma_i: f64, gamma_t: f64, gamma_r: f64) -> Result<Self> {
        self.gamma_i = gamma_i;
        self.gamma_t = gamma_t;
        self.gamma_r = gamma_r;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::invalid("d must be at least 1"));
        }
        if self.n >= 1 && self.n_hat < 1 {
            return Err(Error::invalid("n̂ must be at least 1 when n ≥ 1"));
        }
        if [self.gamma_i, self.gamma_t, self.gamma_r]
            .iter()
            .any(|g| !g.is_finite() || *g < 0.0)
        {
            return Err(Error::invalid("energy rates must be finite and nonnegative"));
        }
        Ok(())
    }

    /// `W_m = ⌊(W - m d)/2⌋`, zero once the data slots fill the window.
    pub fn pairs(&self, m: u32) -> u32 {
        let used = m as u64 * self.d as u64;
        (self.w as u64).saturating_sub(used) as u32 / 2
    }

    /// Largest possible `M`, `⌊W/(2+d)⌋`.
    pub fn max_successes(&self) -> u32 {
        self.w / (2 + self.d)
    }

    /// Contention probability after `j` successes.
    pub fn contention_prob(&self, j: u32) -> f64 {
        let x = self.n_hat as f64 - j as f64;
        if x <= 1.0 {
            1.0
        } else {
            1.0 / x
        }
    }

    /// Contenders left after `j` successes.
    pub fn contenders(&self, j: u32) -> u32 {
        self.n.saturating_sub(j)
    }

    /// `r` after `j` successes.
    pub fn success_after(&self, j: u32) -> f64 {
        success_prob(self.contenders(j), self.contention_prob(j))
    }
}

/// Slotted-ALOHA success probability `x p (1-p)^(x-1)`.
pub fn success_prob(x: u32, p: f64) -> f64 {
    if x == 0 {
        0.0
    } else {
        x as f64 * p * (1.0 - p).powi(x as i32 - 1)
    }
}

/// `h[i][j]`: probability that UL slots `i..=W_m` (1-based) bring the
/// success count from `j` to exactly `m`. Rows run to `W_m + 1`.
fn tail_table(params: &MacAnalysisParams, m: u32) -> Vec<Vec<f64>> {
    let wm = params.pairs(m) as usize;
    let m = m as usize;
    let r: Vec<f64> = (0..=m).map(|j| params.success_after(j as u32)).collect();
    let mut h = vec![vec![0.0; m + 1]; wm + 2];
    h[wm + 1][m] = 1.0;
    for i in (1..=wm).rev() {
        for j in 0..=m {
            let stay = (1.0 - r[j]) * h[i + 1][j];
            let step = if j < m { r[j] * h[i + 1][j + 1] } else { 0.0 };
            h[i][j] = stay + step;
        }
    }
    h
}

/// `P(M = m)` for `m = 0..=⌊W/(2+d)⌋`. Each entry is `g(W_m, m)` with
/// `g(t, j) = g(t-1, j)(1 - r_j) + g(t-1, j-1) r_{j-1}`.
pub fn pm_distribution(params: &MacAnalysisParams) -> Vec<f64> {
    let top = params.max_successes();
    let wmax = params.pairs(0) as usize;
    let r: Vec<f64> = (0..=top).map(|j| params.success_after(j)).collect();
    let mut g = vec![0.0; top as usize + 1];
    g[0] = 1.0;
    let mut pm = vec![0.0; top as usize + 1];
    let mut want: Vec<(usize, usize)> = (0..=top as usize)
        .map(|m| (params.pairs(m as u32) as usize, m))
        .collect();
    want.sort_unstable();
    let mut next = want.iter().peekable();
    for t in 0..=wmax {
        if t > 0 {
            for j in (0..g.len()).rev() {
                let step = if j > 0 { g[j - 1] * r[j - 1] } else { 0.0 };
                g[j] = g[j] * (1.0 - r[j]) + step;
            }
        }
        while let Some(&&(wm, m)) = next.peek() {
            if wm != t {
                break;
            }
            pm[m] = g[m];
            next.next();
        }
    }
    pm
}

/// `Σ_m P(M = m)`. The truncation at `W_m` does not make this one.
pub fn pm_total(params: &MacAnalysisParams) -> f64 {
    pm_distribution(params).iter().sum()
}

/// `E(M) = Σ m P(M = m)`.
pub fn expected_m(params: &MacAnalysisParams) -> f64 {
    pm_distribution(params)
        .iter()
        .enumerate()
        .map(|(m, p)| m as f64 * p)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyExpectation {
    pub ul: f64,
    pub dl: f64,
    pub dt: f64,
}

impl EnergyExpectation {
    pub fn total(&self) -> f64 {
        self.ul + self.dl + self.dt
    }
}

/// `E(L_i | M = m, N_i = n - j)` in the truncated model: the slot succeeds
/// only when exactly one node transmits, which moves the count to `j + 1`.
fn conditional_transmitters(params: &MacAnalysisParams, h: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let here = h[i][j];
    if here <= 0.0 {
        return 0.0;
    }
    let x = params.contenders(j as u32) as f64;
    let p = params.contention_prob(j as u32);
    let r = params.success_after(j as u32);
    let after_fail = h[i + 1][j];
    let after_success = h[i + 1].get(j + 1).copied().unwrap_or(0.0);
    (x * p * after_fail + r * (after_success - after_fail)) / here
}

fn dt_energy(params: &MacAnalysisParams, em: f64) -> f64 {
    let n = params.n as f64;
    params.d as f64 * em * (params.gamma_t + (n - 1.0) * params.gamma_i)
}

/// `P(N_i = n-j | M = m)` follows the recursion from `N_1 = n`, with the
/// per-slot success probability given `M = m` taken as
/// `P_i(M=m | S) r_j / P(M = m)`.
pub fn expected_energy_marginal(params: &MacAnalysisParams) -> EnergyExpectation {
    energy_with(params, |h, pm, i, j| {
        let r = params.success_after(j as u32);
        let after = h[i + 1].get(j + 1).copied().unwrap_or(0.0);
        after * r / pm
    })
}

/// Energy expectations of the published model. `P(N_i = n-j | M = m)`
/// follows the recursion from `N_1 = n`; the success probability in slot
/// `i` is `P_i(M=m | S) r_j / P(M=m | N_i = n-j)`.
pub fn expected_energy(params: &MacAnalysisParams) -> EnergyExpectation {
    energy_with(params, |h, _pm, i, j| {
        let here = h[i][j];
        if here <= 0.0 {
            return 0.0;
        }
        let r = params.success_after(j as u32);
        let after = h[i + 1].get(j + 1).copied().unwrap_or(0.0);
        after * r / here
    })
}

fn energy_with<F>(params: &MacAnalysisParams, success_given_m: F) -> EnergyExpectation
where
    F: Fn(&[Vec<f64>], f64, usize, usize) -> f64,
{
    let pm = pm_distribution(params);
    let n = params.n as f64;
    let (gi, gt, gr) = (params.gamma_i, params.gamma_t, params.gamma_r);
    let mut out = EnergyExpectation::default();
    for (m, &pmm) in pm.iter().enumerate() {
        if pmm <= 0.0 {
            continue;
        }
        let h = tail_table(params, m as u32);
        let wm = params.pairs(m as u32) as usize;
        // cond[j] = P(N_i = n - j | M = m) for the current slot i
        let mut cond = vec![0.0; m + 1];
        cond[0] = 1.0;
        let (mut ul, mut dl) = (0.0, 0.0);
        for i in 1..=wm {
            let mut el = 0.0;
            let mut en = 0.0;
            for j in 0..=m {
                if cond[j] == 0.0 {
                    continue;
                }
                el += conditional_transmitters(params, &h, i, j) * cond[j];
                en += params.contenders(j as u32) as f64 * cond[j];
            }
            ul += el * gt + (n - el) * gi;
            dl += en * gr + (n - en) * gi;
            if i < wm {
                let s: Vec<f64> = (0..=m).map(|j| success_given_m(&h, pmm, i, j)).collect();
                let mut nextc = vec![0.0; m + 1];
                for j in 0..=m {
                    nextc[j] += cond[j] * (1.0 - s[j]);
                    if j < m {
                        nextc[j + 1] += cond[j] * s[j];
                    }
                }
                cond = nextc;
            }
        }
        out.ul += ul * pmm;
        out.dl += dl * pmm;
    }
    let em: f64 = pm.iter().enumerate().map(|(m, p)| m as f64 * p).sum();
    out.dt = dt_energy(params, em);
    out
}

/// Exact expectations for the simulated contention process.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessExpectation {
    pub pm: Vec<f64>,
    pub expected_m: f64,
    pub energy: EnergyExpectation,
}

/// Forward DP over (pair index, successes). The window closes after pair
/// `k` once `k + 1 > W_j`; a lone transmitter in pair `k` is granted only
/// when `k ≤ W_{j+1}`.
pub fn process_expectation(params: &MacAnalysisParams) -> ProcessExpectation {
    let top = params.max_successes() as usize;
    let n = params.n as f64;
    let (gi, gt, gr) = (params.gamma_i, params.gamma_t, params.gamma_r);
    let mut pm = vec![0.0; top + 1];
    let mut f = vec![0.0; top + 1];
    f[0] = 1.0;
    let mut energy = EnergyExpectation::default();
    let mut k: u32 = 1;
    while f.iter().any(|&x| x > 0.0) {
        let mut next = vec![0.0; top + 1];
        for j in 0..=top {
            let mass = f[j];
            if mass == 0.0 {
                continue;
            }
            if k > params.pairs(j as u32) {
                pm[j] += mass;
                continue;
            }
            let x = params.contenders(j as u32) as f64;
            let p = params.contention_prob(j as u32);
            let el = x * p;
            energy.ul += mass * (el * gt + (n - el) * gi);
            energy.dl += mass * (x * gr + (n - x) * gi);
            let r = if j < top && k <= params.pairs(j as u32 + 1) {
                params.success_after(j as u32)
            } else {
                0.0
            };
            next[j] += mass * (1.0 - r);
            if r > 0.0 {
                next[j + 1] += mass * r;
            }
        }
        f = next;
        k += 1;
    }
    let expected_m = pm.iter().enumerate().map(|(m, p)| m as f64 * p).sum();
    energy.dt = dt_energy(params, expected_m);
    ProcessExpectation {
        pm,
        expected_m,
        energy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(n: u32, n_hat: u32, w: u32, d: u32) -> MacAnalysisParams {
        MacAnalysisParams::new(n, n_hat, w, d).unwrap()
    }

    #[test]
    fn success_prob_values() {
        assert_eq!(success_prob(1, 1.0), 1.0);
        assert_eq!(success_prob(2, 0.5), 0.5);
        assert_eq!(success_prob(0, 0.3), 0.0);
        for x in 1..12u32 {
            let best = success_prob(x, 1.0 / x as f64);
            for k in 1..200 {
                assert!(success_prob(x, k as f64 / 200.0) <= best + 1e-15);
            }
        }
    }

    #[test]
    fn single_node_single_success() {
        let p = params(1, 1, 3, 1);
        assert_eq!(pm_distribution(&p), vec![0.0, 1.0]);
        assert_eq!(expected_m(&p), 1.0);
    }

    #[test]
    fn empty_window() {
        let p = params(3, 3, 0, 2);
        assert_eq!(pm_distribution(&p), vec![1.0]);
        assert_eq!(expected_m(&p), 0.0);
        assert_eq!(expected_m(&params(0, 0, 30, 2)), 0.0);
    }

    #[test]
    fn dp_matches_tail_table() {
        for (n, w, d) in [(3, 12, 2), (5, 20, 1), (2, 9, 3)] {
            let p = params(n, n, w, d);
            let pm = pm_distribution(&p);
            for (m, &v) in pm.iter().enumerate() {
                assert_abs_diff_eq!(v, tail_table(&p, m as u32)[1][0], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn zero_rates_zero_energy() {
        let p = params(4, 4, 20, 2).with_energy(0.0, 0.0, 0.0).unwrap();
        assert_eq!(expected_energy(&p), EnergyExpectation::default());
        assert_eq!(process_expectation(&p).energy, EnergyExpectation::default());
    }

    #[test]
    fn dt_is_d_times_em() {
        let p = params(5, 5, 50, 5).with_energy(0.5, 2.0, 1.0).unwrap();
        let e = expected_energy(&p);
        assert_abs_diff_eq!(e.dt, 5.0 * expected_m(&p) * (2.0 + 4.0 * 0.5), epsilon = 1e-12);
    }

    #[test]
    fn process_model_is_normalized() {
        for (n, w, d) in [(5, 50, 1), (5, 50, 5), (20, 50, 1), (20, 50, 5), (3, 12, 2)] {
            let e = process_expectation(&params(n, n, w, d));
            assert_abs_diff_eq!(e.pm.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalizations_agree_for_a_certain_success() {
        // With one contender and p = 1 the first pair always succeeds.
        let p = params(1, 1, 10, 2).with_energy(1.0, 3.0, 2.0).unwrap();
        let a = expected_energy(&p);
        let b = expected_energy_marginal(&p);
        assert_abs_diff_eq!(a.ul, b.ul, epsilon = 1e-12);
        assert_abs_diff_eq!(a.dl, b.dl, epsilon = 1e-12);
    }
}
