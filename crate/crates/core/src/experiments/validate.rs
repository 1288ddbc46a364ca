//! Cross-checks of production code against the oracles.
//!
//! Each check returns a [`Check`]; `validate` runs the set configured in
//! [`ValidateConfig`](super::ValidateConfig) and the acceptance suite calls
//! the same functions at larger sizes.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::analysis::{
    bound_k, bound_r, expected_energy, expected_k, expected_m, expected_r, pm_distribution, pm_total,
    BoundParams, EstimationParams, MacAnalysisParams,
};
use crate::error::Result;
use crate::estimators::{
    symbol_matrix, BlockDecoder, EstimatorConfig, EstimatorKind, Estimators, Protocol, TraceMode,
};
use crate::macsim::constant_d_window_stats;
use crate::oracle::{
    enumerate_consistent_profiles, exact_collision_counts, mc_frame_process, nested_sum_pm,
    verdicts_from_profiles, OracleBudget,
};
use crate::population::HashAssignment;
use crate::rng::{RandomSource, StreamKind};
use crate::stats::SampleMean;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Method I, Method II and the baseline must read identical bitmaps off the
/// same hash assignment. Counts are uniform in `0..=max_nodes` per type and
/// the bitmap length uniform in `1..=max_t`.
pub fn check_estimator_equivalence(
    types: RangeInclusive<usize>,
    runs: u32,
    max_nodes: usize,
    max_t: u32,
    seed: u64,
) -> Result<Check> {
    let src = RandomSource::new(seed);
    let mut mismatches = Vec::new();
    let mut total = 0u64;
    for tt in types.clone() {
        let est = Estimators::new(tt, EstimatorConfig::default())?;
        let bad: Vec<u64> = (0..runs as u64)
            .into_par_iter()
            .map(|r| -> Result<Option<u64>> {
                let mut rng = src.stream_for(StreamKind::Custom(10 + tt as u64), r, 0);
                let t = rng.random_range(1..=max_t);
                let counts: Vec<usize> = (0..tt).map(|_| rng.random_range(0..=max_nodes)).collect();
                let a = HashAssignment::redraw(&counts, t, &mut rng)?;
                let reports: Vec<_> = EstimatorKind::ALL
                    .iter()
                    .map(|&k| est.run(k, &a, TraceMode::CountOnly).map(|run| run.report))
                    .collect::<Result<_>>()?;
                let same = reports
                    .windows(2)
                    .all(|w| w[0].rho == w[1].rho && w[0].n_hat == w[1].n_hat);
                Ok((!same).then_some(r))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        total += runs as u64;
        if let Some(&r) = bad.first() {
            mismatches.push(format!("T={tt} run {r}"));
        }
    }
    Ok(Check::new(
        "estimator equivalence",
        mismatches.is_empty(),
        format!(
            "{total} shared realizations over T in {}..={}; mismatches: {}",
            types.start(),
            types.end(),
            if mismatches.is_empty() { "none".into() } else { mismatches.join(", ") }
        ),
    ))
}

/// Decoder verdicts and profile sets against exhaustive enumeration for
/// every reachable block outcome.
pub fn check_decoder_against_profiles(types: RangeInclusive<usize>) -> Result<Check> {
    let budget = OracleBudget::default();
    let mut outcomes = 0usize;
    let mut bad = Vec::new();
    for tt in types.clone() {
        for protocol in [Protocol::Method1, Protocol::Method2] {
            let matrix = symbol_matrix(protocol, tt)?;
            let dec = BlockDecoder::new(matrix.clone())?;
            for o in dec.reachable_outcomes() {
                outcomes += 1;
                let d = dec.decode(&o)?;
                let profiles = enumerate_consistent_profiles(&matrix, &o, &budget)?;
                let mine: BTreeSet<_> = d.profiles.iter().cloned().collect();
                if mine != profiles || d.verdicts != verdicts_from_profiles(tt, &profiles) {
                    bad.push(format!("{protocol:?} T={tt} {o:?}"));
                }
            }
        }
    }
    Ok(Check::new(
        "decoder vs exhaustive profiles",
        bad.is_empty(),
        format!(
            "{outcomes} reachable outcomes, T in {}..={}; mismatches: {}",
            types.start(),
            types.end(),
            if bad.is_empty() { "none".into() } else { bad.join("; ") }
        ),
    ))
}

/// The tiny grid on which every hash assignment can be enumerated: all
/// count vectors with `Σ n_b ≤ max_total` for `T ∈ {2, 3}` and `t ≤ 3`.
pub fn tiny_slot_grid(max_total: u64) -> Vec<(Vec<u64>, u32)> {
    let base = max_total + 1;
    let mut out = Vec::new();
    for tt in 2..=3u32 {
        for code in 0..base.pow(tt) {
            let n: Vec<u64> = (0..tt).map(|k| code / base.pow(k) % base).collect();
            if n.iter().sum::<u64>() <= max_total {
                out.extend((1..=3).map(|t| (n.clone(), t)));
            }
        }
    }
    out
}

/// `E[K]` and `E[R]` against exact rational enumeration.
pub fn check_slot_expectations_exact(grid: &[(Vec<u64>, u32)], tolerance: f64) -> Result<Check> {
    let budget = OracleBudget::default();
    let mut worst = 0.0f64;
    for (n, t) in grid {
        let (k, r) = exact_collision_counts(n, *t, &budget)?;
        let p = EstimationParams::new(n.clone(), *t, 1)?;
        let kf = *k.numer() as f64 / *k.denom() as f64;
        let rf = *r.numer() as f64 / *r.denom() as f64;
        worst = worst.max((expected_k(&p) - kf).abs()).max((expected_r(&p) - rf).abs());
    }
    Ok(Check::new(
        "E[K], E[R] vs exact enumeration",
        worst <= tolerance,
        format!("{} points, worst |delta| = {worst:.3e} (tolerance {tolerance:e})", grid.len()),
    ))
}

/// Simulated `(K, R)` sample means of Method I on fresh hashes.
pub fn simulate_k_r(n: &[u64], t: u32, runs: u32, src: &RandomSource, point: u64) -> Result<(SampleMean, SampleMean)> {
    let est = Estimators::new(n.len(), EstimatorConfig::default())?;
    let counts: Vec<usize> = n.iter().map(|&x| x as usize).collect();
    let kr: Vec<(f64, f64)> = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = src.stream_for(StreamKind::MonteCarlo, point, r);
            let a = HashAssignment::redraw(&counts, t, &mut rng)?;
            let rep = est.run(EstimatorKind::Method1, &a, TraceMode::CountOnly)?.report;
            Ok((rep.second_phase_blocks as f64, rep.third_phase_blocks as f64))
        })
        .collect::<Result<_>>()?;
    let ks: Vec<f64> = kr.iter().map(|x| x.0).collect();
    let rs: Vec<f64> = kr.iter().map(|x| x.1).collect();
    Ok((SampleMean::from_samples(&ks), SampleMean::from_samples(&rs)))
}

/// `E[K]` and `E[R]` within `sigmas` standard errors of Method I runs.
pub fn check_slot_expectations_mc(grid: &[(Vec<u64>, u32)], runs: u32, sigmas: f64, seed: u64) -> Result<Check> {
    let src = RandomSource::new(seed);
    let mut worst = 0.0f64;
    let mut fails = Vec::new();
    for (i, (n, t)) in grid.iter().enumerate() {
        let (k, r) = simulate_k_r(n, *t, runs, &src, i as u64)?;
        let p = EstimationParams::new(n.clone(), *t, 1)?;
        for (what, sm, exact) in [("K", k, expected_k(&p)), ("R", r, expected_r(&p))] {
            let z = sm.z_score(exact);
            let z = if z.is_nan() { 0.0 } else { z };
            worst = worst.max(z.abs());
            if !sm.within(exact, sigmas) {
                fails.push(format!("{what} n={n:?} t={t}: analytic {exact:.4} vs {:.4}±{:.4}", sm.mean, sm.std_err));
            }
        }
    }
    Ok(Check::new(
        "E[K], E[R] vs Monte Carlo",
        fails.is_empty(),
        format!(
            "{} points x {runs} runs, worst |z| = {worst:.2}{}",
            grid.len(),
            if fails.is_empty() { String::new() } else { format!("; {}", fails.join("; ")) }
        ),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSummary {
    pub points: usize,
    pub violations: usize,
    /// Violations where every count is at most one.
    pub single_node_violations: usize,
    /// Largest `bound_K / E[K]` over points with `E[K] > 0`.
    pub worst_ratio: f64,
}

/// Bounds above the exact expectations on the grid `T ∈ types`, every
/// count vector over `counts`, `t = ⌈log2 n_r⌉ + s` for `s ∈ slack`.
pub fn check_bounds(
    types: RangeInclusive<usize>,
    counts: &[u64],
    slack: RangeInclusive<u32>,
) -> Result<(Check, BoundSummary)> {
    let mut points = 0usize;
    let mut violations = Vec::new();
    let mut worst_ratio = 0.0f64;
    let mut skipped = 0usize;
    for tt in types.clone() {
        let mut idx = vec![0usize; tt];
        loop {
            let n: Vec<u64> = idx.iter().map(|&i| counts[i]).collect();
            let n_r = *n.iter().max().unwrap();
            let l = crate::ids::ceil_log2(n_r);
            for s in slack.clone() {
                // a bitmap needs at least one bit
                if l + s == 0 {
                    skipped += 1;
                    continue;
                }
                let p = EstimationParams::new(n.clone(), l + s, 5)?;
                let b = BoundParams::from_params(&p)?;
                let (ek, er) = (expected_k(&p), expected_r(&p));
                let (bk, br) = (bound_k(&p, &b), bound_r(&p, &b));
                points += 1;
                if bk < ek || br < er {
                    violations.push((n_r, format!("n={n:?} s={s}: bound_K {bk:.4} vs E[K] {ek:.4}, bound_R {br:.4} vs E[R] {er:.4}")));
                }
                if ek > 0.0 {
                    worst_ratio = worst_ratio.max(bk / ek);
                }
            }
            let mut k = 0;
            while k < tt {
                idx[k] += 1;
                if idx[k] < counts.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == tt {
                break;
            }
        }
    }
    Ok((
        Check::new(
            "bounds above expectations",
            violations.is_empty(),
            format!(
                "{points} points ({skipped} with t = 0 skipped), {} violations ({} with n_r = 1), largest bound_K/E[K] = {worst_ratio:.2}{}",
                violations.len(),
                violations.iter().filter(|v| v.0 == 1).count(),
                violations.first().map(|v| format!(", first {}", v.1)).unwrap_or_default()
            ),
        ),
        BoundSummary {
            points,
            violations: violations.len(),
            single_node_violations: violations.iter().filter(|v| v.0 == 1).count(),
            worst_ratio,
        },
    ))
}

/// `P(M = m)` from the DP against the literal nested sum, over `W ≤ max_w`,
/// `d ≤ max_d`, `1 ≤ n, n̂ ≤ max_n`, `m ≤ max_m`.
pub fn check_pm_dp(max_w: u32, max_d: u32, max_n: u32, max_m: u32, tolerance: f64) -> Result<Check> {
    let budget = OracleBudget::default();
    let mut worst = 0.0f64;
    let mut points = 0usize;
    for w in 1..=max_w {
        for d in 1..=max_d {
            for n in 1..=max_n {
                for n_hat in 1..=max_n {
                    let Ok(p) = MacAnalysisParams::new(n, n_hat, w, d) else {
                        continue;
                    };
                    let pm = pm_distribution(&p);
                    for m in 0..=max_m {
                        let lit = nested_sum_pm(&p, m, &budget)?;
                        let dp = pm.get(m as usize).copied().unwrap_or(0.0);
                        worst = worst.max((lit - dp).abs());
                        points += 1;
                    }
                }
            }
        }
    }
    Ok(Check::new(
        "P(M=m) DP vs nested sum",
        worst <= tolerance,
        format!("{points} (W, d, n, n̂, m) points, worst |delta| = {worst:.3e} (tolerance {tolerance:e})"),
    ))
}

/// One `(W, d, n)` point of the single-channel triangulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FramePoint {
    pub w: u32,
    pub d: u32,
    pub n: u32,
    pub pm_total: f64,
    /// `(quantity, analytic, process mean, process se, fixture mean, fixture se)`.
    pub rows: Vec<(&'static str, f64, f64, f64, f64, f64)>,
}

/// Analytic `E(M)` and energies against the direct process simulation,
/// and the process against the simulator's constant-`d` window, at
/// `n̂ = n`. Returns one check per leg plus the per-point numbers.
pub fn check_frame_model(points: &[[u32; 3]], samples: u64, sigmas: f64, seed: u64) -> Result<(Check, Check, Vec<FramePoint>)> {
    let src = RandomSource::new(seed);
    let budget = OracleBudget::default();
    let results: Vec<FramePoint> = points
        .par_iter()
        .enumerate()
        .map(|(i, &[w, d, n])| -> Result<FramePoint> {
            let p = MacAnalysisParams::new(n, n, w, d)?;
            let mut rng = src.stream_for(StreamKind::MonteCarlo, 1000 + i as u64, 0);
            let mc = mc_frame_process(&p, samples, &budget, &mut rng)?;
            let mut rng = src.stream_for(StreamKind::MonteCarlo, 2000 + i as u64, 0);
            let fx = constant_d_window_stats(n, n as f64, w, d, (p.gamma_i, p.gamma_t, p.gamma_r), samples, &mut rng);
            let e = expected_energy(&p);
            let rows = vec![
                ("E(M)", expected_m(&p), mc.m.mean, mc.m.std_err, fx.successes.mean, fx.successes.std_err),
                ("E_UL", e.ul, mc.ul.mean, mc.ul.std_err, fx.ul_energy.mean, fx.ul_energy.std_err),
                ("E_DL", e.dl, mc.dl.mean, mc.dl.std_err, fx.dl_energy.mean, fx.dl_energy.std_err),
                ("E_DT", e.dt, mc.dt.mean, mc.dt.std_err, fx.data_energy.mean, fx.data_energy.std_err),
            ];
            Ok(FramePoint {
                w,
                d,
                n,
                pm_total: pm_total(&p),
                rows,
            })
        })
        .collect::<Result<_>>()?;
    let mut analytic_fails = Vec::new();
    let mut fixture_fails = Vec::new();
    for fp in &results {
        for &(q, a, m, se, f, fse) in &fp.rows {
            if (a - m).abs() > sigmas * se {
                analytic_fails.push(format!("{q}@(W={},d={},n={}) {a:.3} vs {m:.3}±{se:.3}", fp.w, fp.d, fp.n));
            }
            let joint = (se * se + fse * fse).sqrt();
            if (f - m).abs() > sigmas * joint {
                fixture_fails.push(format!("{q}@(W={},d={},n={}) {f:.3} vs {m:.3}", fp.w, fp.d, fp.n));
            }
        }
    }
    let deficits: Vec<String> = results
        .iter()
        .map(|fp| format!("(W={},d={},n={}) {:.3}", fp.w, fp.d, fp.n, fp.pm_total))
        .collect();
    let a = Check::new(
        "analytic frame model vs process",
        analytic_fails.is_empty(),
        format!(
            "{} points x {samples} samples; sum P(M=m): {}; {}",
            points.len(),
            deficits.join(", "),
            if analytic_fails.is_empty() { "all within 3 sigma".into() } else { analytic_fails.join("; ") }
        ),
    );
    let b = Check::new(
        "process vs simulator constant-d window",
        fixture_fails.is_empty(),
        format!(
            "{} points x {samples} samples; {}",
            points.len(),
            if fixture_fails.is_empty() { "all within 3 sigma".into() } else { fixture_fails.join("; ") }
        ),
    );
    Ok((a, b, results))
}

/// Default `(W, d, n)` triangulation points.
pub const FRAME_POINTS: [[u32; 3]; 4] = [[50, 1, 5], [50, 5, 5], [50, 1, 20], [50, 5, 20]];

/// Moderate `E[K]`/`E[R]` grid: `T ≤ 6`, counts up to 100.
pub fn slot_mc_grid() -> Vec<(Vec<u64>, u32)> {
    let mut g = Vec::new();
    for (n, t) in [
        (vec![0, 0], 7),
        (vec![1, 1], 4),
        (vec![5, 5], 6),
        (vec![2, 30], 7),
        (vec![100, 100], 7),
        (vec![3, 3, 3], 5),
        (vec![10, 20, 30], 7),
        (vec![50, 1, 1], 7),
        (vec![100, 50, 10], 8),
        (vec![1, 100, 100], 7),
        (vec![4, 4, 4, 4], 5),
        (vec![20, 5, 20, 5], 7),
        (vec![100, 100, 100, 100], 7),
        (vec![1, 2, 3, 4], 3),
        (vec![8, 8, 8, 8, 8], 6),
        (vec![30, 10, 60, 2, 90], 7),
        (vec![100, 0, 100, 0, 100], 7),
        (vec![5, 5, 5, 5, 5, 5], 5),
        (vec![40, 40, 40, 40, 40, 40], 7),
        (vec![100, 80, 60, 40, 20, 1], 8),
        (vec![2, 60, 2, 60, 2, 60], 9),
        (vec![0, 7, 0, 7, 0, 7], 4),
    ] {
        g.push((n, t));
    }
    g
}

/// The checks behind the `validate` subcommand.
pub fn validate(config: &ExperimentConfig) -> Result<ValidationReport> {
    let v = &config.validate;
    let mut checks = vec![
        check_estimator_equivalence(2..=6, v.equivalence_runs, 100, 12, config.seed)?,
        check_decoder_against_profiles(2..=6)?,
        check_slot_expectations_exact(&tiny_slot_grid(6), 1e-12)?,
        check_slot_expectations_mc(&slot_mc_grid(), v.slot_mc_runs, 3.0, config.seed)?,
        check_bounds(2..=6, &[1, 10, 100], 0..=4)?.0,
        check_pm_dp(10, 3, 4, 4, 1e-12)?,
    ];
    if v.frame_model {
        let (a, b, _) = check_frame_model(&FRAME_POINTS, v.process_samples, 3.0, config.seed)?;
        checks.push(a);
        checks.push(b);
    }
    Ok(ValidationReport { checks })
}
