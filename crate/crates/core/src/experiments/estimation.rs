use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{EstimationSweepConfig, ExperimentConfig};
use super::output::{write_csv, CsvTable};
use crate::error::Result;
use crate::estimators::{EstimatorConfig, EstimatorKind, Estimators, TraceMode};
use crate::ids::{ceil_log2, draw_hash};
use crate::population::{HashAssignment, HashingMode, NodePopulation};
use crate::rng::{RandomSource, StreamKind, StreamLabel};
use crate::stats::SampleMean;

/// Mean slot count of one estimator at one sweep point.
pub type SlotStats = SampleMean;

/// What every estimation run needs besides the activity vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EstimationSetup {
    pub types: usize,
    pub nodes_per_type: usize,
    pub bitmap_len: u32,
    pub hashing: HashingMode,
    pub estimator: EstimatorConfig,
}

/// Per-node uniforms and hashes of one replication. A node is active at
/// `q` iff its uniform is below `q`, so every sweep point sees the same
/// nodes and hashes and curves differ only through `q`.
struct Realization {
    uniforms: Vec<Vec<f64>>,
    hashes: Vec<Vec<u32>>,
}

impl Realization {
    fn draw(setup: &EstimationSetup, src: &RandomSource, rep: u64) -> Result<Self> {
        let (types, d, t) = (setup.types, setup.nodes_per_type, setup.bitmap_len);
        let mut act = src.stream_for(StreamKind::Activity, rep, 0);
        let uniforms = (0..types)
            .map(|_| (0..d).map(|_| act.random::<f64>()).collect())
            .collect();
        let hashes = match setup.hashing {
            HashingMode::Redraw => {
                let mut rng = src.stream_for(StreamKind::Hashes, rep, 0);
                (0..types)
                    .map(|_| (0..d).map(|_| draw_hash(&mut rng, t).map(|h| h.value())).collect())
                    .collect::<Result<_>>()?
            }
            HashingMode::FixedId => {
                let width = t.max(ceil_log2((types * d) as u64)).min(63);
                let mut rng = src.stream_for(StreamKind::NodeIds, rep, 0);
                let pop = NodePopulation::with_random_ids(&vec![d; types], width, &mut rng)?;
                (0..types)
                    .map(|b| pop.nodes(b).iter().map(|n| n.id.hash().clamp_to_bins(t)).collect())
                    .collect()
            }
        };
        Ok(Self { uniforms, hashes })
    }

    fn assignment(&self, q: &[f64], t: u32) -> Result<HashAssignment> {
        let per_type = self
            .uniforms
            .iter()
            .zip(&self.hashes)
            .zip(q)
            .map(|((u, h), &qb)| u.iter().zip(h).filter(|(&ub, _)| ub < qb).map(|(_, &hb)| hb).collect())
            .collect();
        HashAssignment::new(t, per_type)
    }
}

/// Mean slots of Method I, Method II and the repeated-LoF baseline (in
/// [`EstimatorKind::ALL`] order) over `reps` shared realizations.
pub fn mean_slots(
    config: &EstimationSweepConfig,
    q: &[f64],
    reps: u32,
    source: &RandomSource,
) -> Result<[SlotStats; 3]> {
    let setup = EstimationSetup {
        types: config.types,
        nodes_per_type: config.nodes_per_type,
        bitmap_len: config.bitmap_len,
        hashing: config.hashing,
        estimator: EstimatorConfig {
            s_w: config.s_w,
            nested_broadcasts: config.nested_broadcasts,
        },
    };
    let est = Estimators::new(setup.types, setup.estimator)?;
    let per_rep = slots_per_rep(&setup, &est, &[q.to_vec()], reps, source)?;
    Ok(summarize(&per_rep, 0))
}

/// `out[rep][point][kind]`, the slot totals for every activity vector.
fn slots_per_rep(
    setup: &EstimationSetup,
    est: &Estimators,
    points: &[Vec<f64>],
    reps: u32,
    source: &RandomSource,
) -> Result<Vec<Vec<[u32; 3]>>> {
    (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let r = Realization::draw(setup, source, rep)?;
            points
                .iter()
                .map(|q| {
                    let a = r.assignment(q, setup.bitmap_len)?;
                    let mut out = [0u32; 3];
                    for (k, kind) in EstimatorKind::ALL.into_iter().enumerate() {
                        out[k] = est.run(kind, &a, TraceMode::CountOnly)?.report.slots_total;
                    }
                    Ok(out)
                })
                .collect()
        })
        .collect()
}

fn summarize(per_rep: &[Vec<[u32; 3]>], point: usize) -> [SlotStats; 3] {
    [0, 1, 2].map(|k| {
        let xs: Vec<f64> = per_rep.iter().map(|r| r[point][k] as f64).collect();
        SampleMean::from_samples(&xs)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationPoint {
    /// Value of the swept activity probability.
    pub q: f64,
    pub protocol: String,
    pub mean_slots: f64,
    pub std_err: f64,
    pub ci95_half_width: f64,
    pub reps: usize,
    pub source: &'static str,
}

/// Mean slot counts along the configured `q` axis.
pub fn estimation_sweep(config: &ExperimentConfig) -> Result<Vec<EstimationPoint>> {
    let c = &config.estimation;
    let axis = c.axis();
    let points: Vec<Vec<f64>> = axis.iter().map(|&x| c.q_at(x)).collect();
    let setup = EstimationSetup {
        types: c.types,
        nodes_per_type: c.nodes_per_type,
        bitmap_len: c.bitmap_len,
        hashing: c.hashing,
        estimator: EstimatorConfig {
            s_w: c.s_w,
            nested_broadcasts: c.nested_broadcasts,
        },
    };
    let est = Estimators::new(c.types, setup.estimator)?;
    let source = RandomSource::new(config.seed).fork(StreamLabel::new(StreamKind::Custom(1), c.types as u64, 0));
    let per_rep = slots_per_rep(&setup, &est, &points, config.reps, &source)?;
    let mut rows = Vec::new();
    for (p, &x) in axis.iter().enumerate() {
        for (kind, s) in EstimatorKind::ALL.into_iter().zip(summarize(&per_rep, p)) {
            rows.push(EstimationPoint {
                q: x,
                protocol: kind.to_string(),
                mean_slots: s.mean,
                std_err: s.std_err,
                ci95_half_width: s.half_width(0.95),
                reps: s.count,
                source: "simulated",
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub types: usize,
    pub nodes_per_type: usize,
    /// Activity probability where Method I stops beating the baseline; 1
    /// if it never does, 0 if it never beats it.
    pub q_threshold_method1: f64,
    pub q_threshold_method2: f64,
    pub reps: u32,
    pub source: &'static str,
}

/// Bisection of each method's crossing with the baseline, one row per
/// `(T, D)` pair in config order.
pub fn threshold_sweep(config: &ExperimentConfig) -> Result<Vec<ThresholdRow>> {
    let c = &config.threshold;
    let pairs: Vec<(usize, usize)> = c
        .types
        .iter()
        .flat_map(|&t| c.nodes_per_type.iter().map(move |&d| (t, d)))
        .collect();
    pairs
        .par_iter()
        .map(|&(types, d)| {
            let setup = EstimationSetup {
                types,
                nodes_per_type: d,
                bitmap_len: c.bitmap_len,
                hashing: c.hashing,
                estimator: EstimatorConfig {
                    s_w: c.s_w,
                    nested_broadcasts: c.nested_broadcasts,
                },
            };
            let source = RandomSource::new(config.seed)
                .fork(StreamLabel::new(StreamKind::Custom(2), types as u64, d as u64));
            let q1 = crossing(&setup, 0, config.reps, c.tolerance, &source)?;
            let q2 = crossing(&setup, 1, config.reps, c.tolerance, &source)?;
            Ok(ThresholdRow {
                types,
                nodes_per_type: d,
                q_threshold_method1: q1,
                q_threshold_method2: q2,
                reps: config.reps,
                source: "simulated",
            })
        })
        .collect()
}

/// Smallest `q` (to within `tol`) at which method `k` needs at least as
/// many mean slots as the baseline.
fn crossing(setup: &EstimationSetup, k: usize, reps: u32, tol: f64, source: &RandomSource) -> Result<f64> {
    let est = Estimators::new(setup.types, setup.estimator)?;
    let gap = |q: f64| -> Result<f64> {
        let per_rep = slots_per_rep(setup, &est, &[vec![q; setup.types]], reps, source)?;
        let s = summarize(&per_rep, 0);
        Ok(s[k].mean - s[2].mean)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if gap(lo)? >= 0.0 {
        return Ok(0.0);
    }
    if gap(hi)? < 0.0 {
        return Ok(1.0);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(((lo + hi) * 0.5 * 1e4).round() / 1e4)
}

pub fn write_estimation(dir: &Path, config: &ExperimentConfig, rows: &[EstimationPoint]) -> Result<()> {
    write_csv(
        &dir.join("estimation_sweep.csv"),
        CsvTable {
            experiment: "estimation-sweep",
            rows,
        },
        &config.to_toml(),
    )
}

pub fn write_threshold(dir: &Path, config: &ExperimentConfig, rows: &[ThresholdRow]) -> Result<()> {
    write_csv(
        &dir.join("threshold_sweep.csv"),
        CsvTable {
            experiment: "threshold-sweep",
            rows,
        },
        &config.to_toml(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig {
            reps: 40,
            ..Default::default()
        };
        c.estimation.q_from = 0.0;
        c.estimation.q_to = 0.2;
        c.estimation.q_step = 0.1;
        c.estimation.swept_types = vec![];
        c
    }

    #[test]
    fn zero_activity_costs_phase1_and_broadcast() {
        let rows = estimation_sweep(&small()).unwrap();
        let m1 = rows.iter().find(|r| r.q == 0.0 && r.protocol == "method1").unwrap();
        // (T-1) t + ⌈t/S_W⌉ with T = 4, t = 18
        assert_eq!(m1.mean_slots, 3.0 * 18.0 + 4.0);
        assert_eq!(m1.std_err, 0.0);
    }

    #[test]
    fn baseline_is_flat_in_q() {
        let rows = estimation_sweep(&small()).unwrap();
        for r in rows.iter().filter(|r| r.protocol == "repeated-lof") {
            assert_eq!(r.mean_slots, 4.0 * 18.0);
        }
    }

    #[test]
    fn sweep_is_deterministic_across_thread_counts() {
        let c = small();
        let a = estimation_sweep(&c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimation_sweep(&c)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_id_hashing_runs() {
        let mut c = small();
        c.estimation.hashing = HashingMode::FixedId;
        let rows = estimation_sweep(&c).unwrap();
        assert_eq!(rows.len(), 9);
    }
}
