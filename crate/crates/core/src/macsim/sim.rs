//! Multi-frame runs, batch-means summaries and CSV output.

use std::io::Write;

use flate2::write::GzEncoder;
use flate2::Compression;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{batch_means, SampleMean};

use super::frame::{FrameMetrics, SimState, TraceEvent};
use super::{MacClass, MacConfig, SimMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub frames: u64,
    /// Leading frames excluded from the summaries.
    pub warmup: u64,
    pub batches: usize,
    pub record_trace: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            frames: 2000,
            warmup: 200,
            batches: 20,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassSummary {
    pub class: MacClass,
    /// Delivered packets per node per frame.
    pub throughput: SampleMean,
    /// Frames from arrival to delivery, averaged over delivered packets.
    pub delay: SampleMean,
    /// Energy per node per frame in γ units.
    pub energy: SampleMean,
    pub successes: SampleMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub mode: SimMode,
    pub frames: Vec<FrameMetrics>,
    pub summary: [ClassSummary; 3],
}

/// Runs `frames` frames from a fresh state.
pub fn run_simulation(config: &MacConfig, mode: SimMode, options: SimOptions, seed: u64) -> Result<SimulationResult> {
    if options.frames == 0 || options.warmup >= options.frames {
        return Err(Error::invalid("need at least one frame after warm-up"));
    }
    let mut state = SimState::new(config.clone(), seed)?;
    let mut frames = Vec::with_capacity(options.frames as usize);
    for _ in 0..options.frames {
        frames.push(state.run_frame(mode, options.record_trace)?);
    }
    let kept = &frames[options.warmup as usize..];
    let gammas = (config.gamma_i, config.gamma_t, config.gamma_r);
    let n = config.nodes_per_class as f64;
    let summary = MacClass::ALL.map(|class| {
        let c = class.index();
        let series = |f: &dyn Fn(&FrameMetrics) -> f64| -> Vec<f64> { kept.iter().map(f).collect() };
        let throughput = series(&|m| m.classes[c].deliveries as f64 / n);
        let energy = series(&|m| m.classes[c].activity.energy(gammas.0, gammas.1, gammas.2) / n);
        let successes = series(&|m| m.classes[c].successes as f64);
        ClassSummary {
            class,
            throughput: batch_means(&throughput, options.batches),
            delay: delay_batches(kept, c, options.batches),
            energy: batch_means(&energy, options.batches),
            successes: batch_means(&successes, options.batches),
        }
    });
    Ok(SimulationResult {
        mode,
        frames,
        summary,
    })
}

/// Ratio-of-sums delay per batch; batches without deliveries are skipped.
fn delay_batches(frames: &[FrameMetrics], c: usize, batches: usize) -> SampleMean {
    let size = (frames.len() / batches.max(1)).max(1);
    let ratios: Vec<f64> = frames
        .chunks_exact(size)
        .take(batches.max(1))
        .filter_map(|chunk| {
            let d: u64 = chunk.iter().map(|m| m.classes[c].deliveries).sum();
            let s: u64 = chunk.iter().map(|m| m.classes[c].delay_sum).sum();
            (d > 0).then(|| s as f64 / d as f64)
        })
        .collect();
    SampleMean::from_samples(&ratios)
}

#[derive(Serialize)]
struct FrameRow {
    frame: u64,
    class: MacClass,
    arrivals: u64,
    deliveries: u64,
    successes: u64,
    mean_delay: Option<f64>,
    #[serde(rename = "energy_T")]
    energy_t: f64,
    #[serde(rename = "energy_R")]
    energy_r: f64,
    #[serde(rename = "energy_I")]
    energy_i: f64,
}

/// Per-frame metrics, one row per class.
pub fn write_frame_csv<W: Write>(out: W, result: &SimulationResult, config: &MacConfig) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for m in &result.frames {
        for class in MacClass::ALL {
            let c = &m.classes[class.index()];
            w.serialize(FrameRow {
                frame: m.frame,
                class,
                arrivals: c.arrivals,
                deliveries: c.deliveries,
                successes: c.successes,
                mean_delay: (c.deliveries > 0).then(|| c.delay_sum as f64 / c.deliveries as f64),
                energy_t: c.activity.transmit * config.gamma_t,
                energy_r: c.activity.receive * config.gamma_r,
                energy_i: c.activity.idle * config.gamma_i,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TraceRow {
    frame: u64,
    channel: usize,
    slot: u32,
    kind: super::cdtw::SlotKind,
    outcome: Option<char>,
    node: Option<usize>,
}

/// Slot-level events as gzip-compressed CSV.
pub fn write_trace_gz<W: Write>(out: W, events: impl IntoIterator<Item = TraceEvent>) -> Result<()> {
    let gz = GzEncoder::new(out, Compression::default());
    let mut w = csv::Writer::from_writer(gz);
    for e in events {
        w.serialize(TraceRow {
            frame: e.frame,
            channel: e.channel,
            slot: e.slot,
            kind: e.kind,
            outcome: e.outcome.map(|o| o.code()),
            node: e.node,
        })?;
    }
    let gz = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    gz.finish()?;
    Ok(())
}
