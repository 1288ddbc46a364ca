use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{write_csv, write_header, CsvTable};
use crate::error::Result;
use crate::macsim::{run_simulation, write_frame_csv, MacClass, SimMode, SimOptions, SimulationResult};
use crate::rng::{RandomSource, StreamKind, StreamLabel};

/// One sweep point in one mode.
#[derive(Debug, Clone)]
pub struct MacRun {
    pub lambda: f64,
    pub result: SimulationResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacRow {
    pub lambda: f64,
    pub class: MacClass,
    pub mode: &'static str,
    #[serde(rename = "throughput_pkts_per_node_frame")]
    pub throughput: f64,
    pub throughput_ci95: f64,
    #[serde(rename = "delay_frames")]
    pub delay: f64,
    pub delay_ci95: f64,
    #[serde(rename = "energy_per_node_frame")]
    pub energy: f64,
    pub energy_ci95: f64,
    pub source: &'static str,
}

fn mode_name(mode: SimMode) -> &'static str {
    match mode {
        SimMode::Proposed => "proposed",
        SimMode::Ideal => "ideal",
    }
}

/// Every `(λ, mode)` run, λ-major with PROPOSED first. Both modes of a
/// point share the seed, so they see the same arrivals and spectrum.
pub fn mac_sim_runs(config: &ExperimentConfig) -> Result<Vec<MacRun>> {
    let m = &config.mac;
    let options = SimOptions {
        frames: m.frames,
        warmup: m.warmup,
        batches: m.batches,
        record_trace: false,
    };
    let jobs: Vec<(usize, f64, SimMode)> = m
        .lambdas
        .iter()
        .enumerate()
        .flat_map(|(i, &l)| [SimMode::Proposed, SimMode::Ideal].map(|mode| (i, l, mode)))
        .collect();
    jobs.par_iter()
        .map(|&(i, lambda, mode)| {
            let mut protocol = m.protocol.clone();
            protocol.lambda = [lambda; 3];
            let seed = RandomSource::new(config.seed)
                .fork(StreamLabel::new(StreamKind::Replication, i as u64, 0))
                .seed();
            Ok(MacRun {
                lambda,
                result: run_simulation(&protocol, mode, options, seed)?,
            })
        })
        .collect()
}

pub fn mac_rows(runs: &[MacRun]) -> Vec<MacRow> {
    runs.iter()
        .flat_map(|run| {
            run.result.summary.iter().map(move |s| MacRow {
                lambda: run.lambda,
                class: s.class,
                mode: mode_name(run.result.mode),
                throughput: s.throughput.mean,
                throughput_ci95: s.throughput.half_width(0.95),
                delay: s.delay.mean,
                delay_ci95: s.delay.half_width(0.95),
                energy: s.energy.mean,
                energy_ci95: s.energy.half_width(0.95),
                source: "simulated",
            })
        })
        .collect()
}

/// Per-class throughput, delay and energy against λ in both modes.
pub fn mac_sim_experiment(config: &ExperimentConfig) -> Result<Vec<MacRow>> {
    Ok(mac_rows(&mac_sim_runs(config)?))
}

pub fn write_mac(dir: &Path, config: &ExperimentConfig, runs: &[MacRun]) -> Result<Vec<MacRow>> {
    let rows = mac_rows(runs);
    let resolved = config.to_toml();
    write_csv(
        &dir.join("mac_sim.csv"),
        CsvTable {
            experiment: "mac-sim",
            rows: &rows,
        },
        &resolved,
    )?;
    if config.mac.write_frames {
        for (i, run) in runs.iter().enumerate() {
            let name = format!("mac_frames_{:02}_{}.csv", i / 2, mode_name(run.result.mode));
            let mut out = BufWriter::new(File::create(dir.join(name))?);
            write_header(&mut out, &format!("mac-sim frames, lambda = {}", run.lambda), &resolved)?;
            let mut protocol = config.mac.protocol.clone();
            protocol.lambda = [run.lambda; 3];
            write_frame_csv(&mut out, &run.result, &protocol)?;
        }
    }
    Ok(rows)
}
