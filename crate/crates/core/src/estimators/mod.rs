//! Cardinality estimators for `T` traffic types sharing one channel.
//!
//! All three protocols consume a [`HashAssignment`] and are deterministic
//! given it, so they can be compared on identical realizations.

mod baseline;
pub mod decoder;
pub mod lof;
pub mod matrix;
mod method1;
mod method2;
pub mod trace;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::{HashAssignment, HashingMode, NodePopulation};
use crate::slot::{SlotOutcome, SlotTally, Symbol};

pub use decoder::{
    decode_block, forward_counts, Ambiguity, BlockDecoder, DecodedBlock, Multiplicity, Verdict,
};
pub use lof::{lof_estimate, lof_slots, run_lof, Bitmap, LofEstimate, LofRun, LOF_SCALE};
pub use matrix::{symbol_matrix, Protocol, SymbolMatrix};
pub use trace::{Phase, SlotRecord, SlotTrace};

/// Which estimator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Method1,
    Method2,
    /// One LoF pass per type, back to back.
    RepeatedLof,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [
        EstimatorKind::Method1,
        EstimatorKind::Method2,
        EstimatorKind::RepeatedLof,
    ];
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorKind::Method1 => "method1",
            EstimatorKind::Method2 => "method2",
            EstimatorKind::RepeatedLof => "repeated-lof",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorConfig {
    /// Broadcast-packet bits that fit in one slot.
    pub s_w: u32,
    /// Charge a broadcast slot between the phases of every nested
    /// sub-scheme inside Method II's second phase.
    pub nested_broadcasts: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            s_w: 5,
            nested_broadcasts: false,
        }
    }
}

/// Per-type estimates plus slot accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub kind: EstimatorKind,
    pub rho: Vec<u32>,
    pub n_hat: Vec<f64>,
    pub slots_phase1: u32,
    pub slots_bp: u32,
    pub slots_phase2: u32,
    pub slots_phase3: u32,
    pub slots_total: u32,
    /// Blocks needing a second phase (`|C_I|` for Method I).
    pub second_phase_blocks: u32,
    /// Method I blocks needing a third phase (`|C_II|`).
    pub third_phase_blocks: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRun {
    pub report: EstimateReport,
    /// Reconstructed `B(b, i)`.
    pub bits: Vec<Vec<bool>>,
    pub trace: SlotTrace,
}

/// Whether a run keeps the per-slot records or only counts them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Record,
    CountOnly,
}

impl TraceMode {
    fn new_trace(self) -> SlotTrace {
        match self {
            TraceMode::Record => SlotTrace::recording(),
            TraceMode::CountOnly => SlotTrace::counting(),
        }
    }
}

/// Estimators for a fixed type count, with decode tables built once.
#[derive(Debug, Clone)]
pub struct Estimators {
    type_count: usize,
    config: EstimatorConfig,
    /// `method1[k]` / `method2[k]` decode a group of `k` types.
    method1: Vec<Option<BlockDecoder>>,
    method2: Vec<Option<BlockDecoder>>,
    /// `not_sure_bits[k]`: bits per block in the Method II broadcast.
    not_sure_bits: Vec<u32>,
}

impl Estimators {
    pub fn new(type_count: usize, config: EstimatorConfig) -> Result<Self> {
        if type_count < 2 {
            return Err(Error::invalid(format!(
                "estimators need at least 2 types, got {type_count}"
            )));
        }
        if config.s_w < 1 {
            return Err(Error::invalid("S_W must be at least 1"));
        }
        let mut method1 = vec![None; type_count + 1];
        let mut method2 = vec![None; type_count + 1];
        let mut not_sure_bits = vec![0; type_count + 1];
        for k in 2..=type_count {
            method1[k] = Some(BlockDecoder::new(symbol_matrix(Protocol::Method1, k)?)?);
            if k >= 4 {
                let d = BlockDecoder::new(symbol_matrix(Protocol::Method2, k)?)?;
                not_sure_bits[k] = d.bits_per_block();
                method2[k] = Some(d);
            }
        }
        Ok(Self {
            type_count,
            config,
            method1,
            method2,
            not_sure_bits,
        })
    }

    pub fn type_count(&self) -> usize {
        self.type_count
    }

    pub fn config(&self) -> EstimatorConfig {
        self.config
    }

    /// `b(T)`: bits naming one not-sure set in the Method II broadcast.
    pub fn not_sure_bits(&self) -> u32 {
        self.not_sure_bits[self.type_count]
    }

    /// Method II broadcast length in slots for a bitmap of `t` blocks.
    pub fn method2_bp_len(&self, t: u32) -> u32 {
        if self.type_count < 4 {
            t.div_ceil(self.config.s_w)
        } else {
            (self.not_sure_bits() * t).div_ceil(self.config.s_w)
        }
    }

    pub fn run(&self, kind: EstimatorKind, a: &HashAssignment, mode: TraceMode) -> Result<EstimateRun> {
        self.check(a)?;
        match kind {
            EstimatorKind::Method1 => self.method1(a, mode),
            EstimatorKind::Method2 => self.method2(a, mode),
            EstimatorKind::RepeatedLof => Ok(baseline::repeated_lof(a, mode)),
        }
    }

    fn check(&self, a: &HashAssignment) -> Result<()> {
        if a.type_count() != self.type_count {
            return Err(Error::invalid(format!(
                "assignment has {} types, estimators built for {}",
                a.type_count(),
                self.type_count
            )));
        }
        Ok(())
    }

    fn decoder(&self, protocol: Protocol, k: usize) -> &BlockDecoder {
        let table = match protocol {
            Protocol::Method2 if k >= 4 => &self.method2,
            _ => &self.method1,
        };
        table[k].as_ref().expect("decoder built for every group size")
    }
}

/// Method I on a hash assignment.
pub fn run_method1(a: &HashAssignment, s_w: u32) -> Result<EstimateRun> {
    Estimators::new(a.type_count(), EstimatorConfig { s_w, ..Default::default() })?
        .run(EstimatorKind::Method1, a, TraceMode::Record)
}

/// Method II on a hash assignment.
pub fn run_method2(a: &HashAssignment, s_w: u32) -> Result<EstimateRun> {
    Estimators::new(a.type_count(), EstimatorConfig { s_w, ..Default::default() })?
        .run(EstimatorKind::Method2, a, TraceMode::Record)
}

/// `T` sequential LoF passes on a hash assignment.
pub fn run_t_lof_baseline(a: &HashAssignment) -> EstimateRun {
    baseline::repeated_lof(a, TraceMode::Record)
}

/// Draw activity and hashes for a population, then estimate.
pub fn estimate_population<R: Rng + ?Sized>(
    est: &Estimators,
    kind: EstimatorKind,
    pop: &NodePopulation,
    hashing: HashingMode,
    t: u32,
    rng: &mut R,
) -> Result<EstimateRun> {
    let a = pop.hash_assignment(hashing, t, rng)?;
    est.run(kind, &a, TraceMode::CountOnly)
}

/// Transmit `senders` in one slot and log it.
fn probe(trace: &mut SlotTrace, phase: Phase, block: u32, senders: &[(Symbol, u64)]) -> SlotOutcome {
    let mut tally = SlotTally::default();
    for &(s, n) in senders {
        tally.add(s, n);
    }
    let o = tally.outcome();
    trace.push(phase, Some(block), Some(o));
    o
}

fn finish(kind: EstimatorKind, bits: Vec<Vec<bool>>, trace: SlotTrace, second: u32, third: u32) -> EstimateRun {
    let estimates: Vec<LofEstimate> = bits
        .iter()
        .map(|row| lof_estimate(&Bitmap::new(row.clone())))
        .collect();
    let report = EstimateReport {
        kind,
        rho: estimates.iter().map(|e| e.rho).collect(),
        n_hat: estimates.iter().map(|e| e.n_hat).collect(),
        slots_phase1: trace.slots_in(Phase::Phase1) + trace.slots_in(Phase::Lof),
        slots_bp: trace.slots_in(Phase::Broadcast),
        slots_phase2: trace.slots_in(Phase::Phase2),
        slots_phase3: trace.slots_in(Phase::Phase3),
        slots_total: trace.len(),
        second_phase_blocks: second,
        third_phase_blocks: third,
    };
    EstimateRun { report, bits, trace }
}

/// Write verdict bits of a fully resolved block. `types[k]` is the global
/// type of local row `k`.
fn apply_verdicts(d: &DecodedBlock, types: &[usize], col: &mut [bool]) {
    for (k, &b) in types.iter().enumerate() {
        match d.verdicts[k] {
            Verdict::Active => col[b] = true,
            Verdict::Inactive => col[b] = false,
            Verdict::Ambiguous => {}
        }
    }
}
