use crate::error::{Error, Result};
use crate::population::HashAssignment;
use crate::slot::{SlotOutcome, Symbol};

use super::decoder::{summarize, DecodedBlock, Multiplicity};
use super::{
    apply_verdicts, finish, forward_counts, probe, EstimateRun, EstimatorKind, Estimators, Phase,
    Protocol, TraceMode,
};

/// Type-1 multiplicity revealed by a single-sender probe.
pub(super) fn probe_multiplicity(o: SlotOutcome) -> Multiplicity {
    match o {
        SlotOutcome::Empty => Multiplicity::Zero,
        SlotOutcome::Collision => Multiplicity::TwoPlus,
        SlotOutcome::Alpha | SlotOutcome::Beta => Multiplicity::One,
    }
}

/// Keep the hypotheses in which local row `k` has multiplicity `m`.
pub(super) fn condition(d: &DecodedBlock, k: usize, m: Multiplicity) -> DecodedBlock {
    let profiles = d.profiles.iter().filter(|p| p[k] == m).cloned().collect();
    summarize(d.verdicts.len(), profiles)
}

impl Estimators {
    pub(super) fn method1(&self, a: &HashAssignment, mode: TraceMode) -> Result<EstimateRun> {
        self.method1_as(EstimatorKind::Method1, a, mode)
    }

    pub(super) fn method1_as(
        &self,
        kind: EstimatorKind,
        a: &HashAssignment,
        mode: TraceMode,
    ) -> Result<EstimateRun> {
        let types = self.type_count;
        let all: Vec<usize> = (0..types).collect();
        let t = a.bitmap_len();
        let s_w = self.config.s_w;
        let counts = a.block_counts();
        let dec = self.decoder(Protocol::Method1, types);
        let mut trace = mode.new_trace();
        let mut bits = vec![vec![false; t as usize]; types];

        // phase 1: one block of T-1 slots per hash value
        let mut c1: Vec<(u32, &DecodedBlock)> = Vec::new();
        for i in 0..t {
            let col: Vec<u64> = counts.iter().map(|c| c[i as usize]).collect();
            let out = forward_counts(dec.matrix(), &col);
            for &o in &out {
                trace.push(Phase::Phase1, Some(i), Some(o));
            }
            let d = dec.decode(&out)?;
            if d.is_resolved() {
                let mut colbits = vec![false; types];
                apply_verdicts(d, &all, &mut colbits);
                set_column(&mut bits, i, &colbits);
            } else {
                c1.push((i, d));
            }
        }
        trace.push_broadcast(t.div_ceil(s_w));

        // phase 2: Type 1 alone, one slot per block in C_I
        let mut c2: Vec<u32> = Vec::new();
        for &(i, d) in &c1 {
            let o = probe(&mut trace, Phase::Phase2, i, &[(Symbol::Alpha, counts[0][i as usize])]);
            let d2 = condition(d, 0, probe_multiplicity(o));
            if d2.profiles.is_empty() {
                return Err(Error::ProtocolViolation {
                    outcome: vec![o],
                    types,
                });
            }
            if d2.is_resolved() {
                let mut colbits = vec![false; types];
                apply_verdicts(&d2, &all, &mut colbits);
                set_column(&mut bits, i, &colbits);
            } else {
                c2.push(i);
            }
        }
        trace.push_broadcast((c1.len() as u32).div_ceil(s_w));

        // phase 3: Types 2..T take turns within each block of C_II
        for &i in &c2 {
            bits[0][i as usize] = true;
            for (b, row) in counts.iter().enumerate().skip(1) {
                let o = probe(&mut trace, Phase::Phase3, i, &[(Symbol::Alpha, row[i as usize])]);
                bits[b][i as usize] = !o.is_empty();
            }
        }

        Ok(finish(kind, bits, trace, c1.len() as u32, c2.len() as u32))
    }
}

pub(super) fn set_column(bits: &mut [Vec<bool>], i: u32, col: &[bool]) {
    for (row, &v) in bits.iter_mut().zip(col) {
        row[i as usize] = v;
    }
}
