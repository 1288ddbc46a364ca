//! Method II: compact phase-1 symbol patterns, then a second phase that
//! resolves each block's leftover ambiguity, recursing on type groups.

use crate::error::{Error, Result};
use crate::population::HashAssignment;
use crate::slot::{SlotOutcome, Symbol};

use super::method1::{condition, probe_multiplicity, set_column};
use super::{
    apply_verdicts, finish, forward_counts, probe, Ambiguity, EstimateRun, EstimatorKind,
    Estimators, Phase, Protocol, SlotTrace, TraceMode,
};

/// Per-block state threaded through the second-phase recursion.
struct Block<'a> {
    index: u32,
    /// Active nodes per global type in this block.
    counts: &'a [u64],
    /// Reconstructed bits per global type.
    bits: Vec<bool>,
}

impl Estimators {
    pub(super) fn method2(&self, a: &HashAssignment, mode: TraceMode) -> Result<EstimateRun> {
        let types = self.type_count;
        if types < 4 {
            return self.method1_as(EstimatorKind::Method2, a, mode);
        }
        let all: Vec<usize> = (0..types).collect();
        let t = a.bitmap_len();
        let counts = a.block_counts();
        let columns: Vec<Vec<u64>> = (0..t as usize)
            .map(|i| counts.iter().map(|c| c[i]).collect())
            .collect();
        let dec = self.decoder(Protocol::Method2, types);
        let mut trace = mode.new_trace();
        let mut bits = vec![vec![false; t as usize]; types];

        let mut pending = Vec::new();
        for (i, col) in columns.iter().enumerate() {
            let out = forward_counts(dec.matrix(), col);
            for &o in &out {
                trace.push(Phase::Phase1, Some(i as u32), Some(o));
            }
            let d = dec.decode(&out)?;
            let mut block = Block {
                index: i as u32,
                counts: col,
                bits: vec![false; types],
            };
            apply_verdicts(d, &all, &mut block.bits);
            if d.is_resolved() {
                set_column(&mut bits, i as u32, &block.bits);
            } else {
                pending.push((block, d.ambiguity.clone()));
            }
        }
        trace.push_broadcast(self.method2_bp_len(t));

        let second = pending.len() as u32;
        for (mut block, ambiguity) in pending {
            for amb in &ambiguity {
                self.resolve(amb, &mut block, &mut trace)?;
            }
            set_column(&mut bits, block.index, &block.bits);
        }
        Ok(finish(EstimatorKind::Method2, bits, trace, second, 0))
    }

    fn resolve(&self, amb: &Ambiguity, block: &mut Block, trace: &mut SlotTrace) -> Result<()> {
        match amb {
            Ambiguity::Independent(b) => {
                self.probe_one(*b, block, trace);
                Ok(())
            }
            Ambiguity::ExactlyOneOf(group) => resolve_one_of(group, block, trace),
            Ambiguity::Joint(group) => {
                let (left, right) = group.split_at(group.len().div_ceil(2));
                self.resolve_group(left, block, trace)?;
                self.resolve_group(right, block, trace)
            }
        }
    }

    fn probe_one(&self, b: usize, block: &mut Block, trace: &mut SlotTrace) {
        let o = probe(trace, Phase::Phase2, block.index, &[(Symbol::Alpha, block.counts[b])]);
        block.bits[b] = !o.is_empty();
    }

    /// Run the full scheme for a subgroup of types within one block.
    fn resolve_group(&self, group: &[usize], block: &mut Block, trace: &mut SlotTrace) -> Result<()> {
        match group.len() {
            0 => Ok(()),
            1 => {
                self.probe_one(group[0], block, trace);
                Ok(())
            }
            2 | 3 => self.nested_method1(group, block, trace),
            _ => self.nested_method2(group, block, trace),
        }
    }

    fn nested_broadcast(&self, bits: u32, trace: &mut SlotTrace) {
        if self.config.nested_broadcasts {
            trace.push_broadcast(bits.div_ceil(self.config.s_w).max(1));
        }
    }

    fn nested_method1(&self, group: &[usize], block: &mut Block, trace: &mut SlotTrace) -> Result<()> {
        let dec = self.decoder(Protocol::Method1, group.len());
        let sub: Vec<u64> = group.iter().map(|&b| block.counts[b]).collect();
        let out = forward_counts(dec.matrix(), &sub);
        for &o in &out {
            trace.push(Phase::Phase2, Some(block.index), Some(o));
        }
        let d = dec.decode(&out)?;
        apply_verdicts(d, group, &mut block.bits);
        if d.is_resolved() {
            return Ok(());
        }
        self.nested_broadcast(1, trace);
        let o = probe(
            trace,
            Phase::Phase2,
            block.index,
            &[(Symbol::Alpha, block.counts[group[0]])],
        );
        let d2 = condition(d, 0, probe_multiplicity(o));
        apply_verdicts(&d2, group, &mut block.bits);
        if d2.is_resolved() {
            return Ok(());
        }
        self.nested_broadcast(1, trace);
        for &b in &group[1..] {
            self.probe_one(b, block, trace);
        }
        Ok(())
    }

    fn nested_method2(&self, group: &[usize], block: &mut Block, trace: &mut SlotTrace) -> Result<()> {
        let dec = self.decoder(Protocol::Method2, group.len());
        let sub: Vec<u64> = group.iter().map(|&b| block.counts[b]).collect();
        let out = forward_counts(dec.matrix(), &sub);
        for &o in &out {
            trace.push(Phase::Phase2, Some(block.index), Some(o));
        }
        let d = dec.decode(&out)?;
        apply_verdicts(d, group, &mut block.bits);
        if d.is_resolved() {
            return Ok(());
        }
        self.nested_broadcast(self.not_sure_bits[group.len()], trace);
        for amb in &d.ambiguity {
            let global = match amb {
                Ambiguity::Independent(k) => Ambiguity::Independent(group[*k]),
                Ambiguity::ExactlyOneOf(g) => {
                    Ambiguity::ExactlyOneOf(g.iter().map(|&k| group[k]).collect())
                }
                Ambiguity::Joint(g) => Ambiguity::Joint(g.iter().map(|&k| group[k]).collect()),
            };
            self.resolve(&global, block, trace)?;
        }
        Ok(())
    }
}

/// Exactly one type of `group` is active. The first two members answer with
/// α and β, a third stays silent; longer groups are walked two at a time.
fn resolve_one_of(group: &[usize], block: &mut Block, trace: &mut SlotTrace) -> Result<()> {
    let mut rest = group;
    loop {
        let take = if rest.len() <= 3 { rest.len() } else { 2 };
        let (chunk, tail) = rest.split_at(take);
        let senders: Vec<(Symbol, u64)> = chunk
            .iter()
            .zip([Symbol::Alpha, Symbol::Beta])
            .map(|(&b, s)| (s, block.counts[b]))
            .collect();
        let o = probe(trace, Phase::Phase2, block.index, &senders);
        let winner = match o {
            SlotOutcome::Alpha => Some(chunk[0]),
            SlotOutcome::Beta => Some(chunk[1]),
            SlotOutcome::Empty if tail.is_empty() && chunk.len() == 3 => Some(chunk[2]),
            SlotOutcome::Empty if !tail.is_empty() => None,
            _ => {
                return Err(Error::ProtocolViolation {
                    outcome: vec![o],
                    types: group.len(),
                })
            }
        };
        if let Some(w) = winner {
            for &b in group {
                block.bits[b] = b == w;
            }
            return Ok(());
        }
        rest = tail;
    }
}
