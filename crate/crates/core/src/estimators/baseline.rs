use crate::population::HashAssignment;
use crate::slot::Symbol;

use super::{finish, probe, EstimateRun, EstimatorKind, Phase, TraceMode};

/// One LoF pass per type; every pass uses the shared bitmap length.
pub(super) fn repeated_lof(a: &HashAssignment, mode: TraceMode) -> EstimateRun {
    let t = a.bitmap_len();
    let counts = a.block_counts();
    let mut trace = mode.new_trace();
    let mut bits = Vec::with_capacity(counts.len());
    for row in &counts {
        let mut bm = vec![false; t as usize];
        for i in 0..t {
            let o = probe(&mut trace, Phase::Lof, i, &[(Symbol::Alpha, row[i as usize])]);
            bm[i as usize] = !o.is_empty();
        }
        bits.push(bm);
    }
    finish(EstimatorKind::RepeatedLof, bits, trace, 0, 0)
}
