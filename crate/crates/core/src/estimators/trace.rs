//! Slot-level record of one estimation run.

use std::fmt;
use std::io::Write;

use crate::error::Result;
use crate::slot::SlotOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// One pass of the single-type LoF protocol.
    Lof,
    Phase1,
    /// Broadcast packet sent by the base station; no node transmits.
    Broadcast,
    Phase2,
    Phase3,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Lof => "lof",
            Phase::Phase1 => "phase1",
            Phase::Broadcast => "bp",
            Phase::Phase2 => "phase2",
            Phase::Phase3 => "phase3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotRecord {
    pub phase: Phase,
    /// Block (hash value) the slot serves; `None` for broadcast slots.
    pub block: Option<u32>,
    /// Uplink outcome; `None` for broadcast slots.
    pub outcome: Option<SlotOutcome>,
}

/// Slots in transmission order. Position `k` is logical slot `k + 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlotTrace {
    records: Vec<SlotRecord>,
    enabled: bool,
    len: u32,
    per_phase: [u32; 5],
}

impl SlotTrace {
    pub fn recording() -> Self {
        Self {
            enabled: true,
            ..Self::default()
        }
    }

    /// Counts slots without storing them.
    pub fn counting() -> Self {
        Self::default()
    }

    pub fn push(&mut self, phase: Phase, block: Option<u32>, outcome: Option<SlotOutcome>) {
        self.len += 1;
        self.per_phase[phase as usize] += 1;
        if self.enabled {
            self.records.push(SlotRecord {
                phase,
                block,
                outcome,
            });
        }
    }

    pub fn push_broadcast(&mut self, slots: u32) {
        for _ in 0..slots {
            self.push(Phase::Broadcast, None, None);
        }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn slots_in(&self, phase: Phase) -> u32 {
        self.per_phase[phase as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn records(&self) -> &[SlotRecord] {
        &self.records
    }

    pub fn is_recording(&self) -> bool {
        self.enabled
    }

    /// CSV with columns `slot,phase,channel_slot,block,outcome`. With
    /// `channels > 1` the logical slot `k` sits on channel
    /// `((k-1) mod channels) + 1`.
    pub fn write_csv<W: Write>(&self, out: W, channels: u32) -> Result<()> {
        let channels = channels.max(1);
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["slot", "phase", "channel", "time_slot", "block", "outcome"])?;
        for (k, r) in self.records.iter().enumerate() {
            let slot = k as u32 + 1;
            w.write_record([
                slot.to_string(),
                r.phase.to_string(),
                ((slot - 1) % channels + 1).to_string(),
                slot.div_ceil(channels).to_string(),
                r.block.map(|b| b.to_string()).unwrap_or_default(),
                r.outcome.map(|o| o.code().to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_trace_tracks_length_only() {
        let mut t = SlotTrace::counting();
        t.push(Phase::Phase1, Some(0), Some(SlotOutcome::Empty));
        t.push_broadcast(2);
        assert_eq!(t.len(), 3);
        assert_eq!(t.slots_in(Phase::Broadcast), 2);
        assert_eq!(t.slots_in(Phase::Phase1), 1);
        assert!(t.records().is_empty());
    }

    #[test]
    fn csv_layout() {
        let mut t = SlotTrace::recording();
        t.push(Phase::Phase1, Some(0), Some(SlotOutcome::Collision));
        t.push_broadcast(1);
        t.push(Phase::Phase2, Some(0), Some(SlotOutcome::Alpha));
        let mut buf = Vec::new();
        t.write_csv(&mut buf, 2).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "slot,phase,channel,time_slot,block,outcome\n1,phase1,1,1,0,C\n2,bp,2,1,,\n3,phase2,1,2,0,a\n"
        );
    }
}
