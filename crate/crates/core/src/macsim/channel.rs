//! Licensed channels, PU occupancy and the shared sorted channel list.

use rand::Rng;

use crate::error::{Error, Result};

/// Channels sorted by ascending PU-presence probability. Position `k` in the
/// sorted list is what the protocol calls `a_{k+1}`'s rank; the original
/// channel index is kept alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    sorted: Vec<(usize, f64)>,
}

impl ChannelModel {
    pub fn new(z: &[f64]) -> Result<Self> {
        if let Some(bad) = z.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("PU probability {bad} outside [0, 1]")));
        }
        let mut sorted: Vec<(usize, f64)> = z.iter().copied().enumerate().collect();
        sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        Ok(Self { sorted })
    }

    /// `count` channels with `z` evenly spaced over `[lo, hi]`.
    pub fn evenly_spaced(count: usize, lo: f64, hi: f64) -> Result<Self> {
        let z: Vec<f64> = match count {
            0 => vec![],
            1 => vec![lo],
            _ => (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect(),
        };
        Self::new(&z)
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `(original index, z)` in ascending `z`.
    pub fn sorted(&self) -> &[(usize, f64)] {
        &self.sorted
    }
}

/// Sorted positions of the channels found free this frame, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeSet {
    pub positions: Vec<usize>,
}

impl FreeSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Each channel is free independently with probability `1 - z`.
pub fn sense_channels<R: Rng + ?Sized>(model: &ChannelModel, rng: &mut R) -> FreeSet {
    let positions = model
        .sorted
        .iter()
        .enumerate()
        .filter(|(_, &(_, z))| rng.random::<f64>() >= z)
        .map(|(k, _)| k)
        .collect();
    FreeSet { positions }
}

/// Outcome of the free-list rendezvous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rendezvous {
    /// Sorted position of the first free channel, if reached.
    pub channel: Option<usize>,
    /// Slots every active node spends listening.
    pub listen_slots: u32,
}

/// Nodes scan the sorted list one slot per channel until they reach the
/// first free channel. The scan gives up after `cap` slots; nodes then
/// sleep for the frame.
pub fn broadcast_window_1(free: &FreeSet, cap: u32) -> Rendezvous {
    match free.positions.first() {
        Some(&k) if (k as u32) < cap => Rendezvous {
            channel: Some(k),
            listen_slots: k as u32 + 1,
        },
        Some(_) => Rendezvous {
            channel: None,
            listen_slots: cap,
        },
        None => Rendezvous {
            channel: None,
            listen_slots: 0,
        },
    }
}

/// Logical estimation slot `t` (1-based) runs on free channel
/// `a_{((t-1) mod M_f) + 1}` in time slot `⌈t / M_f⌉`. Both are 1-based.
pub fn schedule_estimation_slots(r_s: u32, m_f: u32) -> Result<Vec<(u32, u32)>> {
    if m_f == 0 {
        return Err(Error::invalid("estimation needs at least one free channel"));
    }
    Ok((1..=r_s)
        .map(|t| ((t - 1) % m_f + 1, t.div_ceil(m_f)))
        .collect())
}

/// Wall-clock length of the estimation window.
pub fn estimation_window_len(r_s: u32, m_f: u32) -> u32 {
    if m_f == 0 {
        0
    } else {
        r_s.div_ceil(m_f)
    }
}
