//! One channel's contention and data transmission window.
//!
//! UL/DL pairs are taken from the left of the window and granted data slots
//! from the right. A pair runs only if both its slots still fit next to the
//! reserved slots. After each granted success the estimate drops by one and
//! the contention probability becomes `min(1/(n̂ - j), 1)`.

use rand::Rng;
use serde::Serialize;

use crate::slot::SlotOutcome;
use crate::stats::SampleMean;

/// How a success is sized when the window is nearly full.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrantRule {
    /// Grant what still fits, at least one slot.
    Truncate,
    /// Grant the full request or nothing.
    WholeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CdtwRules {
    /// Stop after this many consecutive empty UL slots and release the rest.
    pub release_after_empty: Option<u32>,
    pub grant: GrantRule,
}

impl Default for CdtwRules {
    fn default() -> Self {
        Self {
            release_after_empty: Some(3),
            grant: GrantRule::Truncate,
        }
    }
}

impl CdtwRules {
    /// Constant-`d` reservations with no early release.
    pub fn constant_d() -> Self {
        Self {
            release_after_empty: None,
            grant: GrantRule::WholeOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contender {
    /// Caller's node handle.
    pub node: usize,
    /// Data slots wanted on success.
    pub request: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grant {
    pub node: usize,
    pub slots: u32,
    /// 1-based UL/DL pair of the success.
    pub pair: u32,
}

/// Node-slots spent in each radio state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Activity {
    pub transmit: f64,
    pub receive: f64,
    pub idle: f64,
}

impl Activity {
    pub fn add(&mut self, other: &Activity) {
        self.transmit += other.transmit;
        self.receive += other.receive;
        self.idle += other.idle;
    }

    pub fn energy(&self, gamma_i: f64, gamma_t: f64, gamma_r: f64) -> f64 {
        self.transmit * gamma_t + self.receive * gamma_r + self.idle * gamma_i
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotKind {
    Uplink,
    Downlink,
    Data,
    /// Slot held by an earlier periodic reservation.
    Reserved,
    /// Released slot handed to another channel's node.
    Reassigned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotEvent {
    /// 0-based slot within the window.
    pub slot: u32,
    pub kind: SlotKind,
    pub outcome: Option<SlotOutcome>,
    pub node: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CdtwLog {
    pub grants: Vec<Grant>,
    /// UL/DL pairs that ran.
    pub pairs: u32,
    /// Slots held by data at the end, including pre-reserved ones.
    pub reserved: u32,
    /// Slots handed back after the empty-slot rule fired.
    pub released: u32,
    pub ul: Activity,
    pub dl: Activity,
    pub data: Activity,
    pub events: Vec<SlotEvent>,
}

impl CdtwLog {
    pub fn successes(&self) -> u32 {
        self.grants.len() as u32
    }
}

/// Runs one window of `w` slots whose rightmost `pre_reserved` slots are
/// already taken. `n_hat` is the estimated contender count on this channel.
pub fn run_cdtw_channel<R: Rng + ?Sized>(
    contenders: &[Contender],
    n_hat: f64,
    w: u32,
    pre_reserved: u32,
    rules: CdtwRules,
    record: bool,
    rng: &mut R,
) -> CdtwLog {
    let n = contenders.len() as f64;
    let mut log = CdtwLog {
        reserved: pre_reserved.min(w),
        ..Default::default()
    };
    let mut waiting: Vec<Contender> = contenders.to_vec();
    let mut est = n_hat;
    let mut empties = 0;
    let mut pair = 1u32;
    let mut early = false;
    while 2 * pair + log.reserved <= w {
        let p = if est <= 1.0 { 1.0 } else { 1.0 / est };
        let senders: Vec<usize> = (0..waiting.len()).filter(|_| rng.random::<f64>() < p).collect();
        let k = senders.len() as f64;
        log.ul.transmit += k;
        log.ul.idle += n - k;
        log.dl.receive += waiting.len() as f64;
        log.dl.idle += n - waiting.len() as f64;
        let outcome = match senders.len() {
            0 => SlotOutcome::Empty,
            1 => SlotOutcome::Alpha,
            _ => SlotOutcome::Collision,
        };
        let lone = match senders[..] {
            [only] => Some(waiting[only].node),
            _ => None,
        };
        let mut winner = None;
        if let [only] = senders[..] {
            let c = waiting[only];
            let room = w - 2 * pair - log.reserved;
            let slots = match rules.grant {
                GrantRule::Truncate => c.request.min(room),
                GrantRule::WholeOnly if c.request <= room => c.request,
                GrantRule::WholeOnly => 0,
            };
            if slots > 0 {
                if record {
                    for s in 0..slots {
                        log.events.push(SlotEvent {
                            slot: w - log.reserved - 1 - s,
                            kind: SlotKind::Data,
                            outcome: None,
                            node: Some(c.node),
                        });
                    }
                }
                log.reserved += slots;
                log.grants.push(Grant {
                    node: c.node,
                    slots,
                    pair,
                });
                waiting.remove(only);
                est -= 1.0;
                winner = Some(c.node);
            }
        }
        if record {
            log.events.push(SlotEvent {
                slot: 2 * pair - 2,
                kind: SlotKind::Uplink,
                outcome: Some(outcome),
                node: lone,
            });
            log.events.push(SlotEvent {
                slot: 2 * pair - 1,
                kind: SlotKind::Downlink,
                outcome: None,
                node: winner,
            });
        }
        empties = if senders.is_empty() { empties + 1 } else { 0 };
        pair += 1;
        if rules.release_after_empty.is_some_and(|limit| empties >= limit) {
            early = true;
            break;
        }
    }
    log.pairs = pair - 1;
    if early {
        log.released = w - 2 * log.pairs - log.reserved;
    }
    let data: f64 = log.grants.iter().map(|g| g.slots as f64).sum();
    log.data.transmit = data;
    log.data.idle = data * (n - 1.0).max(0.0);
    log.events.sort_by_key(|e| e.slot);
    log
}

/// Sample means over independent single-channel windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub successes: SampleMean,
    pub ul_energy: SampleMean,
    pub dl_energy: SampleMean,
    pub data_energy: SampleMean,
}

/// `samples` windows of width `w` with `n` contenders that each ask for `d`
/// slots, no pre-reservations and [`CdtwRules::constant_d`]. Energies use
/// `gammas = (γ_I, γ_T, γ_R)`.
pub fn constant_d_window_stats<R: Rng + ?Sized>(
    n: u32,
    n_hat: f64,
    w: u32,
    d: u32,
    gammas: (f64, f64, f64),
    samples: u64,
    rng: &mut R,
) -> WindowStats {
    let contenders: Vec<Contender> = (0..n as usize).map(|node| Contender { node, request: d }).collect();
    let (gi, gt, gr) = gammas;
    let cap = samples as usize;
    let (mut m, mut ul, mut dl, mut dt) = (
        Vec::with_capacity(cap),
        Vec::with_capacity(cap),
        Vec::with_capacity(cap),
        Vec::with_capacity(cap),
    );
    for _ in 0..samples {
        let log = run_cdtw_channel(&contenders, n_hat, w, 0, CdtwRules::constant_d(), false, rng);
        m.push(log.successes() as f64);
        ul.push(log.ul.energy(gi, gt, gr));
        dl.push(log.dl.energy(gi, gt, gr));
        dt.push(log.data.energy(gi, gt, gr));
    }
    WindowStats {
        successes: SampleMean::from_samples(&m),
        ul_energy: SampleMean::from_samples(&ul),
        dl_energy: SampleMean::from_samples(&dl),
        data_energy: SampleMean::from_samples(&dt),
    }
}
