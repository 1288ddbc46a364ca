//! One frame: SW, BW1, EW, BW2 and the per-channel CDTWs.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::Result;
use crate::estimators::{EstimatorConfig, Estimators, TraceMode};
use crate::ids::{default_id_width, BinaryId};
use crate::population::{HashAssignment, HashingMode};
use crate::rng::{RandomSource, StreamKind};
use crate::slot::SlotOutcome;

use super::allocation::allocate_channels;
use super::cdtw::{run_cdtw_channel, Activity, Contender, SlotKind};
use super::channel::{broadcast_window_1, estimation_window_len, sense_channels, ChannelModel};
use super::{MacClass, MacConfig, ReassignPolicy, SimMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacNode {
    pub class: MacClass,
    pub id: BinaryId,
    /// Arrival frame of each queued packet, oldest first.
    pub queue: VecDeque<u64>,
    /// Future frames holding a reserved slot (periodic class).
    pub reservations: u32,
}

/// What the base station knows after the estimation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameEstimate {
    pub n_hat: [f64; 3],
    /// Logical estimation slots `R_s`.
    pub slots: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassFrame {
    pub arrivals: u64,
    pub deliveries: u64,
    pub successes: u64,
    /// Sum over delivered packets of (delivery frame - arrival frame).
    pub delay_sum: u64,
    /// Packets still queued at the end of the frame.
    pub queued: u64,
    pub activity: Activity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub frame: u64,
    /// Original channel index.
    pub channel: usize,
    /// Slot within the frame.
    pub slot: u32,
    pub kind: SlotKind,
    pub outcome: Option<SlotOutcome>,
    pub node: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameMetrics {
    pub frame: u64,
    pub free_channels: u32,
    pub estimation_slots: u32,
    pub cdtw_slots: u32,
    pub classes: [ClassFrame; 3],
    pub events: Vec<TraceEvent>,
}

/// Nodes, queues and reservations carried from frame to frame.
#[derive(Debug, Clone)]
pub struct SimState {
    config: MacConfig,
    model: ChannelModel,
    estimators: Estimators,
    nodes: Vec<MacNode>,
    source: RandomSource,
    frame: u64,
}

impl SimState {
    pub fn new(config: MacConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let model = config.channel_model()?;
        let estimators = Estimators::new(
            3,
            EstimatorConfig {
                s_w: config.s_w,
                ..Default::default()
            },
        )?;
        let source = RandomSource::new(seed);
        let width = default_id_width(3 * config.nodes_per_class as u64);
        let mut rng = source.stream_for(StreamKind::NodeIds, 0, 0);
        let mut nodes = Vec::with_capacity(3 * config.nodes_per_class);
        for class in MacClass::ALL {
            for _ in 0..config.nodes_per_class {
                nodes.push(MacNode {
                    class,
                    id: BinaryId::random(width, &mut rng)?,
                    queue: VecDeque::new(),
                    reservations: 0,
                });
            }
        }
        Ok(Self {
            config,
            model,
            estimators,
            nodes,
            source,
            frame: 0,
        })
    }

    pub fn config(&self) -> &MacConfig {
        &self.config
    }

    pub fn nodes(&self) -> &[MacNode] {
        &self.nodes
    }

    /// Index of the next frame to run.
    pub fn frame(&self) -> u64 {
        self.frame
    }

    pub fn run_frame(&mut self, mode: SimMode, record: bool) -> Result<FrameMetrics> {
        match mode {
            SimMode::Ideal => self.run_frame_with(
                |counts, _| {
                    Ok(FrameEstimate {
                        n_hat: counts.map(|c| c as f64),
                        slots: 0,
                    })
                },
                record,
            ),
            SimMode::Proposed => {
                let estimators = self.estimators.clone();
                let kind = self.config.estimator;
                let t = self.config.bitmap_len();
                let hashing = self.config.hashing;
                let src = self.source.clone();
                let frame = self.frame;
                self.run_frame_with(
                    move |_, hashes| {
                        let a = match hashing {
                            HashingMode::FixedId => HashAssignment::new(t, hashes(t))?,
                            HashingMode::Redraw => {
                                let counts: Vec<usize> = hashes(t).iter().map(Vec::len).collect();
                                let mut rng = src.stream_for(StreamKind::Hashes, 0, frame);
                                HashAssignment::redraw(&counts, t, &mut rng)?
                            }
                        };
                        let run = estimators.run(kind, &a, TraceMode::CountOnly)?;
                        Ok(FrameEstimate {
                            n_hat: [run.report.n_hat[0], run.report.n_hat[1], run.report.n_hat[2]],
                            slots: run.report.slots_total,
                        })
                    },
                    record,
                )
            }
        }
    }

    /// Runs one frame with the estimate supplied by `estimate`, which gets
    /// the true active counts and a function returning the fixed-ID hashes
    /// of the active nodes per class.
    pub fn run_frame_with<F>(&mut self, estimate: F, record: bool) -> Result<FrameMetrics>
    where
        F: FnOnce([usize; 3], &dyn Fn(u32) -> Vec<Vec<u32>>) -> Result<FrameEstimate>,
    {
        let f = self.frame;
        self.frame += 1;
        let cfg = self.config.clone();
        let mut classes = [ClassFrame::default(); 3];
        let mut events = Vec::new();

        for class in MacClass::ALL {
            let lambda = cfg.lambda[class.index()];
            if lambda <= 0.0 {
                continue;
            }
            let dist = Poisson::new(lambda).map_err(|e| crate::Error::invalid(e.to_string()))?;
            let mut rng = self.source.stream_for(StreamKind::Arrivals, class.index() as u64, f);
            for node in self.nodes.iter_mut().filter(|n| n.class == class) {
                let k = dist.sample(&mut rng) as u64;
                for _ in 0..k {
                    node.queue.push_back(f);
                }
                classes[class.index()].arrivals += k;
            }
        }

        let mut rng = self.source.stream_for(StreamKind::Sensing, 0, f);
        let free = sense_channels(&self.model, &mut rng);
        let rv = broadcast_window_1(&free, cfg.bw1_cap);
        let participant = |n: &MacNode| !n.queue.is_empty() || n.reservations > 0;
        for n in self.nodes.iter().filter(|n| participant(n)) {
            classes[n.class.index()].activity.receive += rv.listen_slots as f64;
        }
        if rv.channel.is_none() {
            return Ok(self.finish(f, 0, 0, 0, classes, events));
        }

        let active: Vec<bool> = self
            .nodes
            .iter()
            .map(|n| !n.queue.is_empty() && n.reservations == 0)
            .collect();
        let mut counts = [0usize; 3];
        for (n, _) in self.nodes.iter().zip(&active).filter(|(_, &a)| a) {
            counts[n.class.index()] += 1;
        }
        let hashes = |t: u32| -> Vec<Vec<u32>> {
            let mut per = vec![Vec::new(); 3];
            for (n, _) in self.nodes.iter().zip(&active).filter(|(_, &a)| a) {
                per[n.class.index()].push(n.id.hash().clamp_to_bins(t));
            }
            per
        };
        let est = estimate(counts, &hashes)?;
        let m_f = free.len() as u32;
        let ew = estimation_window_len(est.slots, m_f);
        let head = cfg.sensing_slots + rv.listen_slots + ew + cfg.bw2_slots;
        let w = cfg.slots_per_frame.saturating_sub(head);
        for (n, &a) in self.nodes.iter().zip(&active) {
            let c = &mut classes[n.class.index()].activity;
            if a {
                c.receive += (ew + cfg.bw2_slots) as f64;
            } else if n.reservations > 0 {
                c.receive += cfg.bw2_slots as f64;
            }
        }

        // The base station knows its own reservations, so holders count
        // toward the periodic share even though they do not contend.
        let holders = self.nodes.iter().filter(|n| n.reservations > 0).count() as f64;
        let mut demand = est.n_hat;
        demand[MacClass::Periodic.index()] += holders;
        let mut plan = allocate_channels(demand, cfg.weights, &free);
        plan.n_hat = est.n_hat;
        plan.p_hat = [0, 1, 2].map(|c| {
            if est.n_hat[c] <= 0.0 {
                1.0
            } else {
                (plan.channels[c].len() as f64 / est.n_hat[c]).min(1.0)
            }
        });
        let position_count = self.model.len();
        let mut pre_reserved = vec![0u32; position_count];
        let periodic = &plan.channels[MacClass::Periodic.index()];
        if !periodic.is_empty() {
            let mut turn = 0usize;
            for (idx, node) in self.nodes.iter_mut().enumerate() {
                if node.reservations == 0 {
                    continue;
                }
                let Some(&pos) = (0..periodic.len())
                    .map(|k| &periodic[(turn + k) % periodic.len()])
                    .find(|&&p| pre_reserved[p] < w)
                else {
                    break;
                };
                turn += 1;
                pre_reserved[pos] += 1;
                node.reservations -= 1;
                let cf = &mut classes[MacClass::Periodic.index()];
                cf.activity.transmit += 1.0;
                if let Some(arr) = node.queue.pop_front() {
                    cf.deliveries += 1;
                    cf.delay_sum += f - arr;
                }
                if record {
                    events.push(TraceEvent {
                        frame: f,
                        channel: self.model.sorted()[pos].0,
                        slot: head + w - pre_reserved[pos],
                        kind: SlotKind::Reserved,
                        outcome: None,
                        node: Some(idx),
                    });
                }
            }
        }

        let mut on_channel: Vec<Vec<Contender>> = vec![Vec::new(); position_count];
        for class in MacClass::ALL {
            let chans = &plan.channels[class.index()];
            if chans.is_empty() {
                continue;
            }
            let mut rng = self
                .source
                .stream_for(StreamKind::ChannelChoice, class.index() as u64, f);
            let cap = cfg.caps[class.index()];
            for (idx, node) in self.nodes.iter().enumerate() {
                if node.class != class || !active[idx] {
                    continue;
                }
                let pos = chans[rng.random_range(0..chans.len())];
                let request = match class {
                    MacClass::Periodic => 1,
                    _ => (node.queue.len() as u32).min(cap),
                };
                on_channel[pos].push(Contender { node: idx, request });
            }
        }

        let mut granted = vec![false; self.nodes.len()];
        let mut released = Vec::new();
        let rules = cfg.rules();
        for class in MacClass::ALL {
            let n_hat = plan.per_channel_estimate(class);
            for &pos in &plan.channels[class.index()] {
                let channel = self.model.sorted()[pos].0;
                let mut rng = self.source.stream_for(StreamKind::Contention, channel as u64, f);
                let log = run_cdtw_channel(&on_channel[pos], n_hat, w, pre_reserved[pos], rules, record, &mut rng);
                let cf = &mut classes[class.index()];
                cf.activity.add(&log.ul);
                cf.activity.add(&log.dl);
                cf.activity.add(&log.data);
                for g in &log.grants {
                    let node = &mut self.nodes[g.node];
                    granted[g.node] = true;
                    cf.successes += 1;
                    if class == MacClass::Periodic {
                        let tr = (node.queue.len() as u32).min(cfg.caps[class.index()]);
                        node.reservations = tr.saturating_sub(1);
                    }
                    for _ in 0..g.slots {
                        if let Some(arr) = node.queue.pop_front() {
                            cf.deliveries += 1;
                            cf.delay_sum += f - arr;
                        }
                    }
                }
                if log.released > 0 {
                    released.push((class.index(), channel, head + 2 * log.pairs, log.released));
                }
                if record {
                    events.extend(log.events.iter().map(|e| TraceEvent {
                        frame: f,
                        channel,
                        slot: head + e.slot,
                        kind: e.kind,
                        outcome: e.outcome,
                        node: e.node,
                    }));
                }
            }
        }

        self.reassign(f, &released, &active, &granted, &mut classes, record.then_some(&mut events));
        Ok(self.finish(f, m_f, est.slots, w, classes, events))
    }

    /// Slots released by idle channels go to nodes that got nothing this
    /// frame, longest queues first within a class; the policy picks classes.
    fn reassign(
        &mut self,
        f: u64,
        released: &[(usize, usize, u32, u32)],
        active: &[bool],
        granted: &[bool],
        classes: &mut [ClassFrame; 3],
        mut events: Option<&mut Vec<TraceEvent>>,
    ) {
        if released.is_empty() || self.config.reassign == ReassignPolicy::Off {
            return;
        }
        // per owning class, in slot order, popped from the back
        let mut pools: [Vec<(usize, u32)>; 3] = Default::default();
        for &(class, ch, start, len) in released {
            pools[class].extend((start..start + len).map(|s| (ch, s)));
        }
        for pool in &mut pools {
            pool.reverse();
        }
        let mut served = granted.to_vec();
        let mut members: [Vec<usize>; 3] = Default::default();
        for (i, n) in self.nodes.iter().enumerate() {
            if active[i] && !granted[i] && !n.queue.is_empty() {
                members[n.class.index()].push(i);
            }
        }
        for m in &mut members {
            m.sort_by_key(|&i| (std::cmp::Reverse(self.nodes[i].queue.len()), i));
        }
        let backlog = |members: &[Vec<usize>; 3], served: &[bool], nodes: &[MacNode], c: usize| {
            members[c]
                .iter()
                .filter(|&&i| !served[i])
                .map(|&i| nodes[i].queue.len())
                .sum::<usize>()
        };
        let longest = |members: &[Vec<usize>; 3], served: &[bool], nodes: &[MacNode]| {
            (0..3)
                .map(|c| (backlog(members, served, nodes, c), c))
                .filter(|&(b, _)| b > 0)
                .max_by_key(|&(b, c)| (b, std::cmp::Reverse(c)))
                .map(|(_, c)| c)
        };

        let mut shared: Vec<(usize, u32)> = Vec::new();
        let turns: Vec<usize> = match self.config.reassign {
            ReassignPolicy::Off => unreachable!(),
            ReassignPolicy::SameClass => {
                for c in 0..3 {
                    let mut pool = std::mem::take(&mut pools[c]);
                    self.serve(f, c, &members[c], &mut served, &mut pool, classes, events.as_deref_mut());
                    shared.extend(pool.into_iter().rev());
                }
                longest(&members, &served, &self.nodes).into_iter().collect()
            }
            ReassignPolicy::LongestBacklog => {
                shared = pools.iter().flat_map(|p| p.iter().rev().copied()).collect();
                longest(&members, &served, &self.nodes).into_iter().collect()
            }
            ReassignPolicy::Priority => {
                shared = pools.iter().flat_map(|p| p.iter().rev().copied()).collect();
                (0..3).collect()
            }
        };
        shared.sort_unstable_by(|a, b| b.cmp(a));
        for c in turns {
            self.serve(f, c, &members[c], &mut served, &mut shared, classes, events.as_deref_mut());
        }
    }

    /// Hands slots from the back of `pool` to unserved `members`, up to
    /// each node's per-frame cap.
    #[allow(clippy::too_many_arguments)]
    fn serve(
        &mut self,
        f: u64,
        c: usize,
        members: &[usize],
        served: &mut [bool],
        pool: &mut Vec<(usize, u32)>,
        classes: &mut [ClassFrame; 3],
        mut events: Option<&mut Vec<TraceEvent>>,
    ) {
        let cap = match MacClass::ALL[c] {
            MacClass::Periodic => 1,
            _ => self.config.caps[c],
        };
        for &i in members {
            if pool.is_empty() {
                return;
            }
            if served[i] {
                continue;
            }
            served[i] = true;
            let node = &mut self.nodes[i];
            for _ in 0..cap {
                if node.queue.is_empty() {
                    break;
                }
                let Some((ch, slot)) = pool.pop() else {
                    return;
                };
                let arr = node.queue.pop_front().expect("nonempty");
                let cf = &mut classes[c];
                cf.deliveries += 1;
                cf.delay_sum += f - arr;
                cf.activity.transmit += 1.0;
                if let Some(ev) = events.as_deref_mut() {
                    ev.push(TraceEvent {
                        frame: f,
                        channel: ch,
                        slot,
                        kind: SlotKind::Reassigned,
                        outcome: None,
                        node: Some(i),
                    });
                }
            }
        }
    }

    fn finish(
        &self,
        f: u64,
        m_f: u32,
        est_slots: u32,
        w: u32,
        mut classes: [ClassFrame; 3],
        mut events: Vec<TraceEvent>,
    ) -> FrameMetrics {
        for n in &self.nodes {
            classes[n.class.index()].queued += n.queue.len() as u64;
        }
        events.sort_by_key(|e| (e.channel, e.slot));
        FrameMetrics {
            frame: f,
            free_channels: m_f,
            estimation_slots: est_slots,
            cdtw_slots: w,
            classes,
            events,
        }
    }
}
