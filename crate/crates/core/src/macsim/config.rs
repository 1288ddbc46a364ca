use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::ids::bitmap_len;
use crate::population::HashingMode;

use super::cdtw::{CdtwRules, GrantRule};
use super::channel::ChannelModel;

/// Recipient of released contention-window slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReassignPolicy {
    /// Back to unserved nodes of the class that owned the channel; what
    /// remains goes to the class with the longest backlog.
    SameClass,
    /// The class with the most queued packets among unserved nodes.
    LongestBacklog,
    /// Classes in priority order, emergency first.
    Priority,
    /// Released slots stay unused.
    Off,
}

/// Frame geometry, traffic and protocol parameters of the MAC simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MacConfig {
    /// Licensed channel count `M_T`.
    pub channels: usize,
    /// PU-presence probabilities; when empty, `channels` values evenly
    /// spaced over `[z_min, z_max]` are used.
    pub z: Vec<f64>,
    pub z_min: f64,
    pub z_max: f64,
    /// Nodes per class `N`.
    pub nodes_per_class: usize,
    pub slots_per_frame: u32,
    pub sensing_slots: u32,
    /// Longest free-list scan before nodes give up for the frame.
    pub bw1_cap: u32,
    pub bw2_slots: u32,
    /// `(w_e, w_p, w_n)`.
    pub weights: [f64; 3],
    /// `(k_e, k_p, k_n)`.
    pub caps: [u32; 3],
    /// Mean Poisson arrivals per node per frame.
    pub lambda: [f64; 3],
    pub estimator: EstimatorKind,
    pub s_w: u32,
    /// LoF bitmap length; `⌈log2 N⌉` when unset.
    pub bitmap_len: Option<u32>,
    pub hashing: HashingMode,
    /// Consecutive empty UL slots that end contention on a channel.
    pub release_after_empty: Option<u32>,
    pub grant: GrantRule,
    /// Who receives slots released by the empty-slot rule.
    pub reassign: ReassignPolicy,
    pub gamma_i: f64,
    pub gamma_t: f64,
    pub gamma_r: f64,
}

impl Default for MacConfig {
    fn default() -> Self {
        Self {
            channels: 30,
            z: Vec::new(),
            z_min: 0.6,
            z_max: 0.95,
            nodes_per_class: 50,
            slots_per_frame: 50,
            sensing_slots: 1,
            bw1_cap: 5,
            bw2_slots: 2,
            weights: [1.0; 3],
            caps: [1; 3],
            lambda: [0.1; 3],
            estimator: EstimatorKind::Method1,
            s_w: 5,
            bitmap_len: None,
            hashing: HashingMode::Redraw,
            release_after_empty: Some(3),
            grant: GrantRule::Truncate,
            reassign: ReassignPolicy::SameClass,
            gamma_i: 0.1,
            gamma_t: 1.0,
            gamma_r: 0.5,
        }
    }
}

impl MacConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_class == 0 {
            return Err(Error::invalid("nodes_per_class must be positive"));
        }
        if !self.z.is_empty() && self.z.len() != self.channels {
            return Err(Error::invalid("z must list one value per channel"));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::invalid("weights must be positive"));
        }
        if !(self.weights[0] >= self.weights[1] && self.weights[1] >= self.weights[2]) {
            return Err(Error::invalid("weights must satisfy w_e ≥ w_p ≥ w_n"));
        }
        if self.caps.contains(&0) {
            return Err(Error::invalid("reservation caps must be at least 1"));
        }
        if self.lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::invalid("arrival rates must be nonnegative"));
        }
        if self.s_w == 0 {
            return Err(Error::invalid("s_w must be at least 1"));
        }
        if self.bitmap_len == Some(0) {
            return Err(Error::invalid("bitmap_len must be at least 1"));
        }
        let fixed = self.sensing_slots + self.bw2_slots + 2;
        if self.slots_per_frame <= fixed {
            return Err(Error::invalid(format!(
                "a {}-slot frame leaves no contention window",
                self.slots_per_frame
            )));
        }
        if [self.gamma_i, self.gamma_t, self.gamma_r]
            .iter()
            .any(|g| !g.is_finite() || *g < 0.0)
        {
            return Err(Error::invalid("energy rates must be nonnegative"));
        }
        self.channel_model().map(|_| ())
    }

    pub fn channel_model(&self) -> Result<ChannelModel> {
        if self.z.is_empty() {
            ChannelModel::evenly_spaced(self.channels, self.z_min, self.z_max)
        } else {
            ChannelModel::new(&self.z)
        }
    }

    pub fn bitmap_len(&self) -> u32 {
        self.bitmap_len
            .unwrap_or_else(|| bitmap_len(self.nodes_per_class as u64))
    }

    pub fn rules(&self) -> CdtwRules {
        CdtwRules {
            release_after_empty: self.release_after_empty,
            grant: self.grant,
        }
    }
}
