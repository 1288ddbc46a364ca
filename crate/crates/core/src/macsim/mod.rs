//! Frame-level simulator of the cognitive multi-channel MAC.
//!
//! Each frame runs sensing, the free-list broadcast, the estimation window,
//! the channel-plan broadcast and one contention and data window per free
//! channel.

pub mod allocation;
pub mod cdtw;
pub mod channel;
mod config;
pub mod frame;
pub mod sim;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use allocation::{allocate_channels, channel_counts, ChannelPlan};
pub use cdtw::{
    constant_d_window_stats, run_cdtw_channel, Activity, CdtwLog, CdtwRules, Contender, Grant, GrantRule,
    WindowStats,
};
pub use channel::{
    broadcast_window_1, estimation_window_len, schedule_estimation_slots, sense_channels,
    ChannelModel, FreeSet, Rendezvous,
};
pub use config::{MacConfig, ReassignPolicy};
pub use frame::{ClassFrame, FrameEstimate, FrameMetrics, MacNode, SimState, TraceEvent};
pub use sim::{run_simulation, write_frame_csv, write_trace_gz, ClassSummary, SimOptions, SimulationResult};

/// Traffic classes in priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MacClass {
    Emergency,
    Periodic,
    Normal,
}

impl MacClass {
    pub const ALL: [MacClass; 3] = [MacClass::Emergency, MacClass::Periodic, MacClass::Normal];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MacClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MacClass::Emergency => "emergency",
            MacClass::Periodic => "periodic",
            MacClass::Normal => "normal",
        })
    }
}

/// Whether the base station estimates the active counts or knows them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    Proposed,
    Ideal,
}

impl fmt::Display for SimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimMode::Proposed => "proposed",
            SimMode::Ideal => "ideal",
        })
    }
}
