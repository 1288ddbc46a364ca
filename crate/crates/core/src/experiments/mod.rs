//! Experiment configuration and the runners behind the `cogmac` binary.
//!
//! Every runner is a pure function of its config and seed. Sweep points run
//! in parallel, but each point draws from its own labelled stream and rows
//! are written in sweep order, so outputs are byte-identical across runs and
//! thread counts.

mod config;
mod estimation;
mod mac;
mod output;
mod table;
pub mod validate;

pub use config::{
    AnalysisTableConfig, EstimationSweepConfig, ExperimentConfig, ExperimentKind, MacExperimentConfig,
    ThresholdConfig, ValidateConfig,
};
pub use estimation::{
    estimation_sweep, mean_slots, threshold_sweep, EstimationPoint, SlotStats, ThresholdRow,
};
pub use mac::{mac_rows, mac_sim_experiment, mac_sim_runs, MacRow, MacRun};
pub use output::{write_csv, CsvTable};
pub use table::{analysis_table, TableRow};
pub use validate::{validate, Check, ValidationReport};

pub mod io {
    //! CSV writers used by the binary.
    pub use super::estimation::{write_estimation, write_threshold};
    pub use super::mac::write_mac;
    pub use super::table::write_table;
}
