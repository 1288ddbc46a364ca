//! Node-cardinality estimation and cognitive multi-channel MAC simulation
//! for heterogeneous machine-to-machine networks.
//!
//! - [`estimators`]: LoF, Method I, Method II and the repeated-LoF baseline.
//! - [`analysis`]: closed-form slot counts, bounds, contention and energy.
//! - [`macsim`]: frame-level simulator of the cognitive MAC.
//! - [`oracle`]: brute-force references used by the tests.
//! - [`experiments`]: configuration and CSV-emitting experiment runners.

pub mod analysis;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod ids;
pub mod macsim;
pub mod oracle;
pub mod population;
pub mod rng;
pub mod slot;
pub mod stats;

pub use error::{Error, Result};
