//! Brute-force references for the tests and the `validate` runner.
//!
//! Nothing here calls into the estimator, analysis or simulator code paths;
//! only plain value types are shared.

mod brute;
mod nested;
mod process;
mod profiles;

pub use brute::{exact_expected_k_bruteforce, exact_expected_r_bruteforce, exact_collision_counts};
pub use nested::nested_sum_pm;
pub use process::{mc_frame_process, FrameProcessStats};
pub use profiles::{enumerate_consistent_profiles, verdicts_from_profiles};

use crate::error::{Error, Result};

/// Whether an oracle result is exact or a sample estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    Statistical,
}

/// Every oracle and its exactness class.
pub const ORACLES: [(&str, Exactness); 5] = [
    ("enumerate_consistent_profiles", Exactness::Exact),
    ("nested_sum_pm", Exactness::Exact),
    ("exact_expected_k_bruteforce", Exactness::Exact),
    ("exact_expected_r_bruteforce", Exactness::Exact),
    ("mc_frame_process", Exactness::Statistical),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    /// Largest enumeration (hypotheses or hash assignments).
    pub max_hypotheses: u64,
    pub max_nested_m: u32,
    pub max_nested_w: u32,
    pub max_samples: u64,
    /// Absolute tolerance for exact comparisons in floating point.
    pub tolerance: f64,
    /// Standard errors allowed for statistical comparisons.
    pub sigmas: f64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_hypotheses: 5_000_000,
            max_nested_m: 4,
            max_nested_w: 12,
            max_samples: 10_000_000,
            tolerance: 1e-12,
            sigmas: 3.0,
        }
    }
}

impl OracleBudget {
    pub(crate) fn check(&self, what: &str, size: u64, limit: u64) -> Result<()> {
        if size > limit {
            Err(Error::BudgetExceeded(format!("{what}: {size} > {limit}")))
        } else {
            Ok(())
        }
    }
}
