//! Closed-form expectations and bounds.

pub mod mac;
pub mod slots;

pub use mac::{
    expected_energy, expected_energy_marginal, expected_m, pm_distribution, pm_total,
    process_expectation, success_prob, EnergyExpectation, MacAnalysisParams, ProcessExpectation,
};
pub use slots::{
    bound_k, bound_r, bound_total_method1, expected_k, expected_r, expected_total_method1,
    hash_prob, BoundParams, EstimationParams,
};
