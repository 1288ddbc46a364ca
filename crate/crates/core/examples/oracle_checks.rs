//! The quick oracle cross-checks: exhaustive decoding, exact enumeration of
//! the slot expectations and the literal nested sum.

use m2m_cogmac::experiments::validate::{
    check_bounds, check_decoder_against_profiles, check_estimator_equivalence, check_pm_dp,
    check_slot_expectations_exact, tiny_slot_grid,
};

fn main() -> m2m_cogmac::Result<()> {
    println!("{}", check_estimator_equivalence(2..=6, 500, 100, 12, 1)?);
    println!("{}", check_decoder_against_profiles(2..=6)?);
    println!("{}", check_slot_expectations_exact(&tiny_slot_grid(6), 1e-12)?);
    println!("{}", check_bounds(2..=6, &[1, 10, 100], 0..=4)?.0);
    println!("{}", check_pm_dp(10, 3, 4, 4, 1e-12)?);
    Ok(())
}
