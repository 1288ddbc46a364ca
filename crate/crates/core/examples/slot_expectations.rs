//! Closed-form expected slot counts of Method I and their upper bounds.

use m2m_cogmac::analysis::{
    bound_k, bound_r, bound_total_method1, expected_k, expected_r, expected_total_method1, BoundParams,
    EstimationParams,
};

fn main() -> m2m_cogmac::Result<()> {
    println!("{:>4} {:>4} {:>8} {:>8} {:>8} {:>8} {:>9} {:>9}", "T", "n", "E[K]", "bound", "E[R]", "bound", "slots", "bound");
    for types in 2..=6 {
        for n in [10u64, 100] {
            let p = EstimationParams::new(vec![n; types], 18, 5)?;
            let b = BoundParams::from_params(&p)?;
            println!(
                "{types:>4} {n:>4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>9.2} {:>9.2}",
                expected_k(&p),
                bound_k(&p, &b),
                expected_r(&p),
                bound_r(&p, &b),
                expected_total_method1(&p),
                bound_total_method1(&p)?
            );
        }
    }
    Ok(())
}
