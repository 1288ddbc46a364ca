//! Method I, Method II and repeated LoF on one shared hash assignment.

use m2m_cogmac::estimators::{EstimatorConfig, EstimatorKind, Estimators, TraceMode};
use m2m_cogmac::population::HashAssignment;
use m2m_cogmac::rng::{RandomSource, StreamKind};

fn main() -> m2m_cogmac::Result<()> {
    let counts = [12, 3, 0, 40, 7];
    let t = 18;
    let mut rng = RandomSource::new(42).stream_for(StreamKind::Hashes, 0, 0);
    let assignment = HashAssignment::redraw(&counts, t, &mut rng)?;
    let est = Estimators::new(counts.len(), EstimatorConfig::default())?;

    println!("active nodes per type: {counts:?}, bitmap length {t}");
    for kind in EstimatorKind::ALL {
        let r = est.run(kind, &assignment, TraceMode::CountOnly)?.report;
        let n_hat: Vec<String> = r.n_hat.iter().map(|x| format!("{x:.1}")).collect();
        println!(
            "{:>12}: {:>3} slots (phase 1 {}, broadcast {}, phase 2 {}, phase 3 {}), n_hat = [{}]",
            kind.to_string(),
            r.slots_total,
            r.slots_phase1,
            r.slots_bp,
            r.slots_phase2,
            r.slots_phase3,
            n_hat.join(", ")
        );
    }
    Ok(())
}
