//! Per-class throughput, delay and energy of the proposed MAC against the
//! ideal one that knows the active counts.

use m2m_cogmac::macsim::{run_simulation, MacConfig, SimMode, SimOptions};

fn main() -> m2m_cogmac::Result<()> {
    let config = MacConfig {
        weights: [3.0, 2.0, 1.0],
        lambda: [4.0; 3],
        ..Default::default()
    };
    for mode in [SimMode::Proposed, SimMode::Ideal] {
        let r = run_simulation(&config, mode, SimOptions::default(), 1)?;
        for s in &r.summary {
            println!(
                "{:>8} {:<9} throughput {:.3} ± {:.3}  delay {:>6.1}  energy {:.2}",
                mode.to_string(),
                s.class.to_string(),
                s.throughput.mean,
                s.throughput.half_width(0.95),
                s.delay.mean,
                s.energy.mean
            );
        }
    }
    Ok(())
}
