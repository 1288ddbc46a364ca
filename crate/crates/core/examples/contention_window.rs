//! Success-count distribution and energy of one contention and data window,
//! next to a direct simulation of the process.

use m2m_cogmac::analysis::{expected_energy, expected_m, pm_distribution, pm_total, process_expectation, MacAnalysisParams};
use m2m_cogmac::oracle::{mc_frame_process, OracleBudget};
use m2m_cogmac::rng::{RandomSource, StreamKind};

fn main() -> m2m_cogmac::Result<()> {
    let mut rng = RandomSource::new(5).stream_for(StreamKind::MonteCarlo, 0, 0);
    for (w, d, n) in [(50, 1, 5), (50, 5, 20)] {
        let p = MacAnalysisParams::new(n, n, w, d)?;
        let pm = pm_distribution(&p);
        let head: Vec<String> = pm.iter().take(6).map(|x| format!("{x:.4}")).collect();
        let e = expected_energy(&p);
        let exact = process_expectation(&p);
        let mc = mc_frame_process(&p, 50_000, &OracleBudget::default(), &mut rng)?;
        println!("W={w} d={d} n={n}");
        println!("  P(M=0..5) = [{}], sum over m = {:.4}", head.join(", "), pm_total(&p));
        println!(
            "  E(M): recursion {:.3}, process DP {:.3}, simulated {:.3} ± {:.3}",
            expected_m(&p),
            exact.expected_m,
            mc.m.mean,
            mc.m.std_err
        );
        println!(
            "  energy UL/DL/data: recursion {:.2}/{:.2}/{:.2}, simulated {:.2}/{:.2}/{:.2}",
            e.ul, e.dl, e.dt, mc.ul.mean, mc.dl.mean, mc.dt.mean
        );
    }
    Ok(())
}
