use rand::Rng;

use crate::analysis::MacAnalysisParams;
use crate::error::Result;
use crate::stats::SampleMean;

use super::OracleBudget;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameProcessStats {
    pub m: SampleMean,
    pub ul: SampleMean,
    pub dl: SampleMean,
    pub dt: SampleMean,
}

/// Simulates one contention window per sample. UL/DL pairs run from the
/// left and `d` data slots per success are taken from the right; pair `k`
/// happens only if it still fits next to the reserved slots, and a lone
/// transmitter is granted only if its `d` slots fit too.
pub fn mc_frame_process<R: Rng + ?Sized>(
    params: &MacAnalysisParams,
    samples: u64,
    budget: &OracleBudget,
    rng: &mut R,
) -> Result<FrameProcessStats> {
    budget.check("samples", samples, budget.max_samples)?;
    let n = params.n as usize;
    let w = params.w as u64;
    let d = params.d as u64;
    let (gi, gt, gr) = (params.gamma_i, params.gamma_t, params.gamma_r);
    let mut ms = Vec::with_capacity(samples as usize);
    let mut uls = Vec::with_capacity(samples as usize);
    let mut dls = Vec::with_capacity(samples as usize);
    let mut dts = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let mut waiting = n;
        let mut reserved = 0u64;
        let mut est = params.n_hat as f64;
        let (mut ul, mut dl, mut dt) = (0.0, 0.0, 0.0);
        let mut pair = 1u64;
        let mut m = 0u64;
        while 2 * pair + reserved <= w {
            let p = if est <= 1.0 { 1.0 } else { 1.0 / est };
            let senders = (0..waiting).filter(|_| rng.random::<f64>() < p).count();
            ul += senders as f64 * gt + (n - senders) as f64 * gi;
            dl += waiting as f64 * gr + (n - waiting) as f64 * gi;
            if senders == 1 && 2 * pair + reserved + d <= w {
                reserved += d;
                waiting -= 1;
                est -= 1.0;
                m += 1;
                dt += d as f64 * (gt + (n as f64 - 1.0) * gi);
            }
            pair += 1;
        }
        ms.push(m as f64);
        uls.push(ul);
        dls.push(dl);
        dts.push(dt);
    }
    Ok(FrameProcessStats {
        m: SampleMean::from_samples(&ms),
        ul: SampleMean::from_samples(&uls),
        dl: SampleMean::from_samples(&dls),
        dt: SampleMean::from_samples(&dts),
    })
}
