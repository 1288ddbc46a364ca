//! Weighted split of the free channels among the three classes.

use super::channel::FreeSet;
use super::MacClass;

/// Channel assignment broadcast in the second broadcast window.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPlan {
    /// Sorted channel positions per class, lowest `z` first.
    pub channels: [Vec<usize>; 3],
    /// Initial contention probability per class.
    pub p_hat: [f64; 3],
    /// Estimated contenders per class.
    pub n_hat: [f64; 3],
}

impl ChannelPlan {
    pub fn counts(&self) -> [usize; 3] {
        [0, 1, 2].map(|c| self.channels[c].len())
    }

    /// Estimated contenders per channel of class `c`.
    pub fn per_channel_estimate(&self, c: MacClass) -> f64 {
        let k = self.channels[c.index()].len();
        if k == 0 {
            0.0
        } else {
            self.n_hat[c.index()] / k as f64
        }
    }
}

/// Largest-remainder rounding of `n̂_c w_c M_f / Σ n̂ w`. Ties go to the
/// higher-priority class. A class with `n̂ > 0` gets at least one channel
/// when there are enough channels for all such classes.
pub fn channel_counts(n_hat: [f64; 3], weights: [f64; 3], m_f: usize) -> [usize; 3] {
    let mut share: [f64; 3] = [0, 1, 2].map(|c| n_hat[c].max(0.0) * weights[c]);
    if share.iter().sum::<f64>() <= 0.0 {
        share = weights;
    }
    let total: f64 = share.iter().sum();
    let quota: [f64; 3] = share.map(|s| s * m_f as f64 / total);
    let mut counts: [usize; 3] = quota.map(|q| q.floor() as usize);
    let mut left = m_f - counts.iter().sum::<usize>();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        let ra = quota[a] - quota[a].floor();
        let rb = quota[b] - quota[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &c in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[c] += 1;
        left -= 1;
    }
    let needy = (0..3).filter(|&c| n_hat[c] > 0.0).count();
    if m_f >= needy {
        for c in 0..3 {
            if n_hat[c] > 0.0 && counts[c] == 0 {
                // take from the largest donor, lowest priority first
                let donor = (0..3)
                    .rev()
                    .filter(|&d| counts[d] > 1 || (counts[d] == 1 && n_hat[d] <= 0.0))
                    .max_by_key(|&d| counts[d])
                    .expect("some class holds a spare channel");
                counts[donor] -= 1;
                counts[c] += 1;
            }
        }
    }
    counts
}

/// Emergency gets the lowest-`z` channels, periodic the next, normal the
/// rest; `p̂_c = min(M_fc / n̂_c, 1)`.
pub fn allocate_channels(n_hat: [f64; 3], weights: [f64; 3], free: &FreeSet) -> ChannelPlan {
    let counts = channel_counts(n_hat, weights, free.len());
    let mut channels: [Vec<usize>; 3] = Default::default();
    let mut next = free.positions.iter().copied();
    for c in 0..3 {
        channels[c] = next.by_ref().take(counts[c]).collect();
    }
    let p_hat = [0, 1, 2].map(|c| {
        if n_hat[c] <= 0.0 {
            1.0
        } else {
            (counts[c] as f64 / n_hat[c]).min(1.0)
        }
    });
    ChannelPlan {
        channels,
        p_hat,
        n_hat,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(n: usize) -> FreeSet {
        FreeSet {
            positions: (0..n).map(|k| k * 2).collect(),
        }
    }

    #[test]
    fn splits() {
        assert_eq!(channel_counts([5.0; 3], [1.0; 3], 9), [3, 3, 3]);
        assert_eq!(channel_counts([30.0, 20.0, 10.0], [1.0; 3], 6), [3, 2, 1]);
        assert_eq!(channel_counts([10.0, 10.0, 10.0], [3.0, 2.0, 1.0], 12), [6, 4, 2]);
        assert_eq!(channel_counts([0.0; 3], [1.0; 3], 4), [2, 1, 1]);
    }

    #[test]
    fn every_active_class_served() {
        assert_eq!(channel_counts([100.0, 1.0, 1.0], [1.0; 3], 3), [1, 1, 1]);
        assert_eq!(channel_counts([100.0, 0.0, 1.0], [1.0; 3], 2), [1, 0, 1]);
        assert_eq!(channel_counts([100.0, 1.0, 1.0], [1.0; 3], 2), [2, 0, 0]);
    }

    #[test]
    fn plan_order_and_probabilities() {
        let plan = allocate_channels([10.0, 1.0, 0.0], [1.0; 3], &free(4));
        assert_eq!(plan.counts(), [3, 1, 0]);
        assert_eq!(plan.channels[0], vec![0, 2, 4]);
        assert_eq!(plan.channels[1], vec![6]);
        assert!((plan.p_hat[0] - 0.3).abs() < 1e-15);
        assert_eq!(plan.p_hat[1], 1.0);
        let plan = allocate_channels([10.0, 10.0, 10.0], [2.0, 1.0, 1.0], &free(4));
        assert!((plan.p_hat[0] - 0.2).abs() < 1e-15);
    }
}
