//! Sample summaries shared by the Monte Carlo code.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::statistics::Statistics;

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleMean {
    pub mean: f64,
    pub std_err: f64,
    pub count: usize,
}

impl SampleMean {
    pub fn from_samples(xs: &[f64]) -> Self {
        let count = xs.len();
        if count == 0 {
            return Self {
                mean: f64::NAN,
                std_err: f64::NAN,
                count,
            };
        }
        let mean = xs.mean();
        let std_err = if count > 1 {
            xs.std_dev() / (count as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_err,
            count,
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err
    }

    /// `|mean - value|` in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.mean - value).abs();
        if self.std_err > 0.0 {
            d / self.std_err
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// Half-width of the two-sided confidence interval at `level`.
    pub fn half_width(&self, level: f64) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        let t = StudentsT::new(0.0, 1.0, (self.count - 1) as f64)
            .expect("degrees of freedom are positive")
            .inverse_cdf(0.5 + level / 2.0);
        t * self.std_err
    }

    /// Whether `value` lies inside the confidence interval at `level`.
    pub fn within_interval(&self, value: f64, level: f64) -> bool {
        (self.mean - value).abs() <= self.half_width(level)
    }
}

/// Batch means over consecutive, equally sized batches; a trailing partial
/// batch is dropped.
pub fn batch_means(xs: &[f64], batches: usize) -> SampleMean {
    let batches = batches.max(1);
    let size = xs.len() / batches;
    if size == 0 {
        return SampleMean::from_samples(xs);
    }
    let means: Vec<f64> = xs.chunks_exact(size).take(batches).map(|c| c.mean()).collect();
    SampleMean::from_samples(&means)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_error() {
        let s = SampleMean::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std_err - (1.6666666666666667f64 / 4.0).sqrt()).abs() < 1e-15);
        assert!(s.within(2.5, 0.0));
        assert!((s.half_width(0.95) - 3.182446305284263 * s.std_err).abs() < 1e-9);
    }

    #[test]
    fn batches() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let b = batch_means(&xs, 2);
        assert_eq!(b.count, 2);
        assert_eq!(b.mean, 4.5);
    }
}
