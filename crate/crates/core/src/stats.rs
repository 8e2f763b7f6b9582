//! Moment accumulators and the estimate record shared by exact and sampled runs.

use crate::DyadicRational;

/// Streaming count / mean / centered sum of squares (Welford), mergeable with the
/// pairwise update of Chan et al. Merging in a fixed order gives bit-identical results.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (`n - 1` denominator); zero for fewer than two samples.
    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Monte Carlo estimate. `std_error_variance` is the normal-theory
    /// `s^2 sqrt(2 / (n - 1))`, which understates the spread for skewed data.
    pub fn estimate(&self) -> MomentEstimate {
        let n = self.count as f64;
        let var = self.sample_variance();
        let second = var * (n - 1.0) / n + self.mean * self.mean;
        MomentEstimate {
            mean: Moment::Approx(self.mean),
            second_moment: Moment::Approx(second),
            variance: Moment::Approx(var),
            std_error_mean: if self.count > 0 {
                libm::sqrt(var / n)
            } else {
                0.0
            },
            std_error_variance: if self.count > 1 {
                var * libm::sqrt(2.0 / (n - 1.0))
            } else {
                0.0
            },
            samples: self.count,
            exact: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Moment {
    Exact(DyadicRational),
    Approx(f64),
}

impl Moment {
    pub fn to_f64(&self) -> f64 {
        match self {
            Moment::Exact(d) => d.to_f64(),
            Moment::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&DyadicRational> {
        match self {
            Moment::Exact(d) => Some(d),
            Moment::Approx(_) => None,
        }
    }
}

/// Mean and variance of an ensemble observable. `exact` is set only for exhaustive
/// enumeration; sampled estimates carry standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub mean: Moment,
    pub second_moment: Moment,
    pub variance: Moment,
    pub std_error_mean: f64,
    pub std_error_variance: f64,
    pub samples: u64,
    pub exact: bool,
}

impl MomentEstimate {
    /// Exhaustive result from exact first and second moments.
    pub fn from_exact(mean: DyadicRational, second_moment: DyadicRational, samples: u64) -> Self {
        let variance = &second_moment - &(&mean * &mean);
        MomentEstimate {
            mean: Moment::Exact(mean),
            second_moment: Moment::Exact(second_moment),
            variance: Moment::Exact(variance),
            std_error_mean: 0.0,
            std_error_variance: 0.0,
            samples,
            exact: true,
        }
    }

    /// Exhaustive result for an observable that is only available in floating point.
    pub fn from_weighted(mean: f64, second_moment: f64, samples: u64) -> Self {
        MomentEstimate {
            mean: Moment::Approx(mean),
            second_moment: Moment::Approx(second_moment),
            variance: Moment::Approx((second_moment - mean * mean).max(0.0)),
            std_error_mean: 0.0,
            std_error_variance: 0.0,
            samples,
            exact: true,
        }
    }

    /// `(mean - reference) / std_error_mean`. For exact estimates: 0 on equality and
    /// ±∞ otherwise.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean.to_f64() - reference;
        if self.std_error_mean > 0.0 {
            diff / self.std_error_mean
        } else if diff == 0.0 {
            0.0
        } else {
            diff * f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs: alloc::vec::Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.01).collect();
        let mut m = RunningMoments::new();
        xs.iter().for_each(|&x| m.push(x));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((m.mean() - mean).abs() < 1e-12);
        assert!((m.sample_variance() - var).abs() < 1e-12);

        let mut a = RunningMoments::new();
        let mut b = RunningMoments::new();
        xs[..400].iter().for_each(|&x| a.push(x));
        xs[400..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.count(), 1000);
        assert!((a.mean() - mean).abs() < 1e-12);
        assert!((a.sample_variance() - var).abs() < 1e-12);
    }

    #[test]
    fn exact_estimate_variance() {
        let e = MomentEstimate::from_exact(DyadicRational::new(3, 2), DyadicRational::new(5, 3), 2);
        assert_eq!(e.variance, Moment::Exact(DyadicRational::new(1, 4)));
        assert_eq!(e.z_score(0.75), 0.0);
        assert_eq!(e.z_score(0.5), f64::INFINITY);
    }

    #[test]
    fn empty_and_single() {
        let mut m = RunningMoments::new();
        assert_eq!(m.estimate().std_error_mean, 0.0);
        m.push(2.0);
        assert_eq!(m.sample_variance(), 0.0);
        let mut other = RunningMoments::new();
        other.merge(&m);
        assert_eq!(other, m);
    }
}
