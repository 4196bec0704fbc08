//! Sample statistics used by the simulators and the experiment harness.
//!
//! Sums go through [`fsum`], so every statistic is independent of the order
//! in which samples arrive.

use serde::Serialize;

use crate::sum::fsum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleStats {
    pub n: u64,
    pub mean: f64,
    /// Unbiased (n - 1) sample variance; NaN for fewer than two samples.
    pub variance: f64,
}

impl SampleStats {
    pub fn from_slice(xs: &[f64]) -> Self {
        let n = xs.len() as u64;
        if n == 0 {
            return SampleStats {
                n,
                mean: f64::NAN,
                variance: f64::NAN,
            };
        }
        let mean = fsum(xs.iter().copied()) / n as f64;
        let variance = if n < 2 {
            f64::NAN
        } else {
            fsum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64
        };
        SampleStats { n, mean, variance }
    }

    pub fn stddev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// `stddev / sqrt(n)`.
    pub fn stderr(&self) -> f64 {
        self.stddev() / (self.n as f64).sqrt()
    }
}

/// Mean and its standard error from batch means of a correlated series.
///
/// The series is cut into `batches` equal consecutive blocks (a remainder at
/// the end is dropped); the standard error is that of the block means.
pub fn batch_means(xs: &[f64], batches: usize) -> SampleStats {
    assert!(batches >= 2, "batch means need at least two batches");
    let size = xs.len() / batches;
    if size == 0 {
        return SampleStats::from_slice(&[]);
    }
    let means: Vec<f64> = xs
        .chunks_exact(size)
        .take(batches)
        .map(|c| fsum(c.iter().copied()) / size as f64)
        .collect();
    SampleStats::from_slice(&means)
}

/// Standard error of a proportion `p` estimated from `n` independent draws.
pub fn proportion_stderr(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Least-squares slope and intercept of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = fsum(x.iter().copied()) / n;
    let my = fsum(y.iter().copied()) / n;
    let sxx = fsum(x.iter().map(|a| (a - mx) * (a - mx)));
    let sxy = fsum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
