//! Summary statistics over sampled outcomes.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    #[serde(skip)]
    pub samples: Vec<f64>,
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single sample.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
}

impl Distribution {
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::arg("distribution needs at least one sample"));
        }
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Ok(Self {
            count: n,
            mean,
            std,
            min: sorted[0],
            max: sorted[n - 1],
            median,
            samples,
        })
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.std / (self.count as f64).sqrt()
    }

    /// Counts of samples in `bins` equal-width bins over `[lo, hi]`; values
    /// outside the range go to the end bins.
    pub fn histogram(&self, lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64, usize)> {
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &x in &self.samples {
            let i = ((x - lo) / width).floor();
            let i = if i.is_nan() {
                0
            } else {
                (i.max(0.0) as usize).min(bins - 1)
            };
            counts[i] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton() {
        let d = Distribution::from_samples(vec![1.25]).unwrap();
        assert_eq!(
            (d.mean, d.std, d.min, d.max, d.median),
            (1.25, 0.0, 1.25, 1.25, 1.25)
        );
    }

    #[test]
    fn known_values() {
        let d = Distribution::from_samples(vec![4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(d.mean, 2.5);
        assert_eq!(d.median, 2.5);
        assert!((d.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(Distribution::from_samples(vec![]).is_err());
    }

    #[test]
    fn histogram_counts_everything() {
        let d = Distribution::from_samples((0..100).map(|i| i as f64 / 10.0).collect()).unwrap();
        let h = d.histogram(2.0, 8.0, 6);
        assert_eq!(h.iter().map(|b| b.2).sum::<usize>(), 100);
        assert_eq!(h[0].0, 2.0);
    }
}
