//! Per-feature statistics fitted on the training rows.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl NormStats {
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot fit statistics on zero rows".into(),
            ));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let (min, max) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        Ok(Self {
            mean,
            std: var.sqrt(),
            min,
            max,
        })
    }

    /// `(v - mean) / std`, or 0 for a constant column.
    pub fn zscore(&self, v: f64) -> f64 {
        if self.std > 0.0 {
            (v - self.mean) / self.std
        } else {
            0.0
        }
    }

    /// Position within the train range, clamped to [0, 1]; 0.5 for a constant
    /// column.
    pub fn minmax(&self, v: f64) -> f64 {
        if self.max > self.min {
            ((v - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
        } else {
            0.5
        }
    }
}

/// Statistics of `features` computed over `train` rows only.
pub fn fit_stats(rows: &[Vec<f64>], train: &[usize], features: &[usize]) -> Result<Vec<NormStats>> {
    features
        .iter()
        .map(|&f| {
            let col: Vec<f64> = train.iter().map(|&i| rows[i][f]).collect();
            NormStats::fit(&col)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_stats() {
        let s = NormStats::fit(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert_eq!(s.std, 2.0);
        assert_eq!(s.zscore(9.0), 2.0);
        assert_eq!(s.minmax(2.0), 0.0);
        assert_eq!(s.minmax(100.0), 1.0);
    }

    #[test]
    fn degenerate_column() {
        let s = NormStats::fit(&[3.0; 5]).unwrap();
        assert_eq!(s.zscore(10.0), 0.0);
        assert_eq!(s.minmax(10.0), 0.5);
        assert!(NormStats::fit(&[]).is_err());
    }

    proptest! {
        /// Changing test rows never changes the fitted statistics.
        #[test]
        fn stats_ignore_test_rows(
            train_vals in prop::collection::vec(-100.0f64..100.0, 1..40),
            test_a in prop::collection::vec(-1e6f64..1e6, 1..20),
            test_b in prop::collection::vec(-1e6f64..1e6, 1..20),
        ) {
            let build = |test: &[f64]| -> Vec<Vec<f64>> {
                train_vals.iter().chain(test).map(|&v| vec![v]).collect()
            };
            let train: Vec<usize> = (0..train_vals.len()).collect();
            let a = fit_stats(&build(&test_a), &train, &[0]).unwrap();
            let b = fit_stats(&build(&test_b), &train, &[0]).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
