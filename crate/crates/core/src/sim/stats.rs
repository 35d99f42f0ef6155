//! Batch-means point estimates with 95% confidence intervals.

/// A point estimate with a 95% batch-means confidence half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub ci_half_width: f64,
}

impl Estimate {
    /// Grand mean and t-based CI half-width from per-batch means.
    pub fn from_batch_means(means: &[f64]) -> Estimate {
        let k = means.len();
        assert!(k >= 2, "need at least two batches");
        let mean = means.iter().sum::<f64>() / k as f64;
        let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (k as f64 - 1.0);
        Estimate {
            mean,
            ci_half_width: t_quantile_975(k - 1) * (var / k as f64).sqrt(),
        }
    }
}

/// Accumulates one observation stream into a fixed number of equal-size
/// batches.
#[derive(Clone, Debug)]
pub struct BatchMeans {
    batch_size: u64,
    current_sum: f64,
    current_count: u64,
    means: Vec<f64>,
}

impl BatchMeans {
    pub fn new(batch_size: u64) -> BatchMeans {
        assert!(batch_size >= 1);
        BatchMeans {
            batch_size,
            current_sum: 0.0,
            current_count: 0,
            means: Vec::new(),
        }
    }

    pub fn push(&mut self, value: f64) {
        self.current_sum += value;
        self.current_count += 1;
        if self.current_count == self.batch_size {
            self.means.push(self.current_sum / self.batch_size as f64);
            self.current_sum = 0.0;
            self.current_count = 0;
        }
    }

    pub fn batch_means(&self) -> &[f64] {
        &self.means
    }

    pub fn estimate(&self) -> Estimate {
        Estimate::from_batch_means(&self.means)
    }
}

/// Two-sided 95% Student-t quantile (`t_{0.975, df}`), table-interpolated.
pub fn t_quantile_975(df: usize) -> f64 {
    const TABLE_1_30: [f64; 30] = [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
        2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
        2.052, 2.048, 2.045, 2.042,
    ];
    // (df, quantile) knots past the dense table; interpolation in 1/df.
    const KNOTS: [(f64, f64); 5] = [
        (30.0, 2.042),
        (40.0, 2.021),
        (60.0, 2.000),
        (120.0, 1.980),
        (1e12, 1.960),
    ];
    assert!(df >= 1);
    if df <= 30 {
        return TABLE_1_30[df - 1];
    }
    let x = df as f64;
    for w in KNOTS.windows(2) {
        let (d0, t0) = w[0];
        let (d1, t1) = w[1];
        if x <= d1 {
            let f = (1.0 / x - 1.0 / d0) / (1.0 / d1 - 1.0 / d0);
            return t0 + f * (t1 - t0);
        }
    }
    1.960
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_quantiles_match_tables() {
        assert!((t_quantile_975(9) - 2.262).abs() < 1e-9);
        assert!((t_quantile_975(19) - 2.093).abs() < 1e-9);
        assert!((t_quantile_975(30) - 2.042).abs() < 1e-9);
        assert!((t_quantile_975(50) - 2.009).abs() < 0.01);
        assert!((t_quantile_975(100_000) - 1.960).abs() < 1e-3);
    }

    #[test]
    fn batch_means_covers_a_known_mean() {
        let mut b = BatchMeans::new(100);
        // Deterministic zig-zag around 5.0.
        for i in 0..2_000u64 {
            b.push(5.0 + if i % 2 == 0 { 0.5 } else { -0.5 });
        }
        let est = b.estimate();
        assert_eq!(b.batch_means().len(), 20);
        assert!((est.mean - 5.0).abs() < 1e-12);
        assert!(est.ci_half_width >= 0.0);
    }
}
