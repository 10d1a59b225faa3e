use super::matrix::Matrix;
use crate::error::{arg, Result};

/// Summary statistics of one column. `sample_sd` uses the `n − 1` divisor
/// and is 0 for a single observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnStats {
    pub mean: f64,
    pub sample_sd: f64,
    pub min: f64,
    pub max: f64,
    pub distinct_count: usize,
}

impl ColumnStats {
    pub fn of(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return arg("column statistics need at least one row");
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sample_sd = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut distinct_count = 1;
        for w in sorted.windows(2) {
            if w[0] != w[1] {
                distinct_count += 1;
            }
        }
        Ok(Self {
            mean,
            sample_sd,
            min: sorted[0],
            max: sorted[n - 1],
            distinct_count,
        })
    }
}

pub fn column_stats(x: &Matrix) -> Result<Vec<ColumnStats>> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return arg("column statistics need a non-empty matrix");
    }
    x.columns().map(ColumnStats::of).collect()
}

/// Sample mean and (n − 1) standard deviation of a slice; sd is 0 for n ≤ 1.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}
