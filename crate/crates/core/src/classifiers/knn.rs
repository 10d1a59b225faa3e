use rayon::prelude::*;

use super::{majority_label, Label};
use crate::error::{arg, Result};
use crate::numerics::Matrix;

/// Brute-force k-nearest-neighbour classifier over a stored training set.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    /// Training rows, row-major.
    rows: Vec<f64>,
    p: usize,
    labels: Vec<Label>,
    pub k: usize,
}

impl KnnModel {
    pub fn fit(x: &Matrix, y: &[Label], k: usize) -> Result<Self> {
        let n = x.nrows();
        if n == 0 {
            return arg("k-NN needs a non-empty training set");
        }
        if y.len() != n {
            return arg(format!("{} labels for {n} training rows", y.len()));
        }
        if k == 0 || k > n {
            return arg(format!("k-NN needs 1 ≤ k ≤ {n}, got k = {k}"));
        }
        Ok(Self {
            rows: x.to_row_major(),
            p: x.ncols(),
            labels: y.to_vec(),
            k,
        })
    }

    pub fn n_features(&self) -> usize {
        self.p
    }

    /// Majority vote of the `k` nearest training rows (Euclidean). Equal
    /// distances favour the lower training index; tied votes the smaller label.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        if x.ncols() != self.p {
            return arg(format!("model has {} features, input has {}", self.p, x.ncols()));
        }
        let queries = x.to_row_major();
        let p = self.p;
        if p == 0 {
            let first: Vec<Label> = self.labels[..self.k].to_vec();
            return Ok(vec![majority_label(&first); x.nrows()]);
        }
        Ok(queries
            .par_chunks(p)
            .map(|q| self.predict_one(q))
            .collect())
    }

    fn predict_one(&self, q: &[f64]) -> Label {
        let k = self.k;
        // (distance², index), sorted ascending; scanning indices in increasing
        // order and requiring strict improvement keeps the lower index on ties.
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        for (i, row) in self.rows.chunks_exact(self.p).enumerate() {
            let d: f64 = row.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.len() == k && d >= best[k - 1].0 {
                continue;
            }
            let pos = best.partition_point(|&(bd, _)| bd <= d);
            best.insert(pos, (d, i));
            best.truncate(k);
        }
        let votes: Vec<Label> = best.iter().map(|&(_, i)| self.labels[i]).collect();
        majority_label(&votes)
    }
}

pub fn knn_classify(x_train: &Matrix, y_train: &[Label], x_query: &Matrix, k: usize) -> Result<Vec<Label>> {
    KnnModel::fit(x_train, y_train, k)?.predict(x_query)
}
