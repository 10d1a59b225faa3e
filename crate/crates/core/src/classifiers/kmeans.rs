use rand::Rng;

use super::{majority_label, Label};
use crate::error::{arg, Result};
use crate::numerics::{Matrix, RngStream};

pub const DEFAULT_MAX_ITER: usize = 300;

/// Lloyd's k-means used as a classifier: each centroid carries the majority
/// training label of its cluster and queries take the label of the nearest one.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    /// `k × p` centroids, row-major.
    centroids: Vec<f64>,
    p: usize,
    pub centroid_labels: Vec<Label>,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid; ties go to the lower index.
fn nearest(centroids: &[f64], p: usize, row: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, cen) in centroids.chunks_exact(p.max(1)).enumerate() {
        let d = if p == 0 { 0.0 } else { sq_dist(cen, row) };
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

impl KMeansModel {
    pub fn fit(x: &Matrix, y: &[Label], k: usize, rng: &RngStream, max_iter: usize) -> Result<Self> {
        let (n, p) = (x.nrows(), x.ncols());
        if y.len() != n {
            return arg(format!("{} labels for {n} training rows", y.len()));
        }
        if k == 0 || k > n {
            return arg(format!("k-means needs 1 ≤ k ≤ {n}, got k = {k}"));
        }
        if max_iter == 0 {
            return arg("k-means needs max_iter ≥ 1");
        }
        let rows = x.to_row_major();
        let row = |i: usize| &rows[i * p..(i + 1) * p];
        let mut g = rng.generator();

        // k-means++ seeding.
        let mut centroids: Vec<f64> = Vec::with_capacity(k * p);
        let mut chosen = vec![false; n];
        let first = g.random_range(0..n);
        centroids.extend_from_slice(row(first));
        chosen[first] = true;
        let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(row(i), row(first))).collect();
        for _ in 1..k {
            let total: f64 = d2.iter().sum();
            let next = if total > 0.0 {
                let target = g.random::<f64>() * total;
                let mut acc = 0.0;
                let mut pick = None;
                for (i, &d) in d2.iter().enumerate() {
                    acc += d;
                    if d > 0.0 && acc > target {
                        pick = Some(i);
                        break;
                    }
                }
                pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).expect("positive mass"))
            } else {
                // Every remaining point coincides with a centroid.
                let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
                free[g.random_range(0..free.len())]
            };
            chosen[next] = true;
            centroids.extend_from_slice(row(next));
            for (i, d) in d2.iter_mut().enumerate() {
                *d = d.min(sq_dist(row(i), row(next)));
            }
        }

        let mut assign = vec![usize::MAX; n];
        let mut iterations = 0;
        for it in 1..=max_iter {
            iterations = it;
            let mut changed = false;
            let mut dist = vec![0.0; n];
            for i in 0..n {
                let (c, d) = nearest(&centroids, p, row(i));
                dist[i] = d;
                if assign[i] != c {
                    assign[i] = c;
                    changed = true;
                }
            }
            if !changed && it > 1 {
                break;
            }
            let mut sums = vec![0.0; k * p];
            let mut counts = vec![0usize; k];
            for i in 0..n {
                let c = assign[i];
                counts[c] += 1;
                for (s, v) in sums[c * p..(c + 1) * p].iter_mut().zip(row(i)) {
                    *s += v;
                }
            }
            for c in 0..k {
                if counts[c] > 0 {
                    for j in 0..p {
                        centroids[c * p + j] = sums[c * p + j] / counts[c] as f64;
                    }
                } else {
                    // Reseed an empty cluster at the point farthest from its centroid.
                    let far = (0..n)
                        .fold((0, f64::NEG_INFINITY), |b, i| if dist[i] > b.1 { (i, dist[i]) } else { b })
                        .0;
                    centroids[c * p..(c + 1) * p].copy_from_slice(row(far));
                    dist[far] = 0.0;
                }
            }
        }

        let mut members: Vec<Vec<Label>> = vec![Vec::new(); k];
        for i in 0..n {
            let (c, _) = nearest(&centroids, p, row(i));
            members[c].push(y[i]);
        }
        let centroid_labels = (0..k)
            .map(|c| {
                if members[c].is_empty() {
                    // No training point is closest; fall back to the nearest point's label.
                    let cen = &centroids[c * p..(c + 1) * p];
                    let i = (0..n)
                        .fold((0, f64::INFINITY), |b, i| {
                            let d = sq_dist(cen, row(i));
                            if d < b.1 { (i, d) } else { b }
                        })
                        .0;
                    y[i]
                } else {
                    majority_label(&members[c])
                }
            })
            .collect();
        Ok(Self {
            centroids,
            p,
            centroid_labels,
            iterations,
        })
    }

    pub fn n_features(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.centroid_labels.len()
    }

    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.p..(c + 1) * self.p]
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        if x.ncols() != self.p {
            return arg(format!("model has {} features, input has {}", self.p, x.ncols()));
        }
        let mut buf = vec![0.0; self.p];
        Ok((0..x.nrows())
            .map(|i| {
                x.row_into(i, &mut buf);
                self.centroid_labels[nearest(&self.centroids, self.p, &buf).0]
            })
            .collect())
    }
}

pub fn kmeans_nearest_centroid(
    x: &Matrix,
    y: &[Label],
    k: usize,
    rng: &RngStream,
    max_iter: usize,
) -> Result<KMeansModel> {
    KMeansModel::fit(x, y, k, rng, max_iter)
}
