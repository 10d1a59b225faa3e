use rand::seq::SliceRandom;

use super::Dataset;
use crate::error::{arg, Result};
use crate::numerics::RngStream;

/// Random train/test index partition: a uniform permutation whose first
/// `⌈n · ratio⌉` entries (clamped to `[1, n − 1]`) form the training set.
pub fn split_indices(n: usize, ratio: f64, rng: &RngStream) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return arg(format!("a train/test split needs at least 2 rows, got {n}"));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return arg(format!("train ratio must lie in (0, 1), got {ratio}"));
    }
    let n_train = ((n as f64 * ratio).ceil() as usize).clamp(1, n - 1);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng.generator());
    let test = perm.split_off(n_train);
    Ok((perm, test))
}

pub fn train_test_split(d: &Dataset, ratio: f64, rng: &RngStream) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(d.n_rows(), ratio, rng)?;
    Ok((d.select_rows(&train), d.select_rows(&test)))
}

/// `k` disjoint validation sets covering `0..n`: a shuffled index list dealt
/// round-robin, so fold sizes differ by at most one. Each fold is sorted.
pub fn kfold_indices(n: usize, k: usize, rng: &RngStream) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return arg(format!("need at least 2 folds, got {k}"));
    }
    if k > n {
        return arg(format!("cannot make {k} folds from {n} rows"));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng.generator());
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (pos, i) in perm.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}
