//! Cross-validated choice of the exponent γ for generalized adaptive scaling.

use super::{fit_scaler, FeatureKind, ScalerSpec, ScalingMethod};
use crate::dataio::kfold_indices;
use crate::error::{arg, Result};
use crate::models::ModelSpec;
use crate::numerics::{mean_sd, Matrix, RngStream};

pub const DEFAULT_GAMMA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Scores within `TIE_RTOL` relative, or `TIE_ATOL · Var(y)` absolute, tie.
const TIE_RTOL: f64 = 1e-9;
const TIE_ATOL: f64 = 1e-12;
const TAG_FOLDS: u64 = 0x4741_4d4d;
const TAG_MODEL: u64 = 0x4d4f_444c;

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSelection {
    pub gamma_star: f64,
    /// Grid in ascending order.
    pub grid: Vec<f64>,
    /// Mean validation loss (MSE or misclassification rate) per grid value.
    pub cv_scores: Vec<f64>,
}

/// For each γ, k-fold CV of "fit GAS(γ) + `downstream`" on the training rows.
///
/// Every γ is scored on the same folds, and the downstream model sees the
/// same random stream for a given fold, so differences come from γ alone.
/// Near-ties resolve to the smaller γ.
pub fn select_gamma_cv(
    x: &Matrix,
    y: &[f64],
    grid: &[f64],
    folds: usize,
    downstream: &ModelSpec,
    kinds: Option<&[FeatureKind]>,
    rng: &RngStream,
) -> Result<GammaSelection> {
    if grid.is_empty() {
        return arg("gamma grid is empty");
    }
    if let Some(g) = grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return arg(format!("gamma grid value {g} is outside [0, 1]"));
    }
    if folds < 2 {
        return arg(format!("cross-validation needs at least 2 folds, got {folds}"));
    }
    let n = x.nrows();
    if y.len() != n {
        return arg(format!("response has {} values but X has {n} rows", y.len()));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.len() == 1 {
        return Ok(GammaSelection {
            gamma_star: grid[0],
            cv_scores: vec![f64::NAN],
            grid,
        });
    }

    let fold_sets = kfold_indices(n, folds, &rng.derive(TAG_FOLDS))?;
    let mut splits = Vec::with_capacity(folds);
    let mut in_fold = vec![false; n];
    for val in &fold_sets {
        in_fold.iter_mut().for_each(|f| *f = false);
        for &i in val {
            in_fold[i] = true;
        }
        let train: Vec<usize> = (0..n).filter(|&i| !in_fold[i]).collect();
        if train.len() < 2 || val.is_empty() {
            return arg("each cross-validation fold needs at least 2 training rows");
        }
        let xt = x.select_rows(&train);
        let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let xv = x.select_rows(val);
        let yv: Vec<f64> = val.iter().map(|&i| y[i]).collect();
        splits.push((xt, yt, xv, yv));
    }

    let mut scores = Vec::with_capacity(grid.len());
    for &gamma in &grid {
        let spec = ScalerSpec::new(ScalingMethod::GeneralizedAdaptive, gamma)?;
        let mut total = 0.0;
        for (f, (xt, yt, xv, yv)) in splits.iter().enumerate() {
            let scaler = fit_scaler(spec, xt, Some(yt), kinds)?;
            let model = downstream.fit(&scaler.transform(xt)?, yt, &rng.derive(TAG_MODEL).with_stream(f as u64))?;
            total += model.loss(&scaler.transform(xv)?, yv)? * yv.len() as f64;
        }
        scores.push(total / n as f64);
    }

    let (_, sd_y) = mean_sd(y);
    let atol = TIE_ATOL * sd_y * sd_y;
    let mut best = 0;
    for k in 1..scores.len() {
        let (a, b) = (scores[k], scores[best]);
        if a < b && (b - a) > TIE_RTOL * b.abs().max(a.abs()) + atol {
            best = k;
        }
    }
    Ok(GammaSelection {
        gamma_star: grid[best],
        grid,
        cv_scores: scores,
    })
}
