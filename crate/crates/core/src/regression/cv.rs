//! λ selection by k-fold cross-validation.

use super::cd::{fit_path, Prepared};
use super::{predict_linear, PenaltySpec};
use crate::dataio::kfold_indices;
use crate::error::{arg, Result};
use crate::numerics::{Matrix, RngStream};

pub const DEFAULT_GRID_SIZE: usize = 50;
const GRID_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSelection {
    pub lambda_star: f64,
    /// Candidate λ values, largest first.
    pub lambdas: Vec<f64>,
    /// Mean validation MSE for each entry of `lambdas`.
    pub cv_mse: Vec<f64>,
}

/// Smallest λ at which the fit of `spec.family` on `(x, y)` is all zeros.
/// For Lasso, SCAD and MCP this is `‖Xᵀ(y − ȳ)‖∞`.
pub fn lambda_max(x: &Matrix, y: &[f64], spec: &PenaltySpec) -> Result<f64> {
    Ok(Prepared::new(x, y, spec)?.lambda_max())
}

/// `size` log-spaced values from `lambda_max` down to `1e-3 · lambda_max`.
pub fn default_lambda_grid(lambda_max: f64, size: usize) -> Vec<f64> {
    if !(lambda_max > 0.0) || size == 0 {
        return vec![0.0];
    }
    if size == 1 {
        return vec![lambda_max];
    }
    let step = GRID_RATIO.ln() / (size - 1) as f64;
    (0..size)
        .map(|i| lambda_max * (step * i as f64).exp())
        .collect()
}

/// Picks λ minimizing mean fold MSE; ties go to the larger λ.
///
/// `template` supplies the family and shape parameters; its own `lambda` is
/// ignored. Without an explicit grid the default 50-point grid is anchored at
/// the λ_max of the full data.
pub fn cv_select_lambda(
    x: &Matrix,
    y: &[f64],
    template: &PenaltySpec,
    grid: Option<&[f64]>,
    folds: usize,
    rng: &RngStream,
) -> Result<LambdaSelection> {
    if folds < 2 {
        return arg(format!("cross-validation needs at least 2 folds, got {folds}"));
    }
    let n = x.nrows();
    if y.len() != n {
        return arg(format!("response has {} values but X has {n} rows", y.len()));
    }
    let mut lambdas = match grid {
        Some(g) => {
            if g.is_empty() || g.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
                return arg("lambda grid must be non-empty with finite values ≥ 0");
            }
            g.to_vec()
        }
        None => default_lambda_grid(lambda_max(x, y, template)?, DEFAULT_GRID_SIZE),
    };
    lambdas.sort_by(|a, b| b.total_cmp(a));
    lambdas.dedup();

    if lambdas.len() == 1 {
        return Ok(LambdaSelection {
            lambda_star: lambdas[0],
            cv_mse: vec![f64::NAN],
            lambdas,
        });
    }

    let fold_sets = kfold_indices(n, folds, rng)?;
    let mut sse = vec![0.0; lambdas.len()];
    let mut in_fold = vec![false; n];
    for val in &fold_sets {
        in_fold.iter_mut().for_each(|f| *f = false);
        for &i in val {
            in_fold[i] = true;
        }
        let train: Vec<usize> = (0..n).filter(|&i| !in_fold[i]).collect();
        if train.len() < 2 {
            return arg("each cross-validation training split needs at least 2 rows");
        }
        let xt = x.select_rows(&train);
        let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let xv = x.select_rows(val);
        let path = fit_path(&xt, &yt, template, &lambdas)?;
        for (k, fit) in path.iter().enumerate() {
            let pred = predict_linear(fit, &xv)?;
            sse[k] += val
                .iter()
                .zip(pred)
                .map(|(&i, p)| (y[i] - p) * (y[i] - p))
                .sum::<f64>();
        }
    }
    let cv_mse: Vec<f64> = sse.iter().map(|s| s / n as f64).collect();
    let mut best = 0;
    for k in 1..cv_mse.len() {
        if cv_mse[k] < cv_mse[best] {
            best = k;
        }
    }
    Ok(LambdaSelection {
        lambda_star: lambdas[best],
        lambdas,
        cv_mse,
    })
}
