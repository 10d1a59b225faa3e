use super::{class_index, Label};
use crate::error::{arg, Error, Result};
use crate::numerics::Matrix;

pub const DEFAULT_LEARNING_RATE: f64 = 0.1;
pub const DEFAULT_MAX_EPOCHS: usize = 5000;
pub const DEFAULT_TOL: f64 = 1e-6;
const DIVERGENCE_STREAK: usize = 10;
/// A loss this many times the starting loss counts as divergence.
const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub tol: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            learning_rate: DEFAULT_LEARNING_RATE,
            max_epochs: DEFAULT_MAX_EPOCHS,
            tol: DEFAULT_TOL,
        }
    }
}

/// Binary logistic regression fitted by full-batch gradient descent.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub epochs_used: usize,
    /// `[negative, positive]` labels; the positive class is the larger label.
    pub classes: [Label; 2],
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean log-loss and its gradient `(∂/∂w, ∂/∂b)` for targets in {0, 1}.
pub fn logistic_loss_grad(x: &Matrix, y01: &[f64], w: &[f64], b: f64) -> Result<(f64, Vec<f64>, f64)> {
    let n = x.nrows();
    if y01.len() != n || w.len() != x.ncols() || n == 0 {
        return arg("logistic loss: dimension mismatch");
    }
    let mut z = x.matvec(w)?;
    let mut loss = 0.0;
    for (zi, yi) in z.iter_mut().zip(y01) {
        let zz = *zi + b;
        loss += softplus(zz) - yi * zz;
        *zi = sigmoid(zz) - yi;
    }
    let inv = 1.0 / n as f64;
    let gw: Vec<f64> = x.t_matvec(&z)?.into_iter().map(|g| g * inv).collect();
    let gb = z.iter().sum::<f64>() * inv;
    Ok((loss * inv, gw, gb))
}

impl LogisticModel {
    /// Gradient descent on the mean log-loss with an unpenalized intercept,
    /// stopping once `‖∇‖∞ < tol` or after `max_epochs`. Ten consecutive loss
    /// increases, a non-finite loss, or a loss far above the starting one abort with a training error.
    pub fn fit(x: &Matrix, y: &[Label], params: &LogisticParams) -> Result<Self> {
        let n = x.nrows();
        if y.len() != n {
            return arg(format!("{} labels for {n} training rows", y.len()));
        }
        if !(params.learning_rate > 0.0) || !params.learning_rate.is_finite() {
            return arg(format!("learning rate must be positive, got {}", params.learning_rate));
        }
        if !(params.tol >= 0.0) {
            return arg("tolerance must be ≥ 0");
        }
        let (classes, _) = class_index(y);
        if classes.len() != 2 {
            return arg(format!(
                "logistic regression needs exactly 2 classes, found {}",
                classes.len()
            ));
        }
        let y01: Vec<f64> = y.iter().map(|&l| if l == classes[1] { 1.0 } else { 0.0 }).collect();
        let lr = params.learning_rate;
        let mut w = vec![0.0; x.ncols()];
        let mut b = 0.0;
        let mut prev = f64::INFINITY;
        let mut first = f64::INFINITY;
        let mut streak = 0;
        let mut epochs_used = params.max_epochs;
        for epoch in 0..params.max_epochs {
            let (loss, gw, gb) = logistic_loss_grad(x, &y01, &w, b)?;
            if epoch == 0 {
                first = loss;
            }
            if !loss.is_finite() || loss > DIVERGENCE_FACTOR * first {
                return Err(Error::Training(format!(
                    "logistic loss diverged to {loss} at epoch {epoch}; use a smaller learning rate"
                )));
            }
            streak = if loss > prev { streak + 1 } else { 0 };
            if streak >= DIVERGENCE_STREAK {
                return Err(Error::Training(format!(
                    "logistic loss increased for {DIVERGENCE_STREAK} consecutive epochs \
                     (learning rate {lr}); use a smaller learning rate"
                )));
            }
            prev = loss;
            let gmax = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
            if gmax < params.tol {
                epochs_used = epoch;
                break;
            }
            for (wj, gj) in w.iter_mut().zip(&gw) {
                *wj -= lr * gj;
            }
            b -= lr * gb;
        }
        Ok(Self {
            weights: w,
            intercept: b,
            epochs_used,
            classes: [classes[0], classes[1]],
        })
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        if x.ncols() != self.weights.len() {
            return arg(format!("model has {} features, input has {}", self.weights.len(), x.ncols()));
        }
        Ok(x
            .matvec(&self.weights)?
            .into_iter()
            .map(|z| if z + self.intercept > 0.0 { self.classes[1] } else { self.classes[0] })
            .collect())
    }
}

pub fn logistic_fit_gd(x: &Matrix, y: &[Label], params: &LogisticParams) -> Result<LogisticModel> {
    LogisticModel::fit(x, y, params)
}
