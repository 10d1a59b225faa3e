use super::{class_index, Label};
use crate::error::{arg, Result};
use crate::numerics::{mean_sd, Matrix};

const VAR_FLOOR_REL: f64 = 1e-9;
const VAR_FLOOR_ABS: f64 = 1e-12;

/// Gaussian naive Bayes with per-class, per-feature normal densities.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNbModel {
    /// Class labels, ascending.
    pub classes: Vec<Label>,
    pub priors: Vec<f64>,
    /// `means[c][j]`.
    pub means: Vec<Vec<f64>>,
    /// `variances[c][j]`, already floored.
    pub variances: Vec<Vec<f64>>,
}

impl GaussianNbModel {
    /// Sample means and variances per class; each variance is floored at
    /// `1e-9 · (overall variance of the feature + 1e-12)`.
    pub fn fit(x: &Matrix, y: &[Label]) -> Result<Self> {
        let n = x.nrows();
        if y.len() != n {
            return arg(format!("{} labels for {n} training rows", y.len()));
        }
        let (classes, idx) = class_index(y);
        if classes.is_empty() {
            return arg("naive Bayes needs training rows");
        }
        for (c, rows) in classes.iter().zip(&idx) {
            if rows.len() < 2 {
                return arg(format!("class {c} has {} training rows; naive Bayes needs ≥ 2", rows.len()));
            }
        }
        let priors = idx.iter().map(|r| r.len() as f64 / n as f64).collect();
        let p = x.ncols();
        let floors: Vec<f64> = x
            .columns()
            .map(|col| {
                let sd = mean_sd(col).1;
                VAR_FLOOR_REL * (sd * sd + VAR_FLOOR_ABS)
            })
            .collect();
        let mut means = Vec::with_capacity(classes.len());
        let mut variances = Vec::with_capacity(classes.len());
        let mut buf = Vec::new();
        for rows in &idx {
            let mut m = Vec::with_capacity(p);
            let mut v = Vec::with_capacity(p);
            for j in 0..p {
                let col = x.col(j);
                buf.clear();
                buf.extend(rows.iter().map(|&i| col[i]));
                let (mu, sd) = mean_sd(&buf);
                m.push(mu);
                v.push((sd * sd).max(floors[j]));
            }
            means.push(m);
            variances.push(v);
        }
        Ok(Self {
            classes,
            priors,
            means,
            variances,
        })
    }

    pub fn n_features(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    /// `log p(C_c) + Σ_j log N(x_j; μ_cj, σ²_cj)` for every class.
    pub fn log_posteriors(&self, row: &[f64]) -> Vec<f64> {
        use std::f64::consts::PI;
        (0..self.classes.len())
            .map(|c| {
                let mut s = self.priors[c].ln();
                for (j, &xj) in row.iter().enumerate() {
                    let v = self.variances[c][j];
                    let d = xj - self.means[c][j];
                    s -= 0.5 * (2.0 * PI * v).ln() + d * d / (2.0 * v);
                }
                s
            })
            .collect()
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        if x.ncols() != self.n_features() {
            return arg(format!("model has {} features, input has {}", self.n_features(), x.ncols()));
        }
        let mut buf = vec![0.0; x.ncols()];
        Ok((0..x.nrows())
            .map(|i| {
                x.row_into(i, &mut buf);
                let lp = self.log_posteriors(&buf);
                let mut best = 0;
                for c in 1..lp.len() {
                    if lp[c] > lp[best] {
                        best = c;
                    }
                }
                self.classes[best]
            })
            .collect())
    }
}

pub fn gaussian_nb_fit(x: &Matrix, y: &[Label]) -> Result<GaussianNbModel> {
    GaussianNbModel::fit(x, y)
}
