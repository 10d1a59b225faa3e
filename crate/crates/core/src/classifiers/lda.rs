use super::{class_index, Label};
use crate::error::{arg, Error, Result};
use crate::numerics::{backward_substitute_transposed, cholesky_factor, dot, forward_substitute, Matrix};

const JITTER: f64 = 1e-8;

/// Linear discriminant analysis with a pooled within-class covariance.
///
/// Features are internally centered by the overall mean and divided by their
/// pooled within-class standard deviation before the covariance is factored,
/// so the ridge jitter `1e-8 · trace/p` acts identically whatever the input
/// units are. Features with no within-class spread get weight 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    pub classes: Vec<Label>,
    pub priors: Vec<f64>,
    center: Vec<f64>,
    scale: Vec<f64>,
    /// `Σ⁻¹ μ_c` in internal coordinates, per class.
    coef: Vec<Vec<f64>>,
    /// `−½ μ_cᵀ Σ⁻¹ μ_c + log π_c`.
    offset: Vec<f64>,
}

impl LdaModel {
    pub fn fit(x: &Matrix, y: &[Label]) -> Result<Self> {
        let (n, p) = (x.nrows(), x.ncols());
        if y.len() != n {
            return arg(format!("{} labels for {n} training rows", y.len()));
        }
        let (classes, idx) = class_index(y);
        let k = classes.len();
        if k == 0 {
            return arg("LDA needs training rows");
        }
        if n <= k {
            return arg(format!("LDA needs more rows ({n}) than classes ({k})"));
        }
        let priors: Vec<f64> = idx.iter().map(|r| r.len() as f64 / n as f64).collect();
        let center: Vec<f64> = x.columns().map(|c| c.iter().sum::<f64>() / n as f64).collect();

        // Class means and within-class deviations, in centered coordinates.
        let mut class_means = vec![vec![0.0; p]; k];
        for (c, rows) in idx.iter().enumerate() {
            for j in 0..p {
                let col = x.col(j);
                class_means[c][j] = rows.iter().map(|&i| col[i] - center[j]).sum::<f64>() / rows.len() as f64;
            }
        }
        let mut dev = vec![0.0; n * p];
        for (c, rows) in idx.iter().enumerate() {
            for j in 0..p {
                let col = x.col(j);
                for &i in rows {
                    dev[j * n + i] = col[i] - center[j] - class_means[c][j];
                }
            }
        }
        let dof = (n - k) as f64;
        let scale: Vec<f64> = (0..p)
            .map(|j| {
                let d = &dev[j * n..(j + 1) * n];
                let sd = (dot(d, d) / dof).sqrt();
                if sd > 0.0 && sd.is_finite() {
                    1.0 / sd
                } else {
                    0.0
                }
            })
            .collect();
        for j in 0..p {
            for v in &mut dev[j * n..(j + 1) * n] {
                *v *= scale[j];
            }
            for m in class_means.iter_mut() {
                m[j] *= scale[j];
            }
        }

        let mut cov = vec![0.0; p * p];
        for a in 0..p {
            for b in 0..=a {
                let v = dot(&dev[a * n..(a + 1) * n], &dev[b * n..(b + 1) * n]) / dof;
                cov[a * p + b] = v;
                cov[b * p + a] = v;
            }
        }
        let trace: f64 = (0..p).map(|j| cov[j * p + j]).sum();
        let jitter = JITTER * if p > 0 && trace > 0.0 { trace / p as f64 } else { 1.0 };
        for j in 0..p {
            cov[j * p + j] += jitter;
        }
        let l = if p > 0 {
            Some(cholesky_factor(&Matrix::from_rows(&cov.chunks(p).collect::<Vec<_>>())?).map_err(|e| {
                Error::Numerical(format!("LDA pooled covariance factorization failed after jitter: {e}"))
            })?)
        } else {
            None
        };

        let mut coef = Vec::with_capacity(k);
        let mut offset = Vec::with_capacity(k);
        for c in 0..k {
            let a = match &l {
                Some(l) => backward_substitute_transposed(l, &forward_substitute(l, &class_means[c])),
                None => Vec::new(),
            };
            offset.push(-0.5 * dot(&a, &class_means[c]) + priors[c].ln());
            coef.push(a);
        }
        Ok(Self {
            classes,
            priors,
            center,
            scale,
            coef,
            offset,
        })
    }

    pub fn n_features(&self) -> usize {
        self.center.len()
    }

    /// Linear discriminant score of every class for one raw input row.
    pub fn discriminants(&self, row: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = row
            .iter()
            .zip(&self.center)
            .zip(&self.scale)
            .map(|((x, m), s)| (x - m) * s)
            .collect();
        self.coef.iter().zip(&self.offset).map(|(a, o)| dot(a, &z) + o).collect()
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        if x.ncols() != self.n_features() {
            return arg(format!("model has {} features, input has {}", self.n_features(), x.ncols()));
        }
        let mut buf = vec![0.0; x.ncols()];
        Ok((0..x.nrows())
            .map(|i| {
                x.row_into(i, &mut buf);
                let d = self.discriminants(&buf);
                let mut best = 0;
                for c in 1..d.len() {
                    if d[c] > d[best] {
                        best = c;
                    }
                }
                self.classes[best]
            })
            .collect())
    }
}

pub fn lda_fit(x: &Matrix, y: &[Label]) -> Result<LdaModel> {
    LdaModel::fit(x, y)
}
