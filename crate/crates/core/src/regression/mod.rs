//! Linear model zoo: OLS and penalized least squares (Lasso, adaptive Lasso,
//! SCAD, MCP, nonnegative garrote) fitted by cyclic coordinate descent.
//!
//! Penalized fits minimize `½‖y − β₀ − Xβ‖² + Σ_j P(β_j)` with an unpenalized
//! intercept and no `1/n` factor on the loss.

mod cd;
mod cv;
mod penalty;
mod record;

use std::fmt;
use std::str::FromStr;

pub use cv::{cv_select_lambda, default_lambda_grid, lambda_max, LambdaSelection, DEFAULT_GRID_SIZE};
pub use penalty::{mcp_argmin, mcp_penalty, scad_argmin, scad_penalty, soft_threshold};

use crate::error::{arg, Error, Result};
use crate::numerics::{dot, solve_least_squares, Matrix};

pub const DEFAULT_SCAD_A: f64 = 3.7;
pub const DEFAULT_MCP_GAMMA: f64 = 3.0;

/// Intercept, coefficients and solver diagnostics of a linear fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// `{ j : β_j ≠ 0 }`, ascending.
    pub selected_support: Vec<usize>,
    /// Objective before the first sweep and after each sweep.
    pub objective_trace: Vec<f64>,
    pub lambda_used: f64,
    pub sweeps: usize,
}

impl LinearFit {
    pub fn new(intercept: f64, coefficients: Vec<f64>, objective_trace: Vec<f64>, lambda_used: f64, sweeps: usize) -> Self {
        let selected_support = coefficients
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect();
        Self {
            intercept,
            coefficients,
            selected_support,
            objective_trace,
            lambda_used,
            sweeps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenaltyFamily {
    Lasso,
    AdaptiveLasso,
    Scad,
    Mcp,
    Garrote,
}

impl PenaltyFamily {
    pub fn name(self) -> &'static str {
        match self {
            PenaltyFamily::Lasso => "lasso",
            PenaltyFamily::AdaptiveLasso => "adaptive-lasso",
            PenaltyFamily::Scad => "scad",
            PenaltyFamily::Mcp => "mcp",
            PenaltyFamily::Garrote => "garrote",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PenaltyFamily::Lasso => "LASSO",
            PenaltyFamily::AdaptiveLasso => "Adaptive LASSO",
            PenaltyFamily::Scad => "SCAD",
            PenaltyFamily::Mcp => "MCP",
            PenaltyFamily::Garrote => "Garrote",
        }
    }
}

impl fmt::Display for PenaltyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PenaltyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lasso" => Ok(PenaltyFamily::Lasso),
            "adaptive-lasso" | "adaptive_lasso" | "alasso" => Ok(PenaltyFamily::AdaptiveLasso),
            "scad" => Ok(PenaltyFamily::Scad),
            "mcp" => Ok(PenaltyFamily::Mcp),
            "garrote" | "nng" => Ok(PenaltyFamily::Garrote),
            other => arg(format!("unknown penalty family `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySpec {
    pub family: PenaltyFamily,
    pub lambda: f64,
    pub scad_a: f64,
    pub mcp_gamma: f64,
    /// Adaptive-Lasso weights `ω_j`; defaults to `1 / |β̂_j^ols|`.
    pub adaptive_weights: Option<Vec<f64>>,
}

impl PenaltySpec {
    pub fn new(family: PenaltyFamily, lambda: f64) -> Self {
        Self {
            family,
            lambda,
            scad_a: DEFAULT_SCAD_A,
            mcp_gamma: DEFAULT_MCP_GAMMA,
            adaptive_weights: None,
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return arg(format!("lambda must be finite and ≥ 0, got {}", self.lambda));
        }
        if !(self.scad_a > 2.0) {
            return arg(format!("SCAD a must exceed 2, got {}", self.scad_a));
        }
        if !(self.mcp_gamma > 1.0) {
            return arg(format!("MCP gamma must exceed 1, got {}", self.mcp_gamma));
        }
        if let Some(w) = &self.adaptive_weights {
            if w.len() != p {
                return arg(format!("{} adaptive weights for {p} features", w.len()));
            }
            if w.iter().any(|v| !(*v > 0.0)) {
                return arg("adaptive weights must be positive");
            }
        }
        Ok(())
    }
}

/// Least squares with intercept; minimum-norm slopes when the centered design is rank deficient.
pub fn fit_ols(x: &Matrix, y: &[f64]) -> Result<LinearFit> {
    if x.nrows() < 2 {
        return arg("OLS needs at least two rows");
    }
    let d = cd::center(x, y)?;
    let beta = solve_least_squares(&d.xc, &d.yc)?;
    let intercept = d.y_mean - dot(&d.x_means, &beta);
    let r: Vec<f64> = d
        .yc
        .iter()
        .zip(d.xc.matvec(&beta)?)
        .map(|(a, b)| a - b)
        .collect();
    let rss = 0.5 * dot(&r, &r);
    Ok(LinearFit::new(intercept, beta, vec![rss], 0.0, 0))
}

/// Penalized fit at `spec.lambda` from a zero start.
pub fn fit_penalized(x: &Matrix, y: &[f64], spec: &PenaltySpec) -> Result<LinearFit> {
    let prep = cd::Prepared::new(x, y, spec)?;
    let mut b = prep.zero_start();
    let (trace, sweeps) = prep.solve(spec.lambda, &mut b)?;
    Ok(prep.to_fit(&b, spec.lambda, trace, sweeps))
}

/// `intercept + X β`.
pub fn predict_linear(fit: &LinearFit, x: &Matrix) -> Result<Vec<f64>> {
    if x.ncols() != fit.coefficients.len() {
        return arg(format!(
            "fit has {} coefficients but input has {} columns",
            fit.coefficients.len(),
            x.ncols()
        ));
    }
    let mut out = x.matvec(&fit.coefficients)?;
    for v in &mut out {
        *v += fit.intercept;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthonormal_design() -> Matrix {
        // Columns orthonormal and orthogonal to the intercept.
        let h = 0.5;
        Matrix::from_rows(&[[h, h], [h, -h], [-h, h], [-h, -h]]).unwrap()
    }

    #[test]
    fn ols_exact_line() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = fit_ols(&x, &y).unwrap();
        assert!((f.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        let pred = predict_linear(&f, &x).unwrap();
        for (p, t) in pred.iter().zip(&y) {
            assert!((p - t).abs() < 1e-8);
        }
    }

    #[test]
    fn ols_ignores_zero_column() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]).unwrap();
        let y = [1.0, 2.9, 5.2, 7.0];
        let f = fit_ols(&x, &y).unwrap();
        let g = fit_ols(&x.select_columns(&[0]), &y).unwrap();
        assert_eq!(f.coefficients[1], 0.0);
        assert!((f.coefficients[0] - g.coefficients[0]).abs() < 1e-12);
        assert_eq!(f.selected_support, vec![0]);
    }

    #[test]
    fn lasso_soft_thresholds_orthonormal_ols() {
        let x = orthonormal_design();
        // y = 2 x1 - 0.3 x2 + 4, so β̂ols = (2, -0.3).
        let y: Vec<f64> = (0..4).map(|i| 2.0 * x[(i, 0)] - 0.3 * x[(i, 1)] + 4.0).collect();
        let f = fit_penalized(&x, &y, &PenaltySpec::new(PenaltyFamily::Lasso, 0.5)).unwrap();
        assert!((f.coefficients[0] - 1.5).abs() < 1e-6);
        assert_eq!(f.coefficients[1], 0.0);
        assert_eq!(f.selected_support, vec![0]);
    }

    #[test]
    fn lasso_above_lambda_max_is_empty() {
        let x = Matrix::from_rows(&[[1.0, 0.3], [2.0, -1.0], [0.5, 2.0], [3.0, 1.0], [-1.0, 0.0]]).unwrap();
        let y = [1.0, 2.0, 0.0, 4.0, -2.0];
        let spec = PenaltySpec::new(PenaltyFamily::Lasso, 0.0);
        let lmax = lambda_max(&x, &y, &spec).unwrap();
        let ybar = y.iter().sum::<f64>() / 5.0;
        let yc: Vec<f64> = y.iter().map(|v| v - ybar).collect();
        let direct = x.t_matvec(&yc).unwrap().into_iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((lmax - direct).abs() < 1e-10 * direct);
        let f = fit_penalized(&x, &y, &spec.with_lambda(direct)).unwrap();
        assert!(f.selected_support.is_empty());
        assert!((f.intercept - ybar).abs() < 1e-12);
        let g = fit_penalized(&x, &y, &spec.with_lambda(0.99 * direct)).unwrap();
        assert!(!g.selected_support.is_empty());
    }

    #[test]
    fn small_column_drops_out() {
        let x = orthonormal_design();
        let y: Vec<f64> = (0..4).map(|i| 2.0 * x[(i, 0)] + 1.0 * x[(i, 1)]).collect();
        let spec = PenaltySpec::new(PenaltyFamily::Lasso, 0.5);
        let before = fit_penalized(&x, &y, &spec).unwrap();
        assert_eq!(before.selected_support, vec![0, 1]);
        // After shrinking x2 by c = 0.01, x2ᵀy = c·β̂ols = 0.01 < λ < β̂ols = 1.
        let mut shrunk = x.clone();
        for v in shrunk.col_mut(1) {
            *v *= 0.01;
        }
        let after = fit_penalized(&shrunk, &y, &spec).unwrap();
        assert_eq!(after.selected_support, vec![0]);
    }

    #[test]
    fn garrote_orthonormal_closed_form() {
        // Orthonormal design: c_j = (1 − λ / β̂_j²)₊.
        let x = orthonormal_design();
        let y: Vec<f64> = (0..4).map(|i| 2.0 * x[(i, 0)] - 0.6 * x[(i, 1)]).collect();
        let lambda = 0.5;
        let f = fit_penalized(&x, &y, &PenaltySpec::new(PenaltyFamily::Garrote, lambda)).unwrap();
        let expect = |b: f64| b * (1.0 - lambda / (b * b)).max(0.0);
        assert!((f.coefficients[0] - expect(2.0)).abs() < 1e-6);
        assert_eq!(f.coefficients[1], 0.0);
    }

    #[test]
    fn adaptive_lasso_orthonormal_closed_form() {
        // Weighted soft threshold with ω_j = 1/|β̂_j|.
        let x = orthonormal_design();
        let y: Vec<f64> = (0..4).map(|i| 2.0 * x[(i, 0)] - 0.6 * x[(i, 1)]).collect();
        let lambda = 0.5;
        let f = fit_penalized(&x, &y, &PenaltySpec::new(PenaltyFamily::AdaptiveLasso, lambda)).unwrap();
        assert!((f.coefficients[0] - soft_threshold(2.0, lambda / 2.0)).abs() < 1e-6);
        assert_eq!(f.coefficients[1], 0.0);
        let custom = PenaltySpec {
            adaptive_weights: Some(vec![1.0, 0.1]),
            ..PenaltySpec::new(PenaltyFamily::AdaptiveLasso, lambda)
        };
        let g = fit_penalized(&x, &y, &custom).unwrap();
        assert!((g.coefficients[1] - soft_threshold(-0.6, 0.05)).abs() < 1e-6);
    }

    #[test]
    fn garrote_needs_well_posed_pilot() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
        let y = [1.0, 2.0, 2.5];
        for fam in [PenaltyFamily::Garrote, PenaltyFamily::AdaptiveLasso] {
            assert!(matches!(
                fit_penalized(&x, &y, &PenaltySpec::new(fam, 0.1)),
                Err(Error::Numerical(_))
            ));
        }
    }

    #[test]
    fn spec_validation() {
        let x = orthonormal_design();
        let y = [1.0, 2.0, 3.0, 4.0];
        let bad = [
            PenaltySpec::new(PenaltyFamily::Lasso, -1.0),
            PenaltySpec { scad_a: 2.0, ..PenaltySpec::new(PenaltyFamily::Scad, 1.0) },
            PenaltySpec { mcp_gamma: 1.0, ..PenaltySpec::new(PenaltyFamily::Mcp, 1.0) },
            PenaltySpec { adaptive_weights: Some(vec![1.0, 0.0]), ..PenaltySpec::new(PenaltyFamily::AdaptiveLasso, 1.0) },
        ];
        for spec in bad {
            assert!(matches!(fit_penalized(&x, &y, &spec), Err(Error::Argument(_))), "{spec:?}");
        }
    }

    #[test]
    fn predict_checks_width() {
        let f = LinearFit::new(1.0, vec![0.0, 0.0], vec![], 0.0, 0);
        assert_eq!(predict_linear(&f, &Matrix::zeros(3, 2)).unwrap(), vec![1.0; 3]);
        assert!(predict_linear(&f, &Matrix::zeros(3, 1)).is_err());
    }
}
