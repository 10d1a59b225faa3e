//! Per-feature affine scalers `x′_j = α_j (x_j − μ_j)`.
//!
//! Every method, classical or adaptive, compiles down to a [`FittedScaler`]
//! holding one offset and one multiplier per feature. Parameters are
//! estimated on training rows only; [`FittedScaler::transform`] never refits.
//!
//! The adaptive family uses regression coefficients of the training response
//! as multipliers:
//!
//! * `Adaptive` multiplies each centered feature by its signed multivariate
//!   OLS coefficient.
//! * `GeneralizedAdaptive` uses `|β_j|^γ`, so `γ = 0` only centers and
//!   `γ = 1` matches `Adaptive` up to sign.
//! * `AdaptiveHighDim` replaces the multivariate fit with one univariate fit
//!   per feature, which stays defined when `p ≥ n`.

mod gamma_cv;
mod record;

use std::fmt;
use std::str::FromStr;

pub use gamma_cv::{select_gamma_cv, GammaSelection, DEFAULT_GAMMA_GRID};

use crate::error::{arg, Error, Result};
use crate::numerics::{column_stats, least_squares_with_rank, ColumnStats, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalingMethod {
    None,
    Adaptive,
    GeneralizedAdaptive,
    AdaptiveHighDim,
    Standardization,
    Range,
    Pareto,
    Vast,
    Level,
    Gelman2SD,
}

impl ScalingMethod {
    /// Display order used by every report: No, AS, GAS, ASHD, Stand, RS, PS, VS, LS, then Gelman.
    pub const ALL: [ScalingMethod; 10] = [
        ScalingMethod::None,
        ScalingMethod::Adaptive,
        ScalingMethod::GeneralizedAdaptive,
        ScalingMethod::AdaptiveHighDim,
        ScalingMethod::Standardization,
        ScalingMethod::Range,
        ScalingMethod::Pareto,
        ScalingMethod::Vast,
        ScalingMethod::Level,
        ScalingMethod::Gelman2SD,
    ];

    /// Short table label.
    pub fn label(self) -> &'static str {
        match self {
            ScalingMethod::None => "No",
            ScalingMethod::Adaptive => "AS",
            ScalingMethod::GeneralizedAdaptive => "GAS",
            ScalingMethod::AdaptiveHighDim => "ASHD",
            ScalingMethod::Standardization => "Stand",
            ScalingMethod::Range => "RS",
            ScalingMethod::Pareto => "PS",
            ScalingMethod::Vast => "VS",
            ScalingMethod::Level => "LS",
            ScalingMethod::Gelman2SD => "Gelman",
        }
    }

    /// Canonical lowercase name used in records, configs and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            ScalingMethod::None => "none",
            ScalingMethod::Adaptive => "adaptive",
            ScalingMethod::GeneralizedAdaptive => "generalized-adaptive",
            ScalingMethod::AdaptiveHighDim => "adaptive-high-dim",
            ScalingMethod::Standardization => "standardization",
            ScalingMethod::Range => "range",
            ScalingMethod::Pareto => "pareto",
            ScalingMethod::Vast => "vast",
            ScalingMethod::Level => "level",
            ScalingMethod::Gelman2SD => "gelman",
        }
    }

    pub fn needs_response(self) -> bool {
        matches!(
            self,
            ScalingMethod::Adaptive
                | ScalingMethod::GeneralizedAdaptive
                | ScalingMethod::AdaptiveHighDim
        )
    }

    pub fn uses_gamma(self) -> bool {
        matches!(
            self,
            ScalingMethod::GeneralizedAdaptive | ScalingMethod::AdaptiveHighDim
        )
    }

    pub fn table_rank(self) -> usize {
        Self::ALL.iter().position(|m| *m == self).unwrap_or(usize::MAX)
    }
}

impl fmt::Display for ScalingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScalingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.trim().to_ascii_lowercase().as_str() {
            "none" | "no" => ScalingMethod::None,
            "adaptive" | "as" => ScalingMethod::Adaptive,
            "generalized-adaptive" | "generalized_adaptive" | "gas" => {
                ScalingMethod::GeneralizedAdaptive
            }
            "adaptive-high-dim" | "adaptive_high_dim" | "ash" | "ashd" => {
                ScalingMethod::AdaptiveHighDim
            }
            "standardization" | "standardize" | "stand" | "zscore" | "z-score" => {
                ScalingMethod::Standardization
            }
            "range" | "rs" | "minmax" | "min-max" => ScalingMethod::Range,
            "pareto" | "ps" => ScalingMethod::Pareto,
            "vast" | "vs" => ScalingMethod::Vast,
            "level" | "ls" => ScalingMethod::Level,
            "gelman" | "gelman2sd" | "gelman-2sd" => ScalingMethod::Gelman2SD,
            other => return arg(format!("unknown scaling method `{other}`")),
        };
        Ok(m)
    }
}

/// A scaling method plus its exponent `γ ∈ [0, 1]` (ignored by methods
/// outside the generalized adaptive family).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalerSpec {
    pub method: ScalingMethod,
    pub gamma: f64,
}

impl ScalerSpec {
    pub fn new(method: ScalingMethod, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return arg(format!("gamma must lie in [0, 1], got {gamma}"));
        }
        Ok(Self { method, gamma })
    }

    /// `method` with `γ = 1`.
    pub const fn of(method: ScalingMethod) -> Self {
        Self { method, gamma: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Numeric,
    Binary,
    Categorical,
    Ordinal,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Numeric => "numeric",
            FeatureKind::Binary => "binary",
            FeatureKind::Categorical => "categorical",
            FeatureKind::Ordinal => "ordinal",
        }
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "numeric" => Ok(FeatureKind::Numeric),
            "binary" => Ok(FeatureKind::Binary),
            "categorical" => Ok(FeatureKind::Categorical),
            "ordinal" => Ok(FeatureKind::Ordinal),
            other => arg(format!("unknown feature kind `{other}`")),
        }
    }
}

/// Fitted offsets and multipliers; `transform` is exactly `α_j (x_ij − μ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedScaler {
    pub spec: ScalerSpec,
    pub offsets: Vec<f64>,
    pub multipliers: Vec<f64>,
    /// Features whose multiplier is exactly zero.
    pub zeroed_features: Vec<usize>,
    pub warnings: Vec<String>,
}

impl FittedScaler {
    pub fn n_features(&self) -> usize {
        self.offsets.len()
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.ncols() != self.n_features() {
            return arg(format!(
                "scaler was fitted on {} features but input has {}",
                self.n_features(),
                x.ncols()
            ));
        }
        let mut out = Vec::with_capacity(x.nrows() * x.ncols());
        for (j, col) in x.columns().enumerate() {
            let (mu, alpha) = (self.offsets[j], self.multipliers[j]);
            out.extend(col.iter().map(|v| alpha * (v - mu)));
        }
        Matrix::new(x.nrows(), x.ncols(), out)
    }

    fn from_parts(spec: ScalerSpec, offsets: Vec<f64>, multipliers: Vec<f64>, mut warnings: Vec<String>) -> Self {
        let zeroed_features: Vec<usize> = multipliers
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == 0.0)
            .map(|(j, _)| j)
            .collect();
        for &j in &zeroed_features {
            warnings.push(format!("feature {j} zeroed by {} scaling", spec.method.name()));
        }
        Self {
            spec,
            offsets,
            multipliers,
            zeroed_features,
            warnings,
        }
    }
}

fn inv_or_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        1.0 / v
    }
}

/// Fits `spec` on training rows.
///
/// `y` is required by the adaptive methods. `kinds`, when given, decides which
/// features Gelman scaling treats as binary; otherwise a feature is binary when
/// it has at most two distinct training values.
pub fn fit_scaler(
    spec: ScalerSpec,
    x: &Matrix,
    y: Option<&[f64]>,
    kinds: Option<&[FeatureKind]>,
) -> Result<FittedScaler> {
    if !(0.0..=1.0).contains(&spec.gamma) {
        return arg(format!("gamma must lie in [0, 1], got {}", spec.gamma));
    }
    let (n, p) = (x.nrows(), x.ncols());
    let stats = column_stats(x)?;
    if let Some(k) = kinds {
        if k.len() != p {
            return arg(format!("{} feature kinds given for {p} features", k.len()));
        }
    }
    if let Some(y) = y {
        if y.len() != n {
            return arg(format!("response has {} values but X has {n} rows", y.len()));
        }
    }
    let means: Vec<f64> = stats.iter().map(|s| s.mean).collect();
    let per_feature = |f: &dyn Fn(&ColumnStats) -> f64| -> Vec<f64> { stats.iter().map(f).collect() };

    let (offsets, multipliers) = match spec.method {
        ScalingMethod::None => (vec![0.0; p], vec![1.0; p]),
        ScalingMethod::Standardization => (means, per_feature(&|s| inv_or_zero(s.sample_sd))),
        ScalingMethod::Range => (
            per_feature(&|s| s.min),
            per_feature(&|s| inv_or_zero(s.max - s.min)),
        ),
        ScalingMethod::Pareto => (means, per_feature(&|s| inv_or_zero(s.sample_sd.sqrt()))),
        ScalingMethod::Vast => (
            means,
            per_feature(&|s| {
                let var = s.sample_sd * s.sample_sd;
                if var == 0.0 {
                    0.0
                } else {
                    s.mean / var
                }
            }),
        ),
        ScalingMethod::Level => {
            for (j, s) in stats.iter().enumerate() {
                if s.mean.abs() < 1e-12 {
                    return Err(Error::UnstableLevel {
                        feature: j,
                        mean: s.mean,
                    });
                }
            }
            (means, per_feature(&|s| 1.0 / s.mean))
        }
        ScalingMethod::Gelman2SD => {
            let mut mu = vec![0.0; p];
            let mut alpha = vec![1.0; p];
            for (j, s) in stats.iter().enumerate() {
                let binary = match kinds {
                    Some(k) => k[j] == FeatureKind::Binary,
                    None => s.distinct_count <= 2,
                };
                if !binary {
                    mu[j] = s.mean;
                    alpha[j] = inv_or_zero(2.0 * s.sample_sd);
                }
            }
            (mu, alpha)
        }
        ScalingMethod::Adaptive | ScalingMethod::GeneralizedAdaptive => {
            let y = require_response(spec.method, y)?;
            let beta = multivariate_coefficients(x, &means, y)?;
            let alpha = if spec.method == ScalingMethod::Adaptive {
                beta
            } else {
                beta.iter().map(|b| b.abs().powf(spec.gamma)).collect()
            };
            (means, alpha)
        }
        ScalingMethod::AdaptiveHighDim => {
            let y = require_response(spec.method, y)?;
            let beta = univariate_coefficients(x, &means, y);
            let alpha = beta.iter().map(|b| b.abs().powf(spec.gamma)).collect();
            (means, alpha)
        }
    };
    Ok(FittedScaler::from_parts(spec, offsets, multipliers, Vec::new()))
}

fn require_response(method: ScalingMethod, y: Option<&[f64]>) -> Result<&[f64]> {
    y.ok_or_else(|| {
        Error::Argument(format!("{} scaling needs a training response", method.name()))
    })
}

fn centered_response(y: &[f64]) -> Vec<f64> {
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| v - ybar).collect()
}

/// Multivariate OLS slopes of `y` on the centered design.
fn multivariate_coefficients(x: &Matrix, means: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let (n, p) = (x.nrows(), x.ncols());
    if n <= p {
        return arg(format!(
            "adaptive scaling needs more training rows than features (n = {n}, p = {p})"
        ));
    }
    let mut centered = Vec::with_capacity(n * p);
    for (j, col) in x.columns().enumerate() {
        centered.extend(col.iter().map(|v| v - means[j]));
    }
    let xc = Matrix::new(n, p, centered)?;
    let (beta, rank) = least_squares_with_rank(&xc, &centered_response(y))?;
    if rank < p {
        return Err(Error::Numerical(format!(
            "centered design is singular (rank {rank} < {p}); use adaptive-high-dim scaling"
        )));
    }
    Ok(beta)
}

/// Per-feature slopes `cov(x_j, y) / var(x_j)`; 0 for constant features.
fn univariate_coefficients(x: &Matrix, means: &[f64], y: &[f64]) -> Vec<f64> {
    let yc = centered_response(y);
    x.columns()
        .enumerate()
        .map(|(j, col)| {
            let mut sxy = 0.0;
            let mut sxx = 0.0;
            for (v, t) in col.iter().zip(&yc) {
                let d = v - means[j];
                sxy += d * t;
                sxx += d * d;
            }
            if sxx == 0.0 {
                0.0
            } else {
                sxy / sxx
            }
        })
        .collect()
}
