//! Downstream models placed after a scaler: linear regressions (λ chosen by
//! cross-validation) and the classifiers, behind one fit/score interface.

use crate::classifiers::{ClassifierKind, ClassifierModel, ClassifierSpec};
use crate::dataio::to_labels;
use crate::error::{arg, Error, Result};
use crate::numerics::{Matrix, RngStream};
use crate::regression::{cv_select_lambda, fit_ols, fit_penalized, predict_linear, LinearFit, PenaltyFamily, PenaltySpec};

pub const DEFAULT_FOLDS: usize = 5;

/// Stream tags for the sub-tasks of one model fit.
const TAG_LAMBDA_FOLDS: u64 = 0x4c41_4d42;
const TAG_CLASSIFIER: u64 = 0x434c_4153;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Ols,
    /// Penalized regression with λ picked by `folds`-fold CV on the default grid.
    Penalized { template: PenaltySpec, folds: usize },
    Classifier(ClassifierSpec),
}

impl ModelSpec {
    pub fn penalized(family: PenaltyFamily) -> Self {
        ModelSpec::Penalized {
            template: PenaltySpec::new(family, 0.0),
            folds: DEFAULT_FOLDS,
        }
    }

    pub fn classifier(kind: ClassifierKind) -> Self {
        ModelSpec::Classifier(ClassifierSpec::default_for(kind))
    }

    pub fn is_classifier(&self) -> bool {
        matches!(self, ModelSpec::Classifier(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Ols => "ols",
            ModelSpec::Penalized { template, .. } => template.family.name(),
            ModelSpec::Classifier(c) => c.kind().name(),
        }
    }

    /// Column heading used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            ModelSpec::Ols => "OLS",
            ModelSpec::Penalized { template, .. } => template.family.label(),
            ModelSpec::Classifier(c) => c.kind().label(),
        }
    }

    pub fn fit(&self, x: &Matrix, y: &[f64], rng: &RngStream) -> Result<FittedModel> {
        match self {
            ModelSpec::Ols => Ok(FittedModel::Linear(fit_ols(x, y)?)),
            ModelSpec::Penalized { template, folds } => {
                let sel = cv_select_lambda(x, y, template, None, *folds, &rng.derive(TAG_LAMBDA_FOLDS))?;
                Ok(FittedModel::Linear(fit_penalized(x, y, &template.with_lambda(sel.lambda_star))?))
            }
            ModelSpec::Classifier(spec) => {
                let labels = to_labels(y)?;
                Ok(FittedModel::Classifier(spec.fit(x, &labels, &rng.derive(TAG_CLASSIFIER))?))
            }
        }
    }
}

impl std::str::FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "ols" {
            return Ok(ModelSpec::Ols);
        }
        if let Ok(f) = t.parse::<PenaltyFamily>() {
            return Ok(ModelSpec::penalized(f));
        }
        if let Ok(k) = t.parse::<ClassifierKind>() {
            return Ok(ModelSpec::classifier(k));
        }
        arg(format!("unknown model `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Linear(LinearFit),
    Classifier(ClassifierModel),
}

impl FittedModel {
    /// Predictions as reals (class labels converted exactly).
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        match self {
            FittedModel::Linear(f) => predict_linear(f, x),
            FittedModel::Classifier(m) => Ok(m.predict(x)?.into_iter().map(|l| l as f64).collect()),
        }
    }

    /// Mean squared error for regressions, misclassification rate for classifiers.
    pub fn loss(&self, x: &Matrix, y: &[f64]) -> Result<f64> {
        let pred = self.predict(x)?;
        if pred.len() != y.len() || y.is_empty() {
            return arg("validation targets do not match the validation rows");
        }
        let total: f64 = match self {
            FittedModel::Linear(_) => pred.iter().zip(y).map(|(p, t)| (p - t) * (p - t)).sum(),
            FittedModel::Classifier(_) => pred.iter().zip(y).filter(|(p, t)| p != t).count() as f64,
        };
        Ok(total / y.len() as f64)
    }

    pub fn linear(&self) -> Option<&LinearFit> {
        match self {
            FittedModel::Linear(f) => Some(f),
            FittedModel::Classifier(_) => None,
        }
    }
}
