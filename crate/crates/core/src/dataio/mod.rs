//! Tabular data: CSV ingestion, feature-kind tagging, random splits and folds.

mod csvio;
mod split;

pub use csvio::{load_csv, parse_csv, write_csv, LoadOptions};
pub use split::{kfold_indices, split_indices, train_test_split};

use crate::error::{arg, Error, Result};
use crate::numerics::{ColumnStats, Matrix};
use crate::scaling::FeatureKind;

/// Integer class label.
pub type Label = i64;

/// Column headers of the credit-default file once converted to CSV, in order.
pub const CREDIT_COLUMNS: [&str; 25] = [
    "ID",
    "LIMIT_BAL",
    "SEX",
    "EDUCATION",
    "MARRIAGE",
    "AGE",
    "PAY_0",
    "PAY_2",
    "PAY_3",
    "PAY_4",
    "PAY_5",
    "PAY_6",
    "BILL_AMT1",
    "BILL_AMT2",
    "BILL_AMT3",
    "BILL_AMT4",
    "BILL_AMT5",
    "BILL_AMT6",
    "PAY_AMT1",
    "PAY_AMT2",
    "PAY_AMT3",
    "PAY_AMT4",
    "PAY_AMT5",
    "PAY_AMT6",
    "default payment next month",
];

pub const CREDIT_TARGET: &str = "default payment next month";

/// Load options for the credit file: ID dropped, SEX binary, EDUCATION
/// ordinal, MARRIAGE categorical (kept as codes unless `one_hot`).
pub fn credit_load_options(one_hot: bool) -> LoadOptions {
    let mut opts = LoadOptions::with_target(CREDIT_TARGET);
    opts.kind_overrides.insert("SEX".into(), FeatureKind::Binary);
    opts.kind_overrides.insert("EDUCATION".into(), FeatureKind::Ordinal);
    opts.kind_overrides.insert("MARRIAGE".into(), FeatureKind::Categorical);
    opts.one_hot = one_hot;
    opts
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub feature_names: Vec<String>,
    pub feature_kinds: Vec<FeatureKind>,
    /// Empty when the dataset was loaded without a target column.
    pub y: Vec<f64>,
    pub target_name: Option<String>,
}

impl Dataset {
    pub fn new(
        x: Matrix,
        feature_names: Vec<String>,
        feature_kinds: Vec<FeatureKind>,
        y: Vec<f64>,
        target_name: Option<String>,
    ) -> Result<Self> {
        let p = x.ncols();
        if feature_names.len() != p || feature_kinds.len() != p {
            return arg(format!(
                "{} names and {} kinds for {p} features",
                feature_names.len(),
                feature_kinds.len()
            ));
        }
        if target_name.is_some() && y.len() != x.nrows() {
            return arg(format!("target has {} values for {} rows", y.len(), x.nrows()));
        }
        if target_name.is_none() && !y.is_empty() {
            return arg("target values given without a target name");
        }
        for (j, kind) in feature_kinds.iter().enumerate() {
            if *kind == FeatureKind::Binary && x.nrows() > 0 {
                let distinct = ColumnStats::of(x.col(j))?.distinct_count;
                if distinct > 2 {
                    return arg(format!(
                        "feature `{}` is tagged binary but has {distinct} distinct values",
                        feature_names[j]
                    ));
                }
            }
        }
        Ok(Self {
            x,
            feature_names,
            feature_kinds,
            y,
            target_name,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn has_target(&self) -> bool {
        self.target_name.is_some()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select_rows(idx),
            feature_names: self.feature_names.clone(),
            feature_kinds: self.feature_kinds.clone(),
            y: if self.y.is_empty() {
                Vec::new()
            } else {
                idx.iter().map(|&i| self.y[i]).collect()
            },
            target_name: self.target_name.clone(),
        }
    }

    /// Target values as integer labels; fails on non-integral values.
    pub fn labels(&self) -> Result<Vec<Label>> {
        if !self.has_target() {
            return arg("dataset has no target column");
        }
        to_labels(&self.y)
    }

    /// Replaces every categorical feature with one 0/1 column per observed level.
    pub fn one_hot_categoricals(&self) -> Result<Dataset> {
        let mut cols: Vec<Vec<f64>> = Vec::new();
        let mut names = Vec::new();
        let mut kinds = Vec::new();
        for j in 0..self.n_features() {
            let col = self.x.col(j);
            if self.feature_kinds[j] != FeatureKind::Categorical {
                cols.push(col.to_vec());
                names.push(self.feature_names[j].clone());
                kinds.push(self.feature_kinds[j]);
                continue;
            }
            let mut levels = col.to_vec();
            levels.sort_by(f64::total_cmp);
            levels.dedup();
            for level in levels {
                cols.push(col.iter().map(|v| if *v == level { 1.0 } else { 0.0 }).collect());
                names.push(format!("{}={level}", self.feature_names[j]));
                kinds.push(FeatureKind::Binary);
            }
        }
        let x = if cols.is_empty() {
            Matrix::zeros(self.n_rows(), 0)
        } else {
            Matrix::from_columns(&cols)?
        };
        Dataset::new(x, names, kinds, self.y.clone(), self.target_name.clone())
    }
}

pub fn to_labels(y: &[f64]) -> Result<Vec<Label>> {
    y.iter()
        .enumerate()
        .map(|(i, v)| {
            if v.fract() == 0.0 && v.abs() < 9.0e15 {
                Ok(*v as Label)
            } else {
                Err(Error::Argument(format!("target value {v} at row {i} is not an integer label")))
            }
        })
        .collect()
}
