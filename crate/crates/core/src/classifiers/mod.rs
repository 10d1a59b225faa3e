//! The five classifiers used to probe scaling sensitivity on tabular data.

mod kmeans;
mod knn;
mod lda;
mod logistic;
mod naive_bayes;

pub use kmeans::{kmeans_nearest_centroid, KMeansModel, DEFAULT_MAX_ITER};
pub use knn::{knn_classify, KnnModel};
pub use lda::{lda_fit, LdaModel};
pub use logistic::{
    logistic_fit_gd, logistic_loss_grad, LogisticModel, LogisticParams, DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_EPOCHS, DEFAULT_TOL,
};
pub use naive_bayes::{gaussian_nb_fit, GaussianNbModel};

pub use crate::dataio::Label;

use std::collections::BTreeMap;

use crate::error::{arg, Error, Result};
use crate::numerics::{Matrix, RngStream};

pub const DEFAULT_KNN_K: usize = 5;

/// Most frequent label; ties go to the smaller label.
pub(crate) fn majority_label(labels: &[Label]) -> Label {
    let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let mut best = (Label::MAX, 0usize);
    for (l, c) in counts {
        if c > best.1 {
            best = (l, c);
        }
    }
    best.0
}

/// Sorted distinct labels and the row indices of each.
pub(crate) fn class_index(y: &[Label]) -> (Vec<Label>, Vec<Vec<usize>>) {
    let mut map: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, &l) in y.iter().enumerate() {
        map.entry(l).or_default().push(i);
    }
    map.into_iter().unzip()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassifierKind {
    Knn,
    KMeansNc,
    GaussianNb,
    LogisticGd,
    Lda,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::Knn,
        ClassifierKind::Lda,
        ClassifierKind::KMeansNc,
        ClassifierKind::GaussianNb,
        ClassifierKind::LogisticGd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::KMeansNc => "kmeans",
            ClassifierKind::GaussianNb => "gaussian-nb",
            ClassifierKind::LogisticGd => "logistic",
            ClassifierKind::Lda => "lda",
        }
    }

    /// Column heading used in reports.
    pub fn label(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "K-NN",
            ClassifierKind::KMeansNc => "K-Means",
            ClassifierKind::GaussianNb => "Naive Bayes",
            ClassifierKind::LogisticGd => "Logistic Reg",
            ClassifierKind::Lda => "LDA",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "knn" | "k-nn" => Ok(ClassifierKind::Knn),
            "kmeans" | "k-means" | "kmeans-nc" => Ok(ClassifierKind::KMeansNc),
            "gaussian-nb" | "nb" | "naive-bayes" | "gaussiannb" => Ok(ClassifierKind::GaussianNb),
            "logistic" | "logistic-gd" | "logit" => Ok(ClassifierKind::LogisticGd),
            "lda" => Ok(ClassifierKind::Lda),
            other => arg(format!("unknown classifier `{other}`")),
        }
    }
}

/// Hyper-parameters for fitting one classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierSpec {
    Knn { k: usize },
    /// `k = None` uses the number of training classes.
    KMeans { k: Option<usize>, max_iter: usize },
    GaussianNb,
    Logistic(LogisticParams),
    Lda,
}

impl ClassifierSpec {
    pub fn default_for(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::Knn => ClassifierSpec::Knn { k: DEFAULT_KNN_K },
            ClassifierKind::KMeansNc => ClassifierSpec::KMeans {
                k: None,
                max_iter: DEFAULT_MAX_ITER,
            },
            ClassifierKind::GaussianNb => ClassifierSpec::GaussianNb,
            ClassifierKind::LogisticGd => ClassifierSpec::Logistic(LogisticParams::default()),
            ClassifierKind::Lda => ClassifierSpec::Lda,
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierSpec::Knn { .. } => ClassifierKind::Knn,
            ClassifierSpec::KMeans { .. } => ClassifierKind::KMeansNc,
            ClassifierSpec::GaussianNb => ClassifierKind::GaussianNb,
            ClassifierSpec::Logistic(_) => ClassifierKind::LogisticGd,
            ClassifierSpec::Lda => ClassifierKind::Lda,
        }
    }

    /// Fits the classifier; `rng` is only consumed by k-means seeding.
    pub fn fit(&self, x: &Matrix, y: &[Label], rng: &RngStream) -> Result<ClassifierModel> {
        Ok(match *self {
            ClassifierSpec::Knn { k } => ClassifierModel::Knn(KnnModel::fit(x, y, k)?),
            ClassifierSpec::KMeans { k, max_iter } => {
                let k = k.unwrap_or_else(|| class_index(y).0.len());
                ClassifierModel::KMeans(KMeansModel::fit(x, y, k, rng, max_iter)?)
            }
            ClassifierSpec::GaussianNb => ClassifierModel::GaussianNb(GaussianNbModel::fit(x, y)?),
            ClassifierSpec::Logistic(params) => ClassifierModel::Logistic(LogisticModel::fit(x, y, &params)?),
            ClassifierSpec::Lda => ClassifierModel::Lda(LdaModel::fit(x, y)?),
        })
    }
}

/// A fitted classifier of any supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierModel {
    Knn(KnnModel),
    KMeans(KMeansModel),
    GaussianNb(GaussianNbModel),
    Logistic(LogisticModel),
    Lda(LdaModel),
}

impl ClassifierModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierModel::Knn(_) => ClassifierKind::Knn,
            ClassifierModel::KMeans(_) => ClassifierKind::KMeansNc,
            ClassifierModel::GaussianNb(_) => ClassifierKind::GaussianNb,
            ClassifierModel::Logistic(_) => ClassifierKind::LogisticGd,
            ClassifierModel::Lda(_) => ClassifierKind::Lda,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            ClassifierModel::Knn(m) => m.n_features(),
            ClassifierModel::KMeans(m) => m.n_features(),
            ClassifierModel::GaussianNb(m) => m.n_features(),
            ClassifierModel::Logistic(m) => m.n_features(),
            ClassifierModel::Lda(m) => m.n_features(),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        match self {
            ClassifierModel::Knn(m) => m.predict(x),
            ClassifierModel::KMeans(m) => m.predict(x),
            ClassifierModel::GaussianNb(m) => m.predict(x),
            ClassifierModel::Logistic(m) => m.predict(x),
            ClassifierModel::Lda(m) => m.predict(x),
        }
    }
}

pub fn classify(model: &ClassifierModel, x: &Matrix) -> Result<Vec<Label>> {
    model.predict(x)
}
