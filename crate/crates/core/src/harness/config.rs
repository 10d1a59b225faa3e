//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! experiment = sim2
//! scalers = none,adaptive,ashd,standardization,pareto,range,vast,level
//! models = lasso
//! reps = 100
//! seed = 1
//! case = 1
//! correlated = false
//! ```
//!
//! Every key except `experiment` is optional. A scaler written as `gas` has
//! its γ chosen by cross-validation inside each cell; `gas:0.5` fixes it.

use std::path::PathBuf;
use std::str::FromStr;

use crate::classifiers::{ClassifierKind, ClassifierSpec, LogisticParams};
use crate::dataio::CREDIT_TARGET;
use crate::datagen::{sim1_scenario, sim2_scenario_with, CovarianceMode, SimScenario};
use crate::error::{arg, Error, Result};
use crate::kv::{format_f64_list, KvRecord};
use crate::models::{ModelSpec, DEFAULT_FOLDS};
use crate::regression::PenaltyFamily;
use crate::scaling::{ScalerSpec, ScalingMethod, DEFAULT_GAMMA_GRID};

pub const DEFAULT_REPS: usize = 100;
/// Replications per classifier in the empirical study when `reps` is unset.
pub const EMPIRICAL_REPS_SENSITIVE: usize = 100;
pub const EMPIRICAL_REPS_OTHER: usize = 10;
pub const DEFAULT_TRAIN_RATIO: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Sim1,
    Sim2,
    Empirical,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sim1 => "sim1",
            Experiment::Sim2 => "sim2",
            Experiment::Empirical => "empirical",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sim1" => Ok(Experiment::Sim1),
            "sim2" => Ok(Experiment::Sim2),
            "empirical" => Ok(Experiment::Empirical),
            other => arg(format!("unknown experiment `{other}` (expected sim1, sim2 or empirical)")),
        }
    }
}

/// One scaler row of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalerChoice {
    pub spec: ScalerSpec,
    /// Choose γ per cell by cross-validation instead of using `spec.gamma`.
    pub gamma_cv: bool,
}

impl ScalerChoice {
    pub fn fixed(spec: ScalerSpec) -> Self {
        Self { spec, gamma_cv: false }
    }

    pub fn method(&self) -> ScalingMethod {
        self.spec.method
    }

    pub fn to_config(&self) -> String {
        if self.spec.method.uses_gamma() && !self.gamma_cv {
            format!("{}:{:?}", self.spec.method.name(), self.spec.gamma)
        } else {
            self.spec.method.name().to_string()
        }
    }
}

impl FromStr for ScalerChoice {
    type Err = Error;

    /// `method` or `method:gamma`. A bare `gas` selects γ by CV; a bare
    /// `ashd` uses γ = 1.
    fn from_str(s: &str) -> Result<Self> {
        let (name, gamma) = match s.split_once(':') {
            Some((n, g)) => (
                n,
                Some(
                    g.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Argument(format!("bad gamma in scaler `{s}`")))?,
                ),
            ),
            None => (s, None),
        };
        let method: ScalingMethod = name.parse()?;
        match gamma {
            Some(g) => {
                if !method.uses_gamma() {
                    return arg(format!("scaler `{}` takes no gamma", method.name()));
                }
                Ok(Self::fixed(ScalerSpec::new(method, g)?))
            }
            None => Ok(Self {
                spec: ScalerSpec::of(method),
                gamma_cv: method == ScalingMethod::GeneralizedAdaptive,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub scalers: Vec<ScalerChoice>,
    pub models: Vec<ModelSpec>,
    /// `None` uses the protocol default (100, or 100/10 per classifier for
    /// the empirical study).
    pub reps: Option<usize>,
    pub base_seed: u64,
    pub sim2_case: usize,
    pub correlated: bool,
    pub covariance_mode: CovarianceMode,
    /// Replaces the built-in scenario of a simulation experiment.
    pub scenario: Option<SimScenario>,
    pub data_path: Option<PathBuf>,
    /// Response column of the empirical data file.
    pub target: String,
    pub one_hot: bool,
    pub gamma_grid: Vec<f64>,
    pub folds: usize,
    pub train_ratio: f64,
}

fn parse_list<T: FromStr<Err = Error>>(v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse()).collect()
}

impl ExperimentConfig {
    /// The protocol defaults for `experiment`.
    pub fn new(experiment: Experiment) -> Self {
        use ScalingMethod::*;
        let methods: &[ScalingMethod] = match experiment {
            Experiment::Sim1 => &[None, Adaptive, GeneralizedAdaptive, AdaptiveHighDim, Standardization, Range, Pareto, Vast, Level],
            Experiment::Sim2 => &[None, Adaptive, AdaptiveHighDim, Standardization, Pareto, Range, Vast, Level],
            Experiment::Empirical => &[None, Standardization, Range, Adaptive, GeneralizedAdaptive, AdaptiveHighDim, Pareto, Vast, Level],
        };
        let scalers = methods
            .iter()
            .map(|m| ScalerChoice {
                spec: ScalerSpec::of(*m),
                gamma_cv: *m == GeneralizedAdaptive,
            })
            .collect();
        let models = match experiment {
            Experiment::Sim1 => [
                PenaltyFamily::Lasso,
                PenaltyFamily::AdaptiveLasso,
                PenaltyFamily::Garrote,
                PenaltyFamily::Scad,
                PenaltyFamily::Mcp,
            ]
            .into_iter()
            .map(ModelSpec::penalized)
            .collect(),
            Experiment::Sim2 => vec![ModelSpec::penalized(PenaltyFamily::Lasso)],
            Experiment::Empirical => ClassifierKind::ALL.into_iter().map(ModelSpec::classifier).collect(),
        };
        Self {
            experiment,
            scalers,
            models,
            reps: Option::None,
            base_seed: 0,
            sim2_case: 1,
            correlated: false,
            covariance_mode: CovarianceMode::default(),
            scenario: Option::None,
            data_path: Option::None,
            target: CREDIT_TARGET.to_string(),
            one_hot: false,
            gamma_grid: DEFAULT_GAMMA_GRID.to_vec(),
            folds: DEFAULT_FOLDS,
            train_ratio: DEFAULT_TRAIN_RATIO,
        }
    }

    /// Replications for one model column.
    pub fn reps_for(&self, model: &ModelSpec) -> usize {
        if let Some(r) = self.reps {
            return r;
        }
        match (self.experiment, model) {
            (Experiment::Empirical, ModelSpec::Classifier(c))
                if matches!(c.kind(), ClassifierKind::Knn | ClassifierKind::KMeansNc) =>
            {
                EMPIRICAL_REPS_SENSITIVE
            }
            (Experiment::Empirical, _) => EMPIRICAL_REPS_OTHER,
            _ => DEFAULT_REPS,
        }
    }

    pub fn max_reps(&self) -> usize {
        self.models.iter().map(|m| self.reps_for(m)).max().unwrap_or(0)
    }

    /// The scenario a simulation experiment draws from.
    pub fn sim_scenario(&self) -> Result<SimScenario> {
        if let Some(s) = &self.scenario {
            return Ok(s.clone());
        }
        let mut s = match self.experiment {
            Experiment::Sim1 => sim1_scenario(),
            Experiment::Sim2 => sim2_scenario_with(self.sim2_case, self.correlated, self.covariance_mode)?,
            Experiment::Empirical => return arg("the empirical study has no simulation scenario"),
        };
        s.train_ratio = self.train_ratio;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scalers.is_empty() {
            return arg("at least one scaler is required");
        }
        if self.models.is_empty() {
            return arg("at least one model is required");
        }
        if self.reps == Some(0) {
            return arg("reps must be at least 1");
        }
        if self.folds < 2 {
            return arg(format!("folds must be at least 2, got {}", self.folds));
        }
        if !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return arg(format!("train ratio must lie in (0, 1), got {}", self.train_ratio));
        }
        if self.gamma_grid.is_empty() || self.gamma_grid.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return arg("gamma grid must be non-empty with values in [0, 1]");
        }
        for (i, a) in self.scalers.iter().enumerate() {
            if self.scalers[..i].iter().any(|b| b == a) {
                return arg(format!("scaler `{}` listed twice", a.to_config()));
            }
        }
        for (i, a) in self.models.iter().enumerate() {
            if self.models[..i].iter().any(|b| b.name() == a.name()) {
                return arg(format!("model `{}` listed twice", a.name()));
            }
        }
        match self.experiment {
            Experiment::Sim1 | Experiment::Sim2 => {
                if !(1..=4).contains(&self.sim2_case) {
                    return arg(format!("sim2 case must be 1–4, got {}", self.sim2_case));
                }
                if let Some(m) = self.models.iter().find(|m| m.is_classifier()) {
                    return arg(format!("model `{}` is a classifier; simulations need regressions", m.name()));
                }
                self.sim_scenario()?.validate()?;
            }
            Experiment::Empirical => {
                // The data path may still come from the command line; a run
                // without one fails when the data is loaded.
                if let Some(m) = self.models.iter().find(|m| !m.is_classifier()) {
                    return arg(format!("model `{}` is a regression; the empirical study needs classifiers", m.name()));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let kv = KvRecord::parse(text)?;
        const KNOWN: &[&str] = &[
            "experiment", "scalers", "models", "reps", "seed", "case", "correlated", "covariance_mode", "data", "target",
            "one_hot", "gamma_grid", "folds", "train_ratio", "knn_k", "kmeans_k", "kmeans_max_iter",
            "logistic_rate", "logistic_epochs", "logistic_tol", "n", "p", "beta", "mu", "covariance", "noise_sd",
        ];
        if let Some(k) = kv.keys().find(|k| !KNOWN.contains(k)) {
            return Err(Error::Format(format!("unknown config key `{k}`")));
        }
        let fmt = |e: Error| match e {
            Error::Argument(m) => Error::Format(m),
            other => other,
        };
        let experiment: Experiment = kv.require("experiment")?.parse().map_err(fmt)?;
        let mut cfg = Self::new(experiment);
        if let Some(v) = kv.get("scalers") {
            cfg.scalers = parse_list(v).map_err(fmt)?;
        }
        if let Some(v) = kv.get("models") {
            cfg.models = parse_list(v).map_err(fmt)?;
        }
        cfg.reps = kv.parse_value("reps")?;
        if let Some(s) = kv.parse_value("seed")? {
            cfg.base_seed = s;
        }
        if let Some(c) = kv.parse_value("case")? {
            cfg.sim2_case = c;
        }
        if let Some(c) = kv.parse_value("correlated")? {
            cfg.correlated = c;
        }
        if let Some(m) = kv.get("covariance_mode") {
            cfg.covariance_mode = m.parse().map_err(fmt)?;
        }
        cfg.data_path = kv.get("data").map(PathBuf::from);
        if let Some(t) = kv.get("target") {
            cfg.target = t.to_string();
        }
        if let Some(o) = kv.parse_value("one_hot")? {
            cfg.one_hot = o;
        }
        if let Some(g) = kv.f64_list("gamma_grid")? {
            cfg.gamma_grid = g;
        }
        if let Some(f) = kv.parse_value("folds")? {
            cfg.folds = f;
        }
        if let Some(r) = kv.parse_value("train_ratio")? {
            cfg.train_ratio = r;
        }
        if kv.get("beta").is_some() {
            cfg.scenario = Some(SimScenario::from_kv(&kv)?);
        }
        let knn_k: Option<usize> = kv.parse_value("knn_k")?;
        let kmeans_k: Option<usize> = kv.parse_value("kmeans_k")?;
        let kmeans_iter: Option<usize> = kv.parse_value("kmeans_max_iter")?;
        let rate: Option<f64> = kv.parse_value("logistic_rate")?;
        let epochs: Option<usize> = kv.parse_value("logistic_epochs")?;
        let tol: Option<f64> = kv.parse_value("logistic_tol")?;
        for m in &mut cfg.models {
            if let ModelSpec::Classifier(spec) = m {
                match spec {
                    ClassifierSpec::Knn { k } => *k = knn_k.unwrap_or(*k),
                    ClassifierSpec::KMeans { k, max_iter } => {
                        *k = kmeans_k.or(*k);
                        *max_iter = kmeans_iter.unwrap_or(*max_iter);
                    }
                    ClassifierSpec::Logistic(LogisticParams {
                        learning_rate,
                        max_epochs,
                        tol: t,
                    }) => {
                        *learning_rate = rate.unwrap_or(*learning_rate);
                        *max_epochs = epochs.unwrap_or(*max_epochs);
                        *t = tol.unwrap_or(*t);
                    }
                    ClassifierSpec::GaussianNb | ClassifierSpec::Lda => {}
                }
            }
            if let ModelSpec::Penalized { folds, .. } = m {
                *folds = cfg.folds;
            }
        }
        cfg.validate().map_err(fmt)?;
        Ok(cfg)
    }

    /// Renders the config in the format accepted by [`ExperimentConfig::parse`].
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("experiment", self.experiment.name().into());
        line(
            "scalers",
            self.scalers.iter().map(ScalerChoice::to_config).collect::<Vec<_>>().join(","),
        );
        line("models", self.models.iter().map(|m| m.name()).collect::<Vec<_>>().join(","));
        if let Some(r) = self.reps {
            line("reps", r.to_string());
        }
        line("seed", self.base_seed.to_string());
        line("folds", self.folds.to_string());
        line("train_ratio", format!("{:?}", self.train_ratio));
        line("gamma_grid", format_f64_list(&self.gamma_grid));
        match self.experiment {
            Experiment::Sim2 => {
                line("case", self.sim2_case.to_string());
                line("correlated", self.correlated.to_string());
                line("covariance_mode", self.covariance_mode.name().into());
            }
            Experiment::Empirical => {
                if let Some(p) = &self.data_path {
                    line("data", p.display().to_string());
                }
                line("target", self.target.clone());
                line("one_hot", self.one_hot.to_string());
            }
            Experiment::Sim1 => {}
        }
        for m in &self.models {
            match m {
                ModelSpec::Classifier(ClassifierSpec::Knn { k }) => line("knn_k", k.to_string()),
                ModelSpec::Classifier(ClassifierSpec::KMeans { k, max_iter }) => {
                    if let Some(k) = k {
                        line("kmeans_k", k.to_string());
                    }
                    line("kmeans_max_iter", max_iter.to_string());
                }
                ModelSpec::Classifier(ClassifierSpec::Logistic(p)) => {
                    line("logistic_rate", format!("{:?}", p.learning_rate));
                    line("logistic_epochs", p.max_epochs.to_string());
                    line("logistic_tol", format!("{:?}", p.tol));
                }
                _ => {}
            }
        }
        if let Some(s) = &self.scenario {
            for l in s.to_record().lines().filter(|l| !l.starts_with('#') && !l.starts_with("train_ratio")) {
                out.push_str(l);
                out.push('\n');
            }
        }
        out
    }
}
