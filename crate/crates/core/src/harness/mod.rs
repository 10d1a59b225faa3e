//! Scaler × model experiment grids with seeded, independent replications.
//!
//! Replication `r` draws everything from `RngStream::new(base_seed, r)`: the
//! simulated data or the train/test split, then derived sub-streams for
//! cross-validation folds and model seeding. Those sub-streams do not depend
//! on the scaler, so two scalers that a model cannot tell apart produce the
//! same cell. Replications run in parallel and are reduced in index order,
//! which makes reports independent of the thread count.

mod config;
mod render;

pub use config::{
    Experiment, ExperimentConfig, ScalerChoice, DEFAULT_REPS, DEFAULT_TRAIN_RATIO, EMPIRICAL_REPS_OTHER,
    EMPIRICAL_REPS_SENSITIVE,
};
pub use render::{render_report, ReportFormat};

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::dataio::{credit_load_options, load_csv, split_indices, Dataset, LoadOptions, CREDIT_TARGET};
use crate::datagen::{realize, SimScenario};
use crate::error::{arg, Error, Result};
use crate::metrics::{accuracy, rpe, selection_rates, MetricCell, SelectionTruth};
use crate::models::FittedModel;
use crate::numerics::{Matrix, RngStream};
use crate::scaling::{fit_scaler, select_gamma_cv, FeatureKind, FittedScaler, ScalerSpec};

const TAG_SPLIT: u64 = 0x5350_4c54;
const TAG_MODEL: u64 = 0x4d4f_4445;
const TAG_GAMMA: u64 = 0x4741_4d41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Rpe,
    FakeRatio,
    LostRatio,
    Accuracy,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Rpe => "rpe",
            Metric::FakeRatio => "fake_ratio",
            Metric::LostRatio => "lost_ratio",
            Metric::Accuracy => "accuracy",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Metric::Rpe => "Mean RPE",
            Metric::FakeRatio => "Fake selection ratio",
            Metric::LostRatio => "Lost selection ratio",
            Metric::Accuracy => "Accuracy",
        }
    }

    pub fn for_experiment(e: Experiment) -> &'static [Metric] {
        match e {
            Experiment::Sim1 => &[Metric::Rpe],
            Experiment::Sim2 => &[Metric::FakeRatio, Metric::LostRatio, Metric::Rpe],
            Experiment::Empirical => &[Metric::Accuracy],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Value(MetricCell),
    /// The cell failed in at least one replication.
    Skipped(String),
}

impl Cell {
    pub fn value(&self) -> Option<&MetricCell> {
        match self {
            Cell::Value(c) => Some(c),
            Cell::Skipped(_) => None,
        }
    }
}

/// Aggregated results; `cells[metric][scaler][model]`, scalers in display
/// order and models in config order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub title: String,
    pub scalers: Vec<String>,
    pub models: Vec<String>,
    pub metrics: Vec<Metric>,
    pub cells: Vec<Vec<Vec<Cell>>>,
    /// Replications per model column.
    pub reps: Vec<usize>,
    pub warnings: Vec<String>,
}

impl ExperimentReport {
    pub fn cell(&self, metric: Metric, scaler: &str, model: &str) -> Option<&Cell> {
        let m = self.metrics.iter().position(|x| *x == metric)?;
        let s = self.scalers.iter().position(|x| x == scaler)?;
        let j = self.models.iter().position(|x| x == model)?;
        Some(&self.cells[m][s][j])
    }

    pub fn skipped(&self) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        if let Some(grid) = self.cells.first() {
            for (s, row) in grid.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    if let Cell::Skipped(reason) = c {
                        out.push((self.scalers[s].clone(), self.models[j].clone(), reason.clone()));
                    }
                }
            }
        }
        out
    }
}

/// What one replication produced for one (scaler, model) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RepValues {
    pub rpe: Option<f64>,
    pub support: Option<BTreeSet<usize>>,
    pub accuracy: Option<f64>,
    /// γ used when the scaler chose it by cross-validation.
    pub gamma: Option<f64>,
}

/// One replication: `cells[scaler][model]` in config order; `None` when the
/// model runs fewer replications than this index.
#[derive(Debug, Clone, PartialEq)]
pub struct RepOutcome {
    pub rep: usize,
    pub cells: Vec<Vec<Option<std::result::Result<RepValues, String>>>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStage {
    Scaler,
    Model,
}

/// Data handed to a scaler or model fit, exposed for leakage checks.
#[derive(Debug)]
pub struct FitEvent<'a> {
    pub rep: usize,
    pub scaler: usize,
    /// Model index for [`FitStage::Model`].
    pub model: Option<usize>,
    pub stage: FitStage,
    pub x: &'a Matrix,
    pub y: &'a [f64],
    /// Row indices into the loaded dataset (empirical study only).
    pub rows: Option<&'a [usize]>,
}

pub trait FitObserver: Sync {
    fn observe(&self, event: &FitEvent<'_>);
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads for replications; 0 lets rayon decide.
    pub jobs: usize,
}

enum Source {
    Sim { scenario: SimScenario, truth: SelectionTruth },
    Data(Dataset),
}

struct Split {
    x_train: Matrix,
    y_train: Vec<f64>,
    x_test: Matrix,
    y_test: Vec<f64>,
    train_rows: Option<Vec<usize>>,
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    source: Source,
    observer: Option<&'a dyn FitObserver>,
}

/// Loads the empirical dataset the way the harness does.
pub fn load_experiment_data(cfg: &ExperimentConfig) -> Result<Dataset> {
    let path = cfg
        .data_path
        .as_ref()
        .ok_or_else(|| Error::Argument("the empirical study needs a data path".into()))?;
    let opts = if cfg.target == CREDIT_TARGET {
        credit_load_options(cfg.one_hot)
    } else {
        LoadOptions {
            one_hot: cfg.one_hot,
            ..LoadOptions::with_target(cfg.target.clone())
        }
    };
    let d = load_csv(path, &opts)?;
    d.labels()?;
    Ok(d)
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig, data: Option<Dataset>, observer: Option<&'a dyn FitObserver>) -> Result<Self> {
        cfg.validate()?;
        let source = match cfg.experiment {
            Experiment::Sim1 | Experiment::Sim2 => {
                let scenario = cfg.sim_scenario()?;
                let truth = SelectionTruth::from_beta(&scenario.beta);
                Source::Sim { scenario, truth }
            }
            Experiment::Empirical => Source::Data(match data {
                Some(d) => d,
                None => load_experiment_data(cfg)?,
            }),
        };
        Ok(Self { cfg, source, observer })
    }

    fn kinds(&self) -> Option<&[FeatureKind]> {
        match &self.source {
            Source::Data(d) => Some(&d.feature_kinds),
            Source::Sim { .. } => None,
        }
    }

    fn split(&self, stream: &RngStream) -> Result<Split> {
        match &self.source {
            Source::Sim { scenario, .. } => {
                let r = realize(scenario, stream)?;
                Ok(Split {
                    x_train: r.x_train,
                    y_train: r.y_train,
                    x_test: r.x_test,
                    y_test: r.y_test,
                    train_rows: None,
                })
            }
            Source::Data(d) => {
                let (train, test) = split_indices(d.n_rows(), self.cfg.train_ratio, &stream.derive(TAG_SPLIT))?;
                let pick = |idx: &[usize]| idx.iter().map(|&i| d.y[i]).collect::<Vec<f64>>();
                Ok(Split {
                    x_train: d.x.select_rows(&train),
                    y_train: pick(&train),
                    x_test: d.x.select_rows(&test),
                    y_test: pick(&test),
                    train_rows: Some(train),
                })
            }
        }
    }

    fn emit(&self, rep: usize, scaler: usize, model: Option<usize>, stage: FitStage, x: &Matrix, split: &Split) {
        if let Some(o) = self.observer {
            o.observe(&FitEvent {
                rep,
                scaler,
                model,
                stage,
                x,
                y: &split.y_train,
                rows: split.train_rows.as_deref(),
            });
        }
    }

    fn fit_scaler(&self, rep: usize, s: usize, spec: ScalerSpec, split: &Split) -> Result<FittedScaler> {
        self.emit(rep, s, None, FitStage::Scaler, &split.x_train, split);
        fit_scaler(spec, &split.x_train, Some(&split.y_train), self.kinds())
    }

    fn score(&self, model: &FittedModel, x_test: &Matrix, split: &Split) -> Result<RepValues> {
        let pred = model.predict(x_test)?;
        let mut v = RepValues {
            rpe: None,
            support: None,
            accuracy: None,
            gamma: None,
        };
        match &self.source {
            Source::Sim { scenario, .. } => {
                v.rpe = Some(rpe(&split.y_test, &pred, scenario.noise_sd)?);
                v.support = model.linear().map(|f| f.selected_support.iter().copied().collect());
            }
            Source::Data(_) => v.accuracy = Some(accuracy(&split.y_test, &pred)?),
        }
        Ok(v)
    }

    fn cell(
        &self,
        rep: usize,
        s: usize,
        j: usize,
        fitted: Option<&(FittedScaler, Matrix, Matrix)>,
        split: &Split,
        stream: &RngStream,
    ) -> Result<RepValues> {
        let choice = &self.cfg.scalers[s];
        let model = &self.cfg.models[j];
        let mut gamma = None;
        let owned;
        let (xs_train, xs_test) = match fitted {
            Some((_, tr, te)) => (tr, te),
            None => {
                self.emit(rep, s, Some(j), FitStage::Scaler, &split.x_train, split);
                let sel = select_gamma_cv(
                    &split.x_train,
                    &split.y_train,
                    &self.cfg.gamma_grid,
                    self.cfg.folds,
                    model,
                    self.kinds(),
                    &stream.derive(TAG_GAMMA),
                )?;
                gamma = Some(sel.gamma_star);
                let spec = ScalerSpec::new(choice.spec.method, sel.gamma_star)?;
                let sc = self.fit_scaler(rep, s, spec, split)?;
                owned = (sc.transform(&split.x_train)?, sc.transform(&split.x_test)?);
                (&owned.0, &owned.1)
            }
        };
        self.emit(rep, s, Some(j), FitStage::Model, xs_train, split);
        let fitted_model = model.fit(xs_train, &split.y_train, &stream.derive(TAG_MODEL))?;
        let mut v = self.score(&fitted_model, xs_test, split)?;
        v.gamma = gamma;
        Ok(v)
    }

    fn replicate(&self, rep: usize) -> RepOutcome {
        let cfg = self.cfg;
        let stream = RngStream::new(cfg.base_seed, rep as u64);
        let active: Vec<bool> = cfg.models.iter().map(|m| rep < cfg.reps_for(m)).collect();
        let mut warnings = Vec::new();
        let split = match self.split(&stream) {
            Ok(s) => s,
            Err(e) => {
                let msg = format!("rep {rep}: {e}");
                let cells = cfg
                    .scalers
                    .iter()
                    .map(|_| active.iter().map(|&a| a.then(|| Err(msg.clone()))).collect())
                    .collect();
                return RepOutcome { rep, cells, warnings };
            }
        };
        let mut cells = Vec::with_capacity(cfg.scalers.len());
        for (s, choice) in cfg.scalers.iter().enumerate() {
            let shared = if choice.gamma_cv {
                None
            } else {
                Some(self.fit_scaler(rep, s, choice.spec, &split).and_then(|sc| {
                    let tr = sc.transform(&split.x_train)?;
                    let te = sc.transform(&split.x_test)?;
                    Ok((sc, tr, te))
                }))
            };
            if let Some(Ok((sc, _, _))) = &shared {
                for w in &sc.warnings {
                    warnings.push(format!("{}: {w}", scaler_label(choice)));
                }
            }
            let row = (0..cfg.models.len())
                .map(|j| {
                    if !active[j] {
                        return None;
                    }
                    let result = match &shared {
                        Some(Err(e)) => Err(e.to_string()),
                        Some(Ok(f)) => self.cell(rep, s, j, Some(f), &split, &stream).map_err(|e| e.to_string()),
                        None => self.cell(rep, s, j, None, &split, &stream).map_err(|e| e.to_string()),
                    };
                    Some(result.map_err(|e| format!("rep {rep}: {e}")))
                })
                .collect();
            cells.push(row);
        }
        RepOutcome { rep, cells, warnings }
    }
}

/// Table label of a scaler row, with γ spelled out when it is fixed and not 1.
pub fn scaler_label(choice: &ScalerChoice) -> String {
    let m = choice.spec.method;
    if m.uses_gamma() && !choice.gamma_cv && choice.spec.gamma != 1.0 {
        format!("{}(γ={})", m.label(), choice.spec.gamma)
    } else {
        m.label().to_string()
    }
}

/// Runs a single replication in isolation.
pub fn run_replication(cfg: &ExperimentConfig, rep: usize) -> Result<RepOutcome> {
    Ok(Runner::new(cfg, None, None)?.replicate(rep))
}

pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport> {
    run_experiment_observed(cfg, None, opts, None)
}

/// Runs the full grid. `data` overrides loading `cfg.data_path` for the
/// empirical study; `observer` sees every scaler and model fit.
pub fn run_experiment_observed(
    cfg: &ExperimentConfig,
    data: Option<Dataset>,
    opts: &RunOptions,
    observer: Option<&dyn FitObserver>,
) -> Result<ExperimentReport> {
    let runner = Runner::new(cfg, data, observer)?;
    let n_reps = cfg.max_reps();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Argument(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<RepOutcome> = pool.install(|| (0..n_reps).into_par_iter().map(|r| runner.replicate(r)).collect());
    aggregate(cfg, &runner.source, &outcomes)
}

pub fn run_sim1(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(cfg, Experiment::Sim1)?;
    run_experiment(cfg, &RunOptions::default())
}

pub fn run_sim2(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(cfg, Experiment::Sim2)?;
    run_experiment(cfg, &RunOptions::default())
}

pub fn run_empirical(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(cfg, Experiment::Empirical)?;
    run_experiment(cfg, &RunOptions::default())
}

fn expect(cfg: &ExperimentConfig, e: Experiment) -> Result<()> {
    if cfg.experiment != e {
        return arg(format!("config is for `{}`, not `{}`", cfg.experiment.name(), e.name()));
    }
    Ok(())
}

fn aggregate(cfg: &ExperimentConfig, source: &Source, outcomes: &[RepOutcome]) -> Result<ExperimentReport> {
    let metrics = Metric::for_experiment(cfg.experiment).to_vec();
    // Display order: the fixed scaler order, ties kept in config order.
    let mut order: Vec<usize> = (0..cfg.scalers.len()).collect();
    order.sort_by_key(|&s| cfg.scalers[s].method().table_rank());

    let mut cells = vec![vec![Vec::with_capacity(cfg.models.len()); order.len()]; metrics.len()];
    for (row, &s) in order.iter().enumerate() {
        for j in 0..cfg.models.len() {
            let mut values = Vec::new();
            let mut failure = None;
            for o in outcomes {
                match &o.cells[s][j] {
                    None => {}
                    Some(Ok(v)) => values.push(v),
                    Some(Err(e)) => {
                        failure = Some(e.clone());
                        break;
                    }
                }
            }
            for (m, metric) in metrics.iter().enumerate() {
                let cell = match &failure {
                    Some(e) => Cell::Skipped(e.clone()),
                    None => Cell::Value(summarize(*metric, &values, source)?),
                };
                cells[m][row].push(cell);
            }
        }
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for o in outcomes {
        for w in &o.warnings {
            *counts.entry(w.as_str()).or_default() += 1;
        }
    }
    let warnings = counts
        .into_iter()
        .map(|(w, c)| format!("{w} ({c} of {} replications)", outcomes.len()))
        .collect();

    let title = match cfg.experiment {
        Experiment::Sim1 => "Simulation 1".to_string(),
        Experiment::Sim2 => {
            if cfg.scenario.is_some() {
                "Simulation 2 (custom scenario)".to_string()
            } else {
                format!(
                    "Simulation 2, case {} ({})",
                    cfg.sim2_case,
                    if cfg.correlated {
                        format!("correlated, {} covariance", cfg.covariance_mode.name())
                    } else {
                        "independent".to_string()
                    }
                )
            }
        }
        Experiment::Empirical => "Empirical study".to_string(),
    };
    Ok(ExperimentReport {
        experiment: cfg.experiment,
        title,
        scalers: order.iter().map(|&s| scaler_label(&cfg.scalers[s])).collect(),
        models: cfg.models.iter().map(|m| m.label().to_string()).collect(),
        metrics,
        cells,
        reps: cfg.models.iter().map(|m| cfg.reps_for(m)).collect(),
        warnings,
    })
}

fn summarize(metric: Metric, values: &[&RepValues], source: &Source) -> Result<MetricCell> {
    let pick = |f: &dyn Fn(&RepValues) -> Option<f64>| -> Result<Vec<f64>> {
        values
            .iter()
            .map(|v| f(v).ok_or_else(|| Error::Argument(format!("metric {} unavailable", metric.name()))))
            .collect()
    };
    match metric {
        Metric::Rpe => MetricCell::from_values(&pick(&|v| v.rpe)?),
        Metric::Accuracy => MetricCell::from_values(&pick(&|v| v.accuracy)?),
        Metric::FakeRatio | Metric::LostRatio => {
            let Source::Sim { truth, .. } = source else {
                return arg("selection rates need a simulation truth");
            };
            let sets: Vec<BTreeSet<usize>> = values
                .iter()
                .map(|v| v.support.clone().ok_or_else(|| Error::Argument("model has no support".into())))
                .collect::<Result<_>>()?;
            let pooled = selection_rates(&sets, truth)?;
            let per_rep: Vec<f64> = sets
                .iter()
                .map(|s| {
                    let r = selection_rates(std::slice::from_ref(s), truth)?;
                    Ok(if metric == Metric::FakeRatio { r.fake_ratio } else { r.lost_ratio })
                })
                .collect::<Result<_>>()?;
            let sd = MetricCell::from_values(&per_rep)?.sd;
            Ok(MetricCell {
                mean: if metric == Metric::FakeRatio { pooled.fake_ratio } else { pooled.lost_ratio },
                sd,
                n_reps: sets.len(),
            })
        }
    }
}
