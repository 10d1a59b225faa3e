use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use adascale::dataio::{load_csv, write_csv, Dataset, LoadOptions};
use adascale::harness::{
    render_report, run_experiment, Experiment, ExperimentConfig, ReportFormat, RunOptions, ScalerChoice,
};
use adascale::models::ModelSpec;
use adascale::numerics::RngStream;
use adascale::scaling::{fit_scaler, select_gamma_cv, ScalerSpec, ScalingMethod, DEFAULT_GAMMA_GRID};
use adascale::Error;
use clap::{Args, Parser, Subcommand};

/// Directory for reports when `--out` is not given.
const OUT_DIR_ENV: &str = "ADASCALE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "adascale", version, about = "Adaptive feature scaling and the experiments that compare it")]
struct Cli {
    /// Worker threads for replications; 0 uses every core
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a scaler on a CSV file and write the transformed columns
    Scale(ScaleArgs),
    /// Simulation 1: prediction error of penalized regressions after scaling
    Sim1(ExperimentArgs),
    /// Simulation 2: variable selection under heterogeneous feature variances
    Sim2(Sim2Args),
    /// Classification accuracy on a tabular data set
    Empirical(EmpiricalArgs),
    /// Choose the generalized adaptive scaling exponent by cross-validation
    GammaCv(GammaCvArgs),
}

#[derive(Args, Debug)]
struct ScaleArgs {
    /// Input CSV with a header row
    #[arg(long)]
    input: PathBuf,
    /// Scaling method (none, adaptive, gas, ashd, standardization, range, pareto, vast, level, gelman)
    #[arg(long)]
    method: ScalingMethod,
    /// Exponent for gas and ashd
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Response column; required by the adaptive methods and copied through unchanged
    #[arg(long)]
    target: Option<String>,
    /// Output CSV
    #[arg(long)]
    output: PathBuf,
    /// Scaler record path [default: <output>.scaler]
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Flat key-value config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; replication r draws from stream r [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Replications for every model [default: 100; empirical: 100 for knn/kmeans, 10 otherwise]
    #[arg(long)]
    reps: Option<usize>,
    /// Comma-separated scalers; `gas` alone selects γ by CV, `gas:0.5` fixes it [default: per experiment]
    #[arg(long)]
    scalers: Option<String>,
    /// Comma-separated models [default: per experiment]
    #[arg(long)]
    models: Option<String>,
    /// Cross-validation folds for λ and γ selection [default: 5]
    #[arg(long)]
    folds: Option<usize>,
    /// Report format: markdown or csv
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Report path [default: $ADASCALE_OUT_DIR/<experiment>.<ext>, else stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Sim2Args {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Coefficient case, 1–4 [default: 1]
    #[arg(long)]
    case: Option<usize>,
    /// Use correlated features (r = 0.5) instead of independent ones
    #[arg(long)]
    correlated: bool,
    /// How correlated covariances are built: correlation or raw [default: correlation]
    #[arg(long)]
    covariance_mode: Option<String>,
}

#[derive(Args, Debug)]
struct EmpiricalArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Data CSV
    #[arg(long)]
    data: Option<PathBuf>,
    /// Label column [default: default payment next month]
    #[arg(long)]
    target: Option<String>,
    /// Expand categorical features into indicator columns
    #[arg(long)]
    one_hot: bool,
    /// Training share of each random split [default: 0.5]
    #[arg(long)]
    train_ratio: Option<f64>,
}

#[derive(Args, Debug)]
struct GammaCvArgs {
    /// Input CSV with a header row
    #[arg(long)]
    input: PathBuf,
    /// Response column
    #[arg(long)]
    target: String,
    /// Downstream model scored for each γ
    #[arg(long, default_value = "lasso")]
    model: String,
    /// Comma-separated γ candidates
    #[arg(long, default_value = "0,0.25,0.5,0.75,1")]
    grid: String,
    /// Cross-validation folds
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Seed for fold assignment
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: usage: {line}");
            return ExitCode::from(2);
        }
    };
    let timed = !matches!(cli.command, Command::Scale(_) | Command::GammaCv(_));
    let result = run(cli);
    if timed {
        eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.code(), e.to_string().replace('\n', " "));
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Error> {
    Err(Error::Argument(msg.into()))
}

fn run(cli: Cli) -> Result<(), Error> {
    let opts = RunOptions { jobs: cli.jobs };
    match cli.command {
        Command::Scale(a) => cmd_scale(a),
        Command::GammaCv(a) => cmd_gamma_cv(a),
        Command::Sim1(a) => {
            let cfg = build_config(Experiment::Sim1, &a)?;
            experiment(&cfg, &a, &opts)
        }
        Command::Sim2(a) => {
            let mut cfg = build_config(Experiment::Sim2, &a.common)?;
            if let Some(c) = a.case {
                cfg.sim2_case = c;
            }
            if a.correlated {
                cfg.correlated = true;
            }
            if let Some(m) = &a.covariance_mode {
                cfg.covariance_mode = m.parse()?;
            }
            experiment(&cfg, &a.common, &opts)
        }
        Command::Empirical(a) => {
            let mut cfg = build_config(Experiment::Empirical, &a.common)?;
            if let Some(d) = a.data {
                cfg.data_path = Some(d);
            }
            if let Some(t) = a.target {
                cfg.target = t;
            }
            if a.one_hot {
                cfg.one_hot = true;
            }
            if let Some(r) = a.train_ratio {
                cfg.train_ratio = r;
            }
            experiment(&cfg, &a.common, &opts)
        }
    }
}

fn parse_list<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<Vec<T>, Error> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

fn build_config(experiment: Experiment, a: &ExperimentArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
            let cfg = ExperimentConfig::parse(&text)?;
            if cfg.experiment != experiment {
                return usage(format!(
                    "config file is for `{}`, not `{}`",
                    cfg.experiment.name(),
                    experiment.name()
                ));
            }
            cfg
        }
        None => ExperimentConfig::new(experiment),
    };
    if let Some(s) = a.seed {
        cfg.base_seed = s;
    }
    if a.reps.is_some() {
        cfg.reps = a.reps;
    }
    if let Some(s) = &a.scalers {
        cfg.scalers = parse_list::<ScalerChoice>(s)?;
    }
    if let Some(m) = &a.models {
        cfg.models = parse_list::<ModelSpec>(m)?;
    }
    if let Some(f) = a.folds {
        cfg.folds = f;
    }
    for m in &mut cfg.models {
        if let ModelSpec::Penalized { folds, .. } = m {
            *folds = cfg.folds;
        }
    }
    Ok(cfg)
}

fn experiment(cfg: &ExperimentConfig, a: &ExperimentArgs, opts: &RunOptions) -> Result<(), Error> {
    let format: ReportFormat = a.format.parse()?;
    cfg.validate()?;
    let out = match (&a.out, std::env::var_os(OUT_DIR_ENV)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) if !dir.is_empty() => {
            let ext = match format {
                ReportFormat::Csv => "csv",
                ReportFormat::Markdown => "md",
            };
            Some(Path::new(&dir).join(format!("{}.{ext}", cfg.experiment.name())))
        }
        _ => None,
    };
    let report = run_experiment(cfg, opts)?;
    let text = render_report(&report, format);
    match out {
        Some(path) => write_file(&path, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn cmd_scale(a: ScaleArgs) -> Result<(), Error> {
    let spec = ScalerSpec::new(a.method, a.gamma)?;
    if a.method.needs_response() && a.target.is_none() {
        return usage(format!("method `{}` needs --target", a.method.name()));
    }
    let opts = LoadOptions {
        target: a.target.clone(),
        drop_columns: Vec::new(),
        ..LoadOptions::default()
    };
    let d = load_csv(&a.input, &opts)?;
    let y = d.has_target().then_some(d.y.as_slice());
    let scaler = fit_scaler(spec, &d.x, y, Some(&d.feature_kinds))?;
    for w in &scaler.warnings {
        eprintln!("warning: {w}");
    }
    let out = Dataset::new(
        scaler.transform(&d.x)?,
        d.feature_names.clone(),
        d.feature_kinds.clone(),
        d.y.clone(),
        d.target_name.clone(),
    )?;
    let mut buf = Vec::new();
    write_csv(&out, &mut buf)?;
    write_file(&a.output, &buf)?;
    let record = a.record.unwrap_or_else(|| {
        let mut p = a.output.clone().into_os_string();
        p.push(".scaler");
        PathBuf::from(p)
    });
    write_file(&record, scaler.to_record().as_bytes())
}

fn cmd_gamma_cv(a: GammaCvArgs) -> Result<(), Error> {
    let model: ModelSpec = a.model.parse()?;
    let grid: Vec<f64> = if a.grid.trim().is_empty() {
        DEFAULT_GAMMA_GRID.to_vec()
    } else {
        a.grid
            .split(',')
            .map(|g| g.trim().parse::<f64>().map_err(|_| Error::Argument(format!("bad gamma `{g}`"))))
            .collect::<Result<_, _>>()?
    };
    let d = load_csv(&a.input, &LoadOptions::with_target(a.target.clone()))?;
    let sel = select_gamma_cv(
        &d.x,
        &d.y,
        &grid,
        a.folds,
        &model,
        Some(&d.feature_kinds),
        &RngStream::new(a.seed, 0),
    )?;
    let mut out = format!("gamma_star = {:?}\n", sel.gamma_star);
    for (g, s) in sel.grid.iter().zip(&sel.cv_scores) {
        out.push_str(&format!("cv_score[{g:?}] = {s:?}\n"));
    }
    std::io::stdout().write_all(out.as_bytes())?;
    Ok(())
}
