//! Synthetic linear-model scenarios for the two simulation studies.

use crate::error::{arg, Error, Result};
use crate::kv::{format_f64_list, KvRecord};
use crate::numerics::{cholesky_factor, sample_mvn_with, Matrix, RngStream};
use rand_distr::{Distribution, Normal};

/// `y = Xβ + ε` with `X ~ N(μ, Σ)` and `ε ~ N(0, noise_sd²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub n: usize,
    pub p: usize,
    pub beta: Vec<f64>,
    pub mu: Vec<f64>,
    pub covariance: Matrix,
    pub noise_sd: f64,
    pub train_ratio: f64,
}

/// How the off-diagonal `0.5^|i−j|` of the correlated second simulation is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceMode {
    /// As a correlation: `Σ_ij = 0.5^|i−j| · √(Σ_ii Σ_jj)`.
    #[default]
    Correlation,
    /// As a raw covariance entry: `Σ_ij = 0.5^|i−j|`.
    Raw,
}

impl CovarianceMode {
    pub fn name(self) -> &'static str {
        match self {
            CovarianceMode::Correlation => "correlation",
            CovarianceMode::Raw => "raw",
        }
    }
}

impl std::str::FromStr for CovarianceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "correlation" | "corr" => Ok(CovarianceMode::Correlation),
            "raw" | "covariance" => Ok(CovarianceMode::Raw),
            other => arg(format!("unknown covariance mode `{other}` (expected correlation or raw)")),
        }
    }
}

/// One draw of a scenario, already split into train and test rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub x_train: Matrix,
    pub y_train: Vec<f64>,
    pub x_test: Matrix,
    pub y_test: Vec<f64>,
}

impl SimScenario {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n < 2 {
            return arg(format!("scenario needs n ≥ 2 and p ≥ 1 (n = {}, p = {})", self.n, self.p));
        }
        if self.beta.len() != self.p || self.mu.len() != self.p {
            return arg("beta and mu must have length p");
        }
        if self.covariance.nrows() != self.p || self.covariance.ncols() != self.p {
            return arg("covariance must be p × p");
        }
        if !(self.noise_sd > 0.0) || !self.noise_sd.is_finite() {
            return arg(format!("noise sd must be positive, got {}", self.noise_sd));
        }
        if !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return arg(format!("train ratio must lie in (0, 1), got {}", self.train_ratio));
        }
        if self.beta.iter().chain(&self.mu).any(|v| !v.is_finite()) {
            return arg("beta and mu must be finite");
        }
        cholesky_factor(&self.covariance)?;
        Ok(())
    }

    /// Rows used for training: `⌈n · ratio⌉`, kept within `[1, n − 1]`.
    pub fn n_train(&self) -> usize {
        ((self.n as f64 * self.train_ratio).ceil() as usize).clamp(1, self.n - 1)
    }

    pub fn to_record(&self) -> String {
        let mut out = String::from("# adascale scenario\n");
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("p = {}\n", self.p));
        out.push_str(&format!("beta = {}\n", format_f64_list(&self.beta)));
        out.push_str(&format!("mu = {}\n", format_f64_list(&self.mu)));
        out.push_str(&format!("covariance = {}\n", format_f64_list(&self.covariance.to_row_major())));
        out.push_str(&format!("noise_sd = {:?}\n", self.noise_sd));
        out.push_str(&format!("train_ratio = {:?}\n", self.train_ratio));
        out
    }

    pub fn from_record(text: &str) -> Result<Self> {
        let kv = KvRecord::parse(text)?;
        Self::from_kv(&kv)
    }

    /// Reads the scenario keys out of a parsed record; unrelated keys are ignored.
    pub fn from_kv(kv: &KvRecord) -> Result<Self> {
        let req = |key: &str| Error::Format(format!("missing key `{key}`"));
        let n: usize = kv.parse_value("n")?.ok_or_else(|| req("n"))?;
        let p: usize = kv.parse_value("p")?.ok_or_else(|| req("p"))?;
        let beta = kv.f64_list("beta")?.ok_or_else(|| req("beta"))?;
        let mu = kv.f64_list("mu")?.unwrap_or_else(|| vec![0.0; p]);
        let cov = kv.f64_list("covariance")?.ok_or_else(|| req("covariance"))?;
        let noise_sd: f64 = kv.parse_value("noise_sd")?.ok_or_else(|| req("noise_sd"))?;
        let train_ratio: f64 = kv.parse_value("train_ratio")?.unwrap_or(0.5);
        if p == 0 || p > 10_000 || cov.len() != p * p {
            return Err(Error::Format(format!("covariance needs p² = {} entries", p.saturating_mul(p))));
        }
        let rows: Vec<&[f64]> = cov.chunks(p).collect();
        let s = SimScenario {
            n,
            p,
            beta,
            mu,
            covariance: Matrix::from_rows(&rows).map_err(|e| Error::Format(e.to_string()))?,
            noise_sd,
            train_ratio,
        };
        s.validate().map_err(|e| Error::Format(e.to_string()))?;
        Ok(s)
    }
}

/// n = 100, p = 8, β = (3, 1.5, 0, 0, 2, 0, 0, 0), corr 0.5^|i−j|, σ = 3, half for training.
pub fn sim1_scenario() -> SimScenario {
    let p = 8;
    let cov: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| 0.5f64.powi((i as i32 - j as i32).abs())).collect())
        .collect();
    SimScenario {
        n: 100,
        p,
        beta: vec![3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0],
        mu: vec![0.0; p],
        covariance: Matrix::from_rows(&cov).expect("finite covariance"),
        noise_sd: 3.0,
        train_ratio: 0.5,
    }
}

pub fn sim2_beta(case: usize) -> Result<Vec<f64>> {
    let b: [f64; 8] = match case {
        1 => [0., 0., 0., 0., 1., 1., 1., 1.],
        2 => [1., 1., 1., 1., 0., 0., 0., 0.],
        3 => [0., 0., 1., 1., 1., 1., 0., 0.],
        4 => [1., 1., 0., 0., 0., 0., 1., 1.],
        _ => return arg(format!("simulation 2 case must be 1–4, got {case}")),
    };
    Ok(b.to_vec())
}

/// n = 1000, p = 8, Var(x_i) = 3^i (i = 1..8), σ = 5, half for training.
pub fn sim2_scenario(case: usize, correlated: bool) -> Result<SimScenario> {
    sim2_scenario_with(case, correlated, CovarianceMode::default())
}

pub fn sim2_scenario_with(case: usize, correlated: bool, mode: CovarianceMode) -> Result<SimScenario> {
    let beta = sim2_beta(case)?;
    let p = 8;
    let var: Vec<f64> = (1..=p as i32).map(|i| 3f64.powi(i)).collect();
    let cov: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| {
                    if i == j {
                        var[i]
                    } else if !correlated {
                        0.0
                    } else {
                        let r = 0.5f64.powi((i as i32 - j as i32).abs());
                        match mode {
                            CovarianceMode::Correlation => r * (var[i] * var[j]).sqrt(),
                            CovarianceMode::Raw => r,
                        }
                    }
                })
                .collect()
        })
        .collect();
    Ok(SimScenario {
        n: 1000,
        p,
        beta,
        mu: vec![0.0; p],
        covariance: Matrix::from_rows(&cov)?,
        noise_sd: 5.0,
        train_ratio: 0.5,
    })
}

/// Draws `X` then the noise from one generator; the leading rows form the training set.
pub fn realize(s: &SimScenario, rng: &RngStream) -> Result<Realization> {
    s.validate()?;
    let mut g = rng.generator();
    let x = sample_mvn_with(&s.mu, &s.covariance, s.n, &mut g)?;
    let noise = Normal::new(0.0, s.noise_sd).map_err(|e| Error::Argument(e.to_string()))?;
    let signal = x.matvec(&s.beta)?;
    let y: Vec<f64> = signal.into_iter().map(|m| m + noise.sample(&mut g)).collect();
    let n_train = s.n_train();
    let train: Vec<usize> = (0..n_train).collect();
    let test: Vec<usize> = (n_train..s.n).collect();
    Ok(Realization {
        x_train: x.select_rows(&train),
        y_train: y[..n_train].to_vec(),
        x_test: x.select_rows(&test),
        y_test: y[n_train..].to_vec(),
    })
}
