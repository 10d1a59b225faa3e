//! Cyclic coordinate descent on internally normalized columns.
//!
//! Columns are centered and divided by their Euclidean norm `s_j`, so each
//! coordinate problem is `½ (b − u)² + pen_j(b)` with `u = z_jᵀ r + b_j`.
//! Penalties are re-expressed in these coordinates (`β_j = b_j / s_j`), which
//! leaves the objective in terms of the caller's `X` unchanged. Every
//! coordinate step is an exact minimization, so the objective never increases.

use super::penalty::{mcp_argmin, mcp_penalty, scad_argmin, scad_penalty, soft_threshold};
use super::{LinearFit, PenaltyFamily, PenaltySpec};
use crate::error::{arg, Error, Result};
use crate::numerics::{dot, least_squares_with_rank, mean, Matrix};

pub const TOLERANCE: f64 = 1e-7;
pub const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, Copy)]
enum Coord {
    /// Zero column or infinite weight: the coefficient stays at 0.
    Frozen,
    /// `λ k |b|`, optionally restricted to `b ≥ 0`.
    L1 { k: f64, nonneg: bool },
    Scad { s: f64 },
    Mcp { s: f64 },
}

/// Design and response prepared once and reused along a λ path.
pub(crate) struct Prepared {
    n: usize,
    p: usize,
    z: Vec<f64>,
    y: Vec<f64>,
    x_means: Vec<f64>,
    y_mean: f64,
    coords: Vec<Coord>,
    /// `β_j = b_j · out_factor_j`.
    out_factor: Vec<f64>,
    scad_a: f64,
    mcp_gamma: f64,
}

pub(crate) struct CenteredDesign {
    pub xc: Matrix,
    pub yc: Vec<f64>,
    pub x_means: Vec<f64>,
    pub y_mean: f64,
}

pub(crate) fn center(x: &Matrix, y: &[f64]) -> Result<CenteredDesign> {
    let (n, p) = (x.nrows(), x.ncols());
    if y.len() != n {
        return arg(format!("response has {} values but X has {n} rows", y.len()));
    }
    if n == 0 {
        return arg("regression needs at least one row");
    }
    let x_means: Vec<f64> = x.columns().map(mean).collect();
    let mut data = Vec::with_capacity(n * p);
    for (j, col) in x.columns().enumerate() {
        data.extend(col.iter().map(|v| v - x_means[j]));
    }
    let y_mean = mean(y);
    Ok(CenteredDesign {
        xc: Matrix::new(n, p, data)?,
        yc: y.iter().map(|v| v - y_mean).collect(),
        x_means,
        y_mean,
    })
}

/// OLS slopes on the centered design, required to be unique.
pub(crate) fn pilot_ols(d: &CenteredDesign, what: &str) -> Result<Vec<f64>> {
    let (n, p) = (d.xc.nrows(), d.xc.ncols());
    if n <= p {
        return Err(Error::Numerical(format!(
            "{what} needs an OLS pilot fit with more rows than features (n = {n}, p = {p})"
        )));
    }
    let (beta, rank) = least_squares_with_rank(&d.xc, &d.yc)?;
    if rank < p {
        return Err(Error::Numerical(format!(
            "{what} pilot OLS is singular (rank {rank} < {p})"
        )));
    }
    Ok(beta)
}

impl Prepared {
    pub(crate) fn new(x: &Matrix, y: &[f64], spec: &PenaltySpec) -> Result<Self> {
        spec.validate(x.ncols())?;
        let d = center(x, y)?;
        let (n, p) = (x.nrows(), x.ncols());
        let norms: Vec<f64> = d.xc.columns().map(|c| dot(c, c).sqrt()).collect();

        let pilot = match spec.family {
            PenaltyFamily::Garrote => Some(pilot_ols(&d, "garrote")?),
            PenaltyFamily::AdaptiveLasso if spec.adaptive_weights.is_none() => {
                Some(pilot_ols(&d, "adaptive lasso")?)
            }
            _ => None,
        };

        let mut z = vec![0.0; n * p];
        let mut coords = Vec::with_capacity(p);
        let mut out_factor = vec![0.0; p];
        for j in 0..p {
            let s = norms[j];
            if s == 0.0 || !s.is_finite() {
                coords.push(Coord::Frozen);
                continue;
            }
            let mut sign = 1.0;
            let coord = match spec.family {
                PenaltyFamily::Lasso => Coord::L1 { k: 1.0 / s, nonneg: false },
                PenaltyFamily::AdaptiveLasso => {
                    let w = match &spec.adaptive_weights {
                        Some(w) => w[j],
                        None => 1.0 / pilot.as_ref().expect("pilot fit")[j].abs(),
                    };
                    if w.is_finite() {
                        Coord::L1 { k: w / s, nonneg: false }
                    } else {
                        Coord::Frozen
                    }
                }
                PenaltyFamily::Garrote => {
                    let b = pilot.as_ref().expect("pilot fit")[j];
                    if b == 0.0 {
                        Coord::Frozen
                    } else {
                        // u_j = β̂_j x̃_j has norm |β̂_j| s_j; normalized it is sgn(β̂_j) x̃_j / s_j.
                        sign = b.signum();
                        Coord::L1 { k: 1.0 / (b.abs() * s), nonneg: true }
                    }
                }
                PenaltyFamily::Scad => Coord::Scad { s },
                PenaltyFamily::Mcp => Coord::Mcp { s },
            };
            if let Coord::Frozen = coord {
                coords.push(coord);
                continue;
            }
            let dst = &mut z[j * n..(j + 1) * n];
            for (o, v) in dst.iter_mut().zip(d.xc.col(j)) {
                *o = sign * v / s;
            }
            out_factor[j] = sign / s;
            coords.push(coord);
        }

        Ok(Self {
            n,
            p,
            z,
            y: d.yc,
            x_means: d.x_means,
            y_mean: d.y_mean,
            coords,
            out_factor,
            scad_a: spec.scad_a,
            mcp_gamma: spec.mcp_gamma,
        })
    }

    #[inline]
    fn col(&self, j: usize) -> &[f64] {
        &self.z[j * self.n..(j + 1) * self.n]
    }

    /// Smallest λ at which all coefficients are zero.
    pub(crate) fn lambda_max(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.p {
            let g = dot(self.col(j), &self.y);
            let cand = match self.coords[j] {
                Coord::Frozen => 0.0,
                Coord::L1 { k, nonneg } => {
                    let g = if nonneg { g.max(0.0) } else { g.abs() };
                    g / k
                }
                Coord::Scad { s } | Coord::Mcp { s } => g.abs() * s,
            };
            best = best.max(cand);
        }
        best
    }

    fn update(&self, j: usize, u: f64, lambda: f64) -> f64 {
        match self.coords[j] {
            Coord::Frozen => 0.0,
            Coord::L1 { k, nonneg: false } => soft_threshold(u, lambda * k),
            Coord::L1 { k, nonneg: true } => (u - lambda * k).max(0.0),
            Coord::Scad { s } => s * scad_argmin(s * s, u / s, lambda, self.scad_a),
            Coord::Mcp { s } => s * mcp_argmin(s * s, u / s, lambda, self.mcp_gamma),
        }
    }

    fn penalty(&self, b: &[f64], lambda: f64) -> f64 {
        b.iter()
            .zip(&self.coords)
            .map(|(&bj, c)| match *c {
                _ if bj == 0.0 => 0.0,
                Coord::Frozen => 0.0,
                Coord::L1 { k, .. } => lambda * k * bj.abs(),
                Coord::Scad { s } => scad_penalty(bj / s, lambda, self.scad_a),
                Coord::Mcp { s } => mcp_penalty(bj / s, lambda, self.mcp_gamma),
            })
            .sum()
    }

    /// Solves at `lambda` starting from `b` (updated in place).
    pub(crate) fn solve(&self, lambda: f64, b: &mut [f64]) -> Result<(Vec<f64>, usize)> {
        let mut r = self.y.clone();
        for j in 0..self.p {
            if b[j] != 0.0 {
                if let Coord::Frozen = self.coords[j] {
                    b[j] = 0.0;
                    continue;
                }
                for (ri, zi) in r.iter_mut().zip(self.col(j)) {
                    *ri -= zi * b[j];
                }
            }
        }
        let objective = |r: &[f64], b: &[f64]| 0.5 * dot(r, r) + self.penalty(b, lambda);
        let mut trace = vec![objective(&r, b)];
        for sweep in 1..=MAX_SWEEPS {
            let mut max_delta = 0.0f64;
            for j in 0..self.p {
                if let Coord::Frozen = self.coords[j] {
                    continue;
                }
                let zj = self.col(j);
                let u = dot(zj, &r) + b[j];
                let new = self.update(j, u, lambda);
                let delta = new - b[j];
                if delta != 0.0 {
                    for (ri, zi) in r.iter_mut().zip(zj) {
                        *ri -= zi * delta;
                    }
                    b[j] = new;
                    max_delta = max_delta.max(delta.abs());
                }
            }
            trace.push(objective(&r, b));
            if max_delta < TOLERANCE {
                return Ok((trace, sweep));
            }
        }
        Err(Error::Convergence {
            sweeps: MAX_SWEEPS,
            trace,
        })
    }

    pub(crate) fn to_fit(&self, b: &[f64], lambda: f64, trace: Vec<f64>, sweeps: usize) -> LinearFit {
        let coefficients: Vec<f64> = b.iter().zip(&self.out_factor).map(|(b, f)| b * f).collect();
        let intercept = self.y_mean - dot(&self.x_means, &coefficients);
        LinearFit::new(intercept, coefficients, trace, lambda, sweeps)
    }

    pub(crate) fn zero_start(&self) -> Vec<f64> {
        vec![0.0; self.p]
    }
}

/// Fits every λ in `lambdas` (any order), warm-starting from the previous one.
pub(crate) fn fit_path(x: &Matrix, y: &[f64], spec: &PenaltySpec, lambdas: &[f64]) -> Result<Vec<LinearFit>> {
    let prep = Prepared::new(x, y, spec)?;
    let mut b = prep.zero_start();
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let (trace, sweeps) = prep.solve(lambda, &mut b)?;
        out.push(prep.to_fit(&b, lambda, trace, sweeps));
    }
    Ok(out)
}
