//! Randomized property checks shared by the `properties` and `acceptance`
//! test targets. Each check runs `cases` instances from a fixed proptest seed
//! and reports the first counterexample as an error string.

#![allow(dead_code)]

use std::collections::BTreeSet;

use adascale::classifiers::{logistic_loss_grad, ClassifierKind, ClassifierSpec, GaussianNbModel, KnnModel, Label};
use adascale::datagen::{realize, SimScenario};
use adascale::dataio::{kfold_indices, parse_csv, split_indices, write_csv, Dataset, LoadOptions};
use adascale::metrics::{accuracy_stats, rpe, selection_rates, SelectionTruth};
use adascale::numerics::{cholesky_factor, mean_sd, sample_covariance, sample_mvn, solve_least_squares, Matrix, RngStream};
use adascale::regression::{fit_ols, fit_penalized, predict_linear, PenaltyFamily, PenaltySpec};
use adascale::scaling::{fit_scaler, FeatureKind, ScalerSpec, ScalingMethod};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub const CASES: u32 = 1000;

/// Every property, by name, for the acceptance summary.
pub const ALL: &[(&str, fn(u32) -> Result<(), String>)] = &[
    ("least-squares normal equations", least_squares_normal_equations),
    ("cholesky round trip", cholesky_round_trip),
    ("mvn second moments", mvn_second_moments),
    ("scaler affine contract", scaler_affine_contract),
    ("AS / GAS(γ=1) multiplier magnitudes", adaptive_matches_generalized_at_one),
    ("standardization and range statistics", standardization_and_range_statistics),
    ("gelman leaves binary columns", gelman_leaves_binary_columns),
    ("ASHD univariate slopes", ashd_univariate_slopes),
    ("scaler fit determinism", scaler_fit_is_deterministic),
    ("coordinate descent monotone objective", coordinate_descent_monotone),
    ("OLS prediction invariance", ols_prediction_invariance),
    ("penalized sign-flip invariance", sign_flip_invariance),
    ("lasso orthonormal soft-threshold", lasso_orthonormal_oracle),
    ("MCP with huge gamma matches lasso", mcp_large_gamma_is_lasso),
    ("adaptive lasso scale equivariance", adaptive_lasso_scale_equivariance),
    ("gaussian NB affine label invariance", naive_bayes_affine_invariance),
    ("KNN uniform scaling invariance", knn_uniform_scaling_invariance),
    ("logistic gradient finite differences", logistic_gradient_matches_fd),
    ("classifier determinism", classifiers_are_deterministic),
    ("rpe range and noise scaling", rpe_range_and_noise_scaling),
    ("selection rates range and permutation", selection_rates_range_and_permutation),
    ("accuracy stats mean", accuracy_stats_mean),
    ("realized design moments", realized_design_moments),
    ("realized noise sd", realized_noise_sd),
    ("csv round trip", csv_round_trip),
    ("split and fold partitions", split_and_fold_partitions),
];

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn fail(msg: impl Into<String>) -> TestCaseError {
    TestCaseError::fail(msg.into())
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| fail(e.to_string()))
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `n × p` design of independent normals with column scales and offsets drawn
/// from `seed`, plus `y = Xβ + 0.5ε` with every `|β_j| ∈ [0.5, 3]`.
pub struct Instance {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub beta: Vec<f64>,
}

pub fn instance(n: usize, p: usize, seed: u64) -> Instance {
    let mut g = RngStream::new(seed, 17).generator();
    let scales: Vec<f64> = (0..p).map(|_| 10f64.powf(g.random_range(-1.5..1.5))).collect();
    let offsets: Vec<f64> = (0..p)
        .map(|_| {
            let m: f64 = g.random_range(5.0..20.0);
            if g.random::<bool>() { m } else { -m }
        })
        .collect();
    let beta: Vec<f64> = (0..p)
        .map(|j| {
            let b: f64 = g.random_range(0.5..3.0);
            (if g.random::<bool>() { b } else { -b }) / scales[j]
        })
        .collect();
    let mut cols = vec![vec![0.0; n]; p];
    for i in 0..n {
        for j in 0..p {
            cols[j][i] = offsets[j] + scales[j] * gaussian(&mut g);
        }
    }
    let x = Matrix::from_columns(&cols).unwrap();
    let mut y = x.matvec(&beta).unwrap();
    for v in &mut y {
        *v += 1.0 + 0.5 * gaussian(&mut g);
    }
    Instance { x, y, beta }
}

fn dims(n: std::ops::RangeInclusive<usize>, p: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (usize, usize, u64)> {
    (n, p, any::<u64>())
}

pub fn least_squares_normal_equations(cases: u32) -> Result<(), String> {
    run(cases, (1usize..=8, 1usize..=30, any::<u64>()), |(p, extra, seed)| {
        let n = p + extra;
        let inst = instance(n, p, seed);
        let b = ok(solve_least_squares(&inst.x, &inst.y))?;
        let fitted = ok(inst.x.matvec(&b))?;
        let r: Vec<f64> = inst.y.iter().zip(&fitted).map(|(a, f)| a - f).collect();
        let lhs = ok(inst.x.t_matvec(&r))?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rhs = ok(inst.x.t_matvec(&inst.y))?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(lhs < 1e-8 * rhs, "‖Xᵀr‖∞ = {lhs:e} vs ‖Xᵀy‖∞ = {rhs:e}");
        Ok(())
    })
}

pub fn cholesky_round_trip(cases: u32) -> Result<(), String> {
    run(cases, (1usize..=8, any::<u64>()), |(p, seed)| {
        let mut g = RngStream::new(seed, 1).generator();
        let mut l = Matrix::zeros(p, p);
        let mut rows = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in 0..i {
                rows[i][j] = g.random_range(-2.0..2.0);
            }
            rows[i][i] = g.random_range(0.5..3.0);
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                l.col_mut(j)[i] = *v;
            }
        }
        let s = ok(l.matmul(&l.transpose()))?;
        let back = ok(cholesky_factor(&s))?;
        for j in 0..p {
            for i in 0..p {
                let d = (back[(i, j)] - l[(i, j)]).abs();
                prop_assert!(d < 1e-9, "L[{i},{j}] off by {d:e}");
            }
        }
        Ok(())
    })
}

/// Random covariance `D R D` with `R_ij = ρ^|i−j|`, `ρ ∈ [0.75, 0.95]`.
fn strong_covariance(p: usize, g: &mut impl Rng) -> Matrix {
    let rho: f64 = g.random_range(0.75..0.95);
    let sd: Vec<f64> = (0..p).map(|_| g.random_range(0.5..3.0)).collect();
    let rows: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| sd[i] * sd[j] * rho.powi((i as i32 - j as i32).abs())).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

/// Entries checked by the moment properties: |S_ij| ≥ 0.1 and |corr| ≥ 0.5.
/// Weaker correlations have a sampling error above 3% at 200,000 draws.
fn check_moments(emp: &Matrix, s: &Matrix) -> Result<(), TestCaseError> {
    let p = s.ncols();
    for i in 0..p {
        for j in 0..p {
            let v = s[(i, j)];
            let corr = v / (s[(i, i)] * s[(j, j)]).sqrt();
            if v.abs() < 0.1 || corr.abs() < 0.5 {
                continue;
            }
            let rel = (emp[(i, j)] - v).abs() / v.abs();
            prop_assert!(rel < 0.03, "S[{i},{j}] = {v}, empirical {} ({:.2}%)", emp[(i, j)], rel * 100.0);
        }
    }
    Ok(())
}

pub fn mvn_second_moments(cases: u32) -> Result<(), String> {
    run(cases, (1usize..=3, any::<u64>()), |(p, seed)| {
        let mut g = RngStream::new(seed, 2).generator();
        let s = strong_covariance(p, &mut g);
        let mu: Vec<f64> = (0..p).map(|_| g.random_range(-5.0..5.0)).collect();
        let x = ok(sample_mvn(&mu, &s, 200_000, &RngStream::new(seed, 3)))?;
        check_moments(&sample_covariance(&x), &s)
    })
}

const ALL_METHODS_GAMMA: [f64; 3] = [0.0, 0.5, 1.0];

pub fn scaler_affine_contract(cases: u32) -> Result<(), String> {
    run(cases, (dims(3..=30, 1..=5), 0usize..3), |((n, p, seed), gi)| {
        let inst = instance(n.max(p + 2), p, seed);
        for method in ScalingMethod::ALL {
            let spec = ok(ScalerSpec::new(method, ALL_METHODS_GAMMA[gi]))?;
            let s = ok(fit_scaler(spec, &inst.x, Some(&inst.y), None))?;
            prop_assert_eq!(s.offsets.len(), p);
            prop_assert_eq!(s.multipliers.len(), p);
            let t = ok(s.transform(&inst.x))?;
            for j in 0..p {
                for i in 0..inst.x.nrows() {
                    let want = s.multipliers[j] * (inst.x[(i, j)] - s.offsets[j]);
                    prop_assert!(t[(i, j)].to_bits() == want.to_bits(), "{method:?} [{i},{j}]");
                }
            }
            let zeroed: Vec<usize> = (0..p).filter(|&j| s.multipliers[j] == 0.0).collect();
            prop_assert_eq!(&s.zeroed_features, &zeroed);
        }
        Ok(())
    })
}

pub fn adaptive_matches_generalized_at_one(cases: u32) -> Result<(), String> {
    run(cases, dims(3..=30, 1..=5), |(n, p, seed)| {
        let inst = instance(n.max(p + 2), p, seed);
        let a = ok(fit_scaler(ScalerSpec::of(ScalingMethod::Adaptive), &inst.x, Some(&inst.y), None))?;
        let g = ok(fit_scaler(
            ok(ScalerSpec::new(ScalingMethod::GeneralizedAdaptive, 1.0))?,
            &inst.x,
            Some(&inst.y),
            None,
        ))?;
        for j in 0..p {
            prop_assert_eq!(a.multipliers[j].abs(), g.multipliers[j]);
            prop_assert_eq!(a.offsets[j], g.offsets[j]);
        }
        Ok(())
    })
}

pub fn standardization_and_range_statistics(cases: u32) -> Result<(), String> {
    run(cases, dims(2..=40, 1..=5), |(n, p, seed)| {
        let inst = instance(n, p, seed);
        let st = ok(fit_scaler(ScalerSpec::of(ScalingMethod::Standardization), &inst.x, None, None))?;
        let t = ok(st.transform(&inst.x))?;
        for col in t.columns() {
            let (m, sd) = mean_sd(col);
            prop_assert!(m.abs() < 1e-10 && (sd - 1.0).abs() < 1e-10, "mean {m:e}, sd {sd}");
        }
        let rs = ok(fit_scaler(ScalerSpec::of(ScalingMethod::Range), &inst.x, None, None))?;
        let t = ok(rs.transform(&inst.x))?;
        for col in t.columns() {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo == 0.0 && (hi - 1.0).abs() < 1e-12, "range [{lo}, {hi}]");
        }
        Ok(())
    })
}

pub fn gelman_leaves_binary_columns(cases: u32) -> Result<(), String> {
    run(cases, (dims(3..=30, 1..=4), prop::collection::vec(any::<bool>(), 4)), |((n, p, seed), binary)| {
        let inst = instance(n, p, seed);
        let mut cols: Vec<Vec<f64>> = inst.x.columns().map(<[f64]>::to_vec).collect();
        let mut g = RngStream::new(seed, 9).generator();
        for (j, col) in cols.iter_mut().enumerate() {
            if binary[j] {
                let (a, b) = (g.random_range(-5.0..5.0), g.random_range(-5.0..5.0));
                for v in col.iter_mut() {
                    *v = if g.random::<bool>() { a } else { b };
                }
            }
        }
        let x = Matrix::from_columns(&cols).unwrap();
        for kinds in [None, Some(binary[..p].iter().map(|&b| if b { FeatureKind::Binary } else { FeatureKind::Numeric }).collect::<Vec<_>>())] {
            let s = ok(fit_scaler(ScalerSpec::of(ScalingMethod::Gelman2SD), &x, None, kinds.as_deref()))?;
            let t = ok(s.transform(&x))?;
            for j in (0..p).filter(|&j| binary[j]) {
                let same = x.col(j).iter().zip(t.col(j)).all(|(a, b)| a.to_bits() == b.to_bits());
                prop_assert!(same, "binary column {j} changed");
            }
        }
        Ok(())
    })
}

pub fn ashd_univariate_slopes(cases: u32) -> Result<(), String> {
    run(cases, dims(3..=40, 1..=5), |(n, p, seed)| {
        let inst = instance(n, p, seed);
        let s = ok(fit_scaler(ScalerSpec::of(ScalingMethod::AdaptiveHighDim), &inst.x, Some(&inst.y), None))?;
        let (ym, _) = mean_sd(&inst.y);
        for (j, col) in inst.x.columns().enumerate() {
            let (xm, _) = mean_sd(col);
            let sxy: f64 = col.iter().zip(&inst.y).map(|(a, b)| (a - xm) * (b - ym)).sum();
            let sxx: f64 = col.iter().map(|a| (a - xm) * (a - xm)).sum();
            let want = (sxy / sxx).abs();
            let got = s.multipliers[j];
            prop_assert!((got - want).abs() <= 1e-10 * want.max(1e-300), "feature {j}: {got} vs {want}");
        }
        Ok(())
    })
}

pub fn scaler_fit_is_deterministic(cases: u32) -> Result<(), String> {
    run(cases, (dims(3..=20, 1..=4), 0usize..10), |((n, p, seed), m)| {
        let inst = instance(n.max(p + 2), p, seed);
        let spec = ok(ScalerSpec::new(ScalingMethod::ALL[m], 0.5))?;
        let a = ok(fit_scaler(spec, &inst.x, Some(&inst.y), None))?;
        let b = ok(fit_scaler(spec, &inst.x, Some(&inst.y), None))?;
        prop_assert_eq!(a, b);
        Ok(())
    })
}

const FAMILIES: [PenaltyFamily; 5] = [
    PenaltyFamily::Lasso,
    PenaltyFamily::AdaptiveLasso,
    PenaltyFamily::Scad,
    PenaltyFamily::Mcp,
    PenaltyFamily::Garrote,
];

/// λ as a fraction of the family's λ_max, log-uniform over [1e-3, 1].
fn lambda_for(x: &Matrix, y: &[f64], family: PenaltyFamily, frac_log10: f64) -> Result<f64, TestCaseError> {
    let lmax = ok(adascale::regression::lambda_max(x, y, &PenaltySpec::new(family, 0.0)))?;
    Ok(lmax * 10f64.powf(frac_log10))
}

pub fn coordinate_descent_monotone(cases: u32) -> Result<(), String> {
    run(cases, (dims(3..=40, 1..=6), 0usize..5, -3.0f64..0.0), |((n, p, seed), f, lf)| {
        let inst = instance(n.max(p + 2), p, seed);
        let family = FAMILIES[f];
        let lambda = lambda_for(&inst.x, &inst.y, family, lf)?;
        let fit = ok(fit_penalized(&inst.x, &inst.y, &PenaltySpec::new(family, lambda)))?;
        for w in fit.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs(), "{family:?}: {} → {}", w[0], w[1]);
        }
        Ok(())
    })
}

pub fn ols_prediction_invariance(cases: u32) -> Result<(), String> {
    run(cases, (dims(3..=30, 1..=5), 0usize..3), |((n, p, seed), gi)| {
        let inst = instance(n.max(p + 3), p, seed);
        let raw = ok(fit_ols(&inst.x, &inst.y))?;
        let base = ok(predict_linear(&raw, &inst.x))?;
        let scale = base.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for method in ScalingMethod::ALL {
            let s = ok(fit_scaler(ok(ScalerSpec::new(method, ALL_METHODS_GAMMA[gi]))?, &inst.x, Some(&inst.y), None))?;
            if s.multipliers.contains(&0.0) {
                continue;
            }
            let xs = ok(s.transform(&inst.x))?;
            let pred = ok(predict_linear(&ok(fit_ols(&xs, &inst.y))?, &xs))?;
            for (a, b) in pred.iter().zip(&base) {
                prop_assert!((a - b).abs() <= 1e-8 * scale, "{method:?}: {a} vs {b}");
            }
        }
        Ok(())
    })
}

fn negate_columns(x: &Matrix, flip: &[bool]) -> Matrix {
    let cols: Vec<Vec<f64>> = x
        .columns()
        .zip(flip)
        .map(|(c, &f)| c.iter().map(|v| if f { -v } else { *v }).collect())
        .collect();
    Matrix::from_columns(&cols).unwrap()
}

pub fn sign_flip_invariance(cases: u32) -> Result<(), String> {
    let strat = (dims(3..=30, 1..=5), prop::collection::vec(any::<bool>(), 5), 0usize..3, -3.0f64..0.0);
    run(cases, strat, |((n, p, seed), flip, f, lf)| {
        let inst = instance(n.max(p + 2), p, seed);
        let family = [PenaltyFamily::Lasso, PenaltyFamily::Scad, PenaltyFamily::Mcp][f];
        let lambda = lambda_for(&inst.x, &inst.y, family, lf)?;
        let spec = PenaltySpec::new(family, lambda);
        let a = ok(fit_penalized(&inst.x, &inst.y, &spec))?;
        let xf = negate_columns(&inst.x, &flip[..p]);
        let b = ok(fit_penalized(&xf, &inst.y, &spec))?;
        for j in 0..p {
            let want = if flip[j] { -a.coefficients[j] } else { a.coefficients[j] };
            prop_assert!((b.coefficients[j] - want).abs() <= 1e-8 * (1.0 + want.abs()), "β_{j}");
        }
        let pa = ok(predict_linear(&a, &inst.x))?;
        let pb = ok(predict_linear(&b, &xf))?;
        for (u, v) in pa.iter().zip(&pb) {
            prop_assert!((u - v).abs() <= 1e-8 * (1.0 + u.abs()), "{u} vs {v}");
        }
        Ok(())
    })
}

/// Columns orthonormal and orthogonal to the intercept.
pub fn orthonormal_design(n: usize, p: usize, seed: u64) -> Matrix {
    let mut g = RngStream::new(seed, 5).generator();
    let a = nalgebra::DMatrix::from_fn(n, p + 1, |_, j| if j == 0 { 1.0 } else { gaussian(&mut g) });
    let q = a.qr().q();
    let cols: Vec<Vec<f64>> = (1..=p).map(|j| q.column(j).iter().copied().collect()).collect();
    Matrix::from_columns(&cols).unwrap()
}

pub fn lasso_orthonormal_oracle(cases: u32) -> Result<(), String> {
    run(cases, (dims(3..=40, 1..=6), 0.0f64..1.0), |((n, p, seed), frac)| {
        let n = n.max(p + 2);
        let x = orthonormal_design(n, p, seed);
        let mut g = RngStream::new(seed, 6).generator();
        let y: Vec<f64> = (0..n).map(|_| 2.0 + 3.0 * gaussian(&mut g)).collect();
        let z = ok(x.t_matvec(&y))?;
        let lambda = frac * z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let fit = ok(fit_penalized(&x, &y, &PenaltySpec::new(PenaltyFamily::Lasso, lambda)))?;
        for j in 0..p {
            let want = z[j].signum() * (z[j].abs() - lambda).max(0.0);
            prop_assert!((fit.coefficients[j] - want).abs() < 1e-6, "β_{j} = {} vs {want}", fit.coefficients[j]);
        }
        Ok(())
    })
}

pub fn mcp_large_gamma_is_lasso(cases: u32) -> Result<(), String> {
    run(cases, (dims(3..=30, 1..=5), -2.0f64..0.0), |((n, p, seed), lf)| {
        // The concavity b²/(2γ) is measured in coefficient units, so compare on
        // unit-variance columns where the curvature xᵀx is of order n.
        let inst = instance(n.max(p + 2), p, seed);
        let st = ok(fit_scaler(ScalerSpec::of(ScalingMethod::Standardization), &inst.x, None, None))?;
        let x = ok(st.transform(&inst.x))?;
        let lambda = lambda_for(&x, &inst.y, PenaltyFamily::Lasso, lf)?;
        let lasso = ok(fit_penalized(&x, &inst.y, &PenaltySpec::new(PenaltyFamily::Lasso, lambda)))?;
        let mcp = ok(fit_penalized(
            &x,
            &inst.y,
            &PenaltySpec {
                mcp_gamma: 1e6,
                ..PenaltySpec::new(PenaltyFamily::Mcp, lambda)
            },
        ))?;
        for j in 0..p {
            let (a, b) = (lasso.coefficients[j], mcp.coefficients[j]);
            prop_assert!((a - b).abs() < 1e-4, "β_{j}: lasso {a} vs mcp {b}");
        }
        Ok(())
    })
}

pub fn adaptive_lasso_scale_equivariance(cases: u32) -> Result<(), String> {
    let strat = (dims(3..=30, 1..=5), prop::collection::vec((-2.0f64..2.0, any::<bool>()), 5), -3.0f64..0.0);
    run(cases, strat, |((n, p, seed), mults, lf)| {
        let inst = instance(n.max(p + 3), p, seed);
        let d: Vec<f64> = mults[..p].iter().map(|&(e, neg)| if neg { -10f64.powf(e) } else { 10f64.powf(e) }).collect();
        let cols: Vec<Vec<f64>> = inst.x.columns().zip(&d).map(|(c, a)| c.iter().map(|v| a * v).collect()).collect();
        let xs = Matrix::from_columns(&cols).unwrap();
        let lambda = lambda_for(&inst.x, &inst.y, PenaltyFamily::AdaptiveLasso, lf)?;
        let spec = PenaltySpec::new(PenaltyFamily::AdaptiveLasso, lambda);
        let a = ok(fit_penalized(&inst.x, &inst.y, &spec))?;
        let b = ok(fit_penalized(&xs, &inst.y, &spec))?;
        prop_assert_eq!(&a.selected_support, &b.selected_support);
        let pa = ok(predict_linear(&a, &inst.x))?;
        let pb = ok(predict_linear(&b, &xs))?;
        let scale = pa.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (u, v) in pa.iter().zip(&pb) {
            prop_assert!((u - v).abs() <= 1e-8 * scale, "{u} vs {v}");
        }
        Ok(())
    })
}

/// Two or three Gaussian classes with shifted means; labels are arbitrary integers.
pub fn class_data(n: usize, p: usize, k: usize, seed: u64) -> (Matrix, Vec<Label>) {
    let mut g = RngStream::new(seed, 8).generator();
    let labels: Vec<Label> = (0..k).map(|c| c as Label * 3 - 2).collect();
    let centers: Vec<Vec<f64>> = (0..k).map(|_| (0..p).map(|_| g.random_range(-2.0..2.0)).collect()).collect();
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % k;
        rows.push((0..p).map(|j| centers[c][j] + gaussian(&mut g)).collect::<Vec<f64>>());
        y.push(labels[c]);
    }
    (Matrix::from_rows(&rows).unwrap(), y)
}

fn affine(x: &Matrix, a: &[f64], m: &[f64]) -> Matrix {
    let cols: Vec<Vec<f64>> = x
        .columns()
        .enumerate()
        .map(|(j, c)| c.iter().map(|v| a[j] * (v - m[j])).collect())
        .collect();
    Matrix::from_columns(&cols).unwrap()
}

pub fn naive_bayes_affine_invariance(cases: u32) -> Result<(), String> {
    let strat = (dims(6..=60, 1..=4), 2usize..=3, prop::collection::vec((-2.0f64..2.0, any::<bool>(), -10.0f64..10.0), 4));
    run(cases, strat, |((n, p, seed), k, aff)| {
        let (x, y) = class_data(n, p, k, seed);
        let (xt, _) = class_data(40, p, k, seed ^ 0x5555);
        let a: Vec<f64> = aff[..p].iter().map(|&(e, neg, _)| if neg { -10f64.powf(e) } else { 10f64.powf(e) }).collect();
        let m: Vec<f64> = aff[..p].iter().map(|t| t.2).collect();
        let base = ok(ok(GaussianNbModel::fit(&x, &y))?.predict(&xt))?;
        let moved = ok(ok(GaussianNbModel::fit(&affine(&x, &a, &m), &y))?.predict(&affine(&xt, &a, &m)))?;
        prop_assert_eq!(base, moved);
        Ok(())
    })
}

pub fn knn_uniform_scaling_invariance(cases: u32) -> Result<(), String> {
    run(cases, (dims(3..=50, 1..=4), 1usize..=7, -2.0f64..2.0), |((n, p, seed), k, e)| {
        let (x, y) = class_data(n, p, 2, seed);
        let (xt, _) = class_data(30, p, 2, seed ^ 0xaaaa);
        let k = k.min(n);
        let c = 10f64.powf(e);
        let a = vec![c; p];
        let zero = vec![0.0; p];
        let base = ok(ok(KnnModel::fit(&x, &y, k))?.predict(&xt))?;
        let scaled = ok(ok(KnnModel::fit(&affine(&x, &a, &zero), &y, k))?.predict(&affine(&xt, &a, &zero)))?;
        prop_assert_eq!(base, scaled);
        Ok(())
    })
}

pub fn logistic_gradient_matches_fd(cases: u32) -> Result<(), String> {
    run(cases, (dims(2..=30, 1..=5), any::<u64>()), |((n, p, seed), wseed)| {
        let (x, y) = class_data(n.max(2), p, 2, seed);
        let y01: Vec<f64> = y.iter().map(|&l| if l == y[0] { 0.0 } else { 1.0 }).collect();
        let mut g = RngStream::new(wseed, 4).generator();
        let w: Vec<f64> = (0..p).map(|_| g.random_range(-2.0..2.0)).collect();
        let b: f64 = g.random_range(-2.0..2.0);
        let (_, gw, gb) = ok(logistic_loss_grad(&x, &y01, &w, b))?;
        let gmax = gw.iter().fold(gb.abs(), |m, v| m.max(v.abs())).max(1e-3);
        let h = 1e-6;
        let loss = |w: &[f64], b: f64| logistic_loss_grad(&x, &y01, w, b).map(|r| r.0);
        for j in 0..=p {
            let (lp, lm, analytic) = if j < p {
                let (mut wp, mut wm) = (w.clone(), w.clone());
                wp[j] += h;
                wm[j] -= h;
                (ok(loss(&wp, b))?, ok(loss(&wm, b))?, gw[j])
            } else {
                (ok(loss(&w, b + h))?, ok(loss(&w, b - h))?, gb)
            };
            let fd = (lp - lm) / (2.0 * h);
            prop_assert!((fd - analytic).abs() <= 1e-4 * gmax, "coordinate {j}: fd {fd} vs {analytic}");
        }
        Ok(())
    })
}

pub fn classifiers_are_deterministic(cases: u32) -> Result<(), String> {
    run(cases, (dims(8..=40, 1..=3), 0usize..5, any::<u64>()), |((n, p, seed), c, rseed)| {
        let (x, y) = class_data(n, p, 2, seed);
        let kind = ClassifierKind::ALL[c];
        let spec = match ClassifierSpec::default_for(kind) {
            ClassifierSpec::Logistic(mut lp) => {
                lp.max_epochs = 200;
                ClassifierSpec::Logistic(lp)
            }
            ClassifierSpec::Knn { .. } => ClassifierSpec::Knn { k: 3 },
            s => s,
        };
        let rng = RngStream::new(rseed, 0);
        let a = ok(spec.fit(&x, &y, &rng))?;
        let b = ok(spec.fit(&x, &y, &rng))?;
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(ok(a.predict(&x))?, ok(b.predict(&x))?);
        Ok(())
    })
}

pub fn rpe_range_and_noise_scaling(cases: u32) -> Result<(), String> {
    let strat = (prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..50), 1e-3f64..1e3, 1e-2f64..1e2);
    run(cases, strat, |(pairs, sd, c)| {
        let (y, yh): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let r = ok(rpe(&y, &yh, sd))?;
        let rc = ok(rpe(&y, &yh, sd * c))?;
        prop_assert!(r >= 0.0);
        prop_assert!((rc - r / (c * c)).abs() <= 1e-12 * r.max(f64::MIN_POSITIVE), "{rc} vs {}", r / (c * c));
        Ok(())
    })
}

pub fn selection_rates_range_and_permutation(cases: u32) -> Result<(), String> {
    let strat = (1usize..=12, any::<u64>(), 1usize..=30);
    run(cases, strat, |(p, seed, reps)| {
        let mut g = RngStream::new(seed, 11).generator();
        let truth_set: BTreeSet<usize> = (0..p).filter(|_| g.random::<bool>()).collect();
        let truth = ok(SelectionTruth::new(truth_set, p))?;
        let mut sets: Vec<BTreeSet<usize>> = (0..reps).map(|_| (0..p).filter(|_| g.random::<bool>()).collect()).collect();
        let r = ok(selection_rates(&sets, &truth))?;
        prop_assert!((0.0..=1.0).contains(&r.fake_ratio) && (0.0..=1.0).contains(&r.lost_ratio));
        for i in (1..sets.len()).rev() {
            let j = g.random_range(0..=i);
            sets.swap(i, j);
        }
        prop_assert_eq!(ok(selection_rates(&sets, &truth))?, r);
        Ok(())
    })
}

pub fn accuracy_stats_mean(cases: u32) -> Result<(), String> {
    run(cases, prop::collection::vec(0.0f64..=1.0, 1..200), |v| {
        let cell = ok(accuracy_stats(&v))?;
        // Exact rational mean via integer arithmetic on the f64 mantissas is
        // overkill; a Kahan-compensated sum is accurate to a few ulps here.
        let (mut s, mut comp) = (0.0f64, 0.0f64);
        for &x in &v {
            let yk = x - comp;
            let t = s + yk;
            comp = (t - s) - yk;
            s = t;
        }
        let want = s / v.len() as f64;
        prop_assert!((cell.mean - want).abs() <= 4.0 * f64::EPSILON * want.max(f64::MIN_POSITIVE), "{} vs {want}", cell.mean);
        Ok(())
    })
}

fn random_scenario(p: usize, n: usize, seed: u64) -> SimScenario {
    let mut g = RngStream::new(seed, 12).generator();
    let covariance = strong_covariance(p, &mut g);
    SimScenario {
        n,
        p,
        beta: (0..p).map(|_| g.random_range(-3.0..3.0)).collect(),
        mu: (0..p).map(|_| g.random_range(-5.0..5.0)).collect(),
        covariance,
        noise_sd: g.random_range(0.5..5.0),
        train_ratio: 0.5,
    }
}

fn stack(a: &Matrix, b: &Matrix) -> Matrix {
    let cols: Vec<Vec<f64>> = a.columns().zip(b.columns()).map(|(u, v)| u.iter().chain(v).copied().collect()).collect();
    Matrix::from_columns(&cols).unwrap()
}

pub fn realized_design_moments(cases: u32) -> Result<(), String> {
    run(cases, (1usize..=3, any::<u64>()), |(p, seed)| {
        let s = random_scenario(p, 200_000, seed);
        let r = ok(realize(&s, &RngStream::new(seed, 13)))?;
        let x = stack(&r.x_train, &r.x_test);
        check_moments(&sample_covariance(&x), &s.covariance)
    })
}

pub fn realized_noise_sd(cases: u32) -> Result<(), String> {
    run(cases, (1usize..=3, any::<u64>()), |(p, seed)| {
        let s = random_scenario(p, 100_000, seed);
        let r = ok(realize(&s, &RngStream::new(seed, 14)))?;
        let x = stack(&r.x_train, &r.x_test);
        let y: Vec<f64> = r.y_train.iter().chain(&r.y_test).copied().collect();
        let fit = ok(x.matvec(&s.beta))?;
        let resid: Vec<f64> = y.iter().zip(&fit).map(|(a, b)| a - b).collect();
        let (_, sd) = mean_sd(&resid);
        prop_assert!((sd - s.noise_sd).abs() < 0.02 * s.noise_sd, "sd {sd} vs {}", s.noise_sd);
        Ok(())
    })
}

fn finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -1e6f64..1e6,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE / 8.0),
    ]
}

pub fn csv_round_trip(cases: u32) -> Result<(), String> {
    let strat = (1usize..=5, 1usize..=20).prop_flat_map(|(p, n)| (Just(p), Just(n), prop::collection::vec(finite_f64(), p * n), prop::collection::vec(finite_f64(), n)));
    run(cases, strat, |(p, n, data, y)| {
        let x = Matrix::new(n, p, data).unwrap();
        let names: Vec<String> = (0..p).map(|j| format!("x{j}")).collect();
        let d = ok(Dataset::new(x.clone(), names, vec![FeatureKind::Numeric; p], y.clone(), Some("y".into())))?;
        let mut buf = Vec::new();
        ok(write_csv(&d, &mut buf))?;
        let back = ok(parse_csv(buf.as_slice(), &LoadOptions::with_target("y")))?;
        let same = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(u, v)| u.to_bits() == v.to_bits());
        prop_assert!(same(back.x.as_slice(), x.as_slice()), "X changed");
        prop_assert!(same(&back.y, &y), "y changed");
        Ok(())
    })
}

fn is_partition(parts: &[&[usize]], n: usize) -> bool {
    let mut seen = vec![false; n];
    for part in parts {
        for &i in *part {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn split_and_fold_partitions(cases: u32) -> Result<(), String> {
    run(cases, (2usize..=300, 0.01f64..0.99, 2usize..=10, any::<u64>()), |(n, ratio, k, seed)| {
        let (train, test) = ok(split_indices(n, ratio, &RngStream::new(seed, 0)))?;
        prop_assert!(is_partition(&[&train, &test], n));
        let want = ((ratio * n as f64).ceil() as usize).clamp(1, n - 1);
        prop_assert_eq!(train.len(), want);
        let k = k.min(n);
        let folds = ok(kfold_indices(n, k, &RngStream::new(seed, 1)))?;
        prop_assert_eq!(folds.len(), k);
        let refs: Vec<&[usize]> = folds.iter().map(Vec::as_slice).collect();
        prop_assert!(is_partition(&refs, n));
        let (lo, hi) = folds.iter().fold((usize::MAX, 0), |(lo, hi), f| (lo.min(f.len()), hi.max(f.len())));
        prop_assert!(hi - lo <= 1);
        Ok(())
    })
}

/// Used by the acceptance target to time the whole suite.
pub fn run_all(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    ALL.iter().map(|(name, f)| (*name, f(cases))).collect()
}

/// A small file in the credit-default layout: 25 columns, integer-coded
/// demographics, amounts on a scale 10⁴ times the repayment-status codes, and a
/// label driven mostly by the repayment status.
pub fn credit_like_csv(n: usize, seed: u64) -> String {
    use adascale::dataio::CREDIT_COLUMNS;
    let mut g = RngStream::new(seed, 21).generator();
    let mut out = CREDIT_COLUMNS.join(",");
    out.push('\n');
    for id in 1..=n {
        let limit = (g.random_range(1..50) * 10_000) as f64;
        let sex = g.random_range(1..=2);
        let edu = g.random_range(1..=4);
        let mar = g.random_range(1..=3);
        let age = g.random_range(21..70);
        let risk: f64 = gaussian(&mut g);
        let pay: Vec<i32> = (0..6).map(|_| ((risk * 1.5 + gaussian(&mut g) * 0.7).round() as i32).clamp(-2, 8)).collect();
        let bill: Vec<f64> = (0..6).map(|_| (limit * g.random_range(0.0..0.9)).round()).collect();
        let paid: Vec<f64> = (0..6).map(|_| (g.random_range(0.0..20_000.0f64)).round()).collect();
        let default = u8::from(risk + 0.4 * gaussian(&mut g) > 0.8);
        let mut row = vec![id.to_string(), limit.to_string(), sex.to_string(), edu.to_string(), mar.to_string(), age.to_string()];
        row.extend(pay.iter().map(i32::to_string));
        row.extend(bill.iter().map(f64::to_string));
        row.extend(paid.iter().map(f64::to_string));
        row.push(default.to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
