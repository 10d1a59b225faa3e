//! Relative prediction error, variable-selection rates and accuracy summaries.

use std::collections::BTreeSet;

use crate::error::{arg, Result};

/// Fixed-order pairwise summation; the result depends only on the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// `mean((y_test − y_hat)²) / noise_sd²`.
pub fn rpe(y_test: &[f64], y_hat: &[f64], noise_sd: f64) -> Result<f64> {
    if y_test.len() != y_hat.len() {
        return arg(format!(
            "rpe: {} observations but {} predictions",
            y_test.len(),
            y_hat.len()
        ));
    }
    if y_test.is_empty() {
        return arg("rpe: no observations");
    }
    if !(noise_sd > 0.0) || !noise_sd.is_finite() {
        return arg(format!("rpe: noise sd must be positive, got {noise_sd}"));
    }
    let sq: Vec<f64> = y_test.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).collect();
    Ok(pairwise_sum(&sq) / y_test.len() as f64 / (noise_sd * noise_sd))
}

/// The true non-zero coefficients of a simulated model (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionTruth {
    pub true_support: BTreeSet<usize>,
    pub p: usize,
}

impl SelectionTruth {
    pub fn new(true_support: impl IntoIterator<Item = usize>, p: usize) -> Result<Self> {
        let true_support: BTreeSet<usize> = true_support.into_iter().collect();
        if let Some(&j) = true_support.iter().next_back() {
            if j >= p {
                return arg(format!("support index {j} out of range for p = {p}"));
            }
        }
        Ok(Self { true_support, p })
    }

    /// Support of a coefficient vector.
    pub fn from_beta(beta: &[f64]) -> Self {
        Self {
            true_support: beta.iter().enumerate().filter(|(_, b)| **b != 0.0).map(|(j, _)| j).collect(),
            p: beta.len(),
        }
    }

    pub fn n_null(&self) -> usize {
        self.p - self.true_support.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionRates {
    pub fake_ratio: f64,
    pub lost_ratio: f64,
}

/// Per-variable selection error rates across replications.
///
/// `fake = #(null variable selected) / (#nulls · reps)` and
/// `lost = #(true variable missed) / (#true · reps)`; a rate whose
/// denominator is zero is reported as 0.
pub fn selection_rates(selected: &[BTreeSet<usize>], truth: &SelectionTruth) -> Result<SelectionRates> {
    if selected.is_empty() {
        return arg("selection_rates: no replications");
    }
    let mut fake = 0usize;
    let mut lost = 0usize;
    for s in selected {
        if let Some(&j) = s.iter().next_back() {
            if j >= truth.p {
                return arg(format!("selected index {j} out of range for p = {}", truth.p));
            }
        }
        fake += s.difference(&truth.true_support).count();
        lost += truth.true_support.difference(s).count();
    }
    let reps = selected.len();
    let ratio = |count: usize, per_rep: usize| {
        if per_rep == 0 {
            0.0
        } else {
            count as f64 / (per_rep * reps) as f64
        }
    };
    Ok(SelectionRates {
        fake_ratio: ratio(fake, truth.n_null()),
        lost_ratio: ratio(lost, truth.true_support.len()),
    })
}

/// Mean and sample standard deviation of a per-replication quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricCell {
    pub mean: f64,
    pub sd: f64,
    pub n_reps: usize,
}

impl MetricCell {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return arg("metric cell needs at least one replication");
        }
        let n = values.len();
        if values.iter().all(|v| *v == values[0]) {
            return Ok(Self { mean: values[0], sd: 0.0, n_reps: n });
        }
        let mean = pairwise_sum(values) / n as f64;
        let sd = if n > 1 {
            let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            (pairwise_sum(&sq) / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self { mean, sd, n_reps: n })
    }
}

pub fn accuracy_stats(per_rep: &[f64]) -> Result<MetricCell> {
    if let Some(a) = per_rep.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return arg(format!("accuracy {a} is outside [0, 1]"));
    }
    MetricCell::from_values(per_rep)
}

/// Fraction of positions where the two label vectors agree.
pub fn accuracy<T: PartialEq>(truth: &[T], predicted: &[T]) -> Result<f64> {
    if truth.len() != predicted.len() || truth.is_empty() {
        return arg(format!(
            "accuracy: {} labels vs {} predictions",
            truth.len(),
            predicted.len()
        ));
    }
    let hits = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}
