//! `key = value` audit record for a [`LinearFit`], same style as the scaler record.

use super::LinearFit;
use crate::error::{Error, Result};
use crate::kv::{format_f64_list, KvRecord};

impl LinearFit {
    pub fn to_record(&self) -> String {
        format!(
            "# adascale linear fit record\nintercept = {:?}\nlambda = {:?}\nsweeps = {}\nfeatures = {}\ncoefficients = {}\n",
            self.intercept,
            self.lambda_used,
            self.sweeps,
            self.coefficients.len(),
            format_f64_list(&self.coefficients),
        )
    }

    /// Inverse of [`LinearFit::to_record`]; the objective trace is not stored.
    pub fn from_record(text: &str) -> Result<Self> {
        let kv = KvRecord::parse(text)?;
        let need = |k: &str| Error::Format(format!("missing key `{k}`"));
        let intercept: f64 = kv.parse_value("intercept")?.ok_or_else(|| need("intercept"))?;
        let lambda: f64 = kv.parse_value("lambda")?.ok_or_else(|| need("lambda"))?;
        let sweeps: usize = kv.parse_value("sweeps")?.unwrap_or(0);
        let features: usize = kv.parse_value("features")?.ok_or_else(|| need("features"))?;
        let coefficients = kv.f64_list("coefficients")?.unwrap_or_default();
        if coefficients.len() != features {
            return Err(Error::Format(format!(
                "expected {features} coefficients, found {}",
                coefficients.len()
            )));
        }
        if !intercept.is_finite() || !(lambda >= 0.0) || !lambda.is_finite() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Format("fit values must be finite (and lambda ≥ 0)".into()));
        }
        Ok(LinearFit::new(intercept, coefficients, Vec::new(), lambda, sweeps))
    }
}
