//! Text audit record for a fitted scaler:
//!
//! ```text
//! # adascale scaler record
//! method = standardization
//! gamma = 1.0
//! features = 3
//! offsets = 2.0,0.5,-1.25
//! multipliers = 1.0,0.5,0.0
//! zeroed = 2
//! ```

use super::{FittedScaler, ScalerSpec, ScalingMethod};
use crate::error::{Error, Result};
use crate::kv::{format_f64_list, format_usize_list, KvRecord};

const HEADER: &str = "# adascale scaler record";

impl FittedScaler {
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        out.push_str(&format!("method = {}\n", self.spec.method.name()));
        out.push_str(&format!("gamma = {:?}\n", self.spec.gamma));
        out.push_str(&format!("features = {}\n", self.n_features()));
        out.push_str(&format!("offsets = {}\n", format_f64_list(&self.offsets)));
        out.push_str(&format!("multipliers = {}\n", format_f64_list(&self.multipliers)));
        out.push_str(&format!("zeroed = {}\n", format_usize_list(&self.zeroed_features)));
        out
    }

    /// Parses a record written by [`FittedScaler::to_record`]. Warnings are not
    /// part of the record and come back empty.
    pub fn from_record(text: &str) -> Result<Self> {
        let kv = KvRecord::parse(text)?;
        let method: ScalingMethod = kv
            .require("method")?
            .parse()
            .map_err(|e: Error| Error::Format(e.to_string()))?;
        let gamma: f64 = kv
            .parse_value("gamma")?
            .ok_or_else(|| Error::Format("missing key `gamma`".into()))?;
        let spec = ScalerSpec::new(method, gamma).map_err(|e| Error::Format(e.to_string()))?;
        let features: usize = kv
            .parse_value("features")?
            .ok_or_else(|| Error::Format("missing key `features`".into()))?;
        let offsets = kv.f64_list("offsets")?.unwrap_or_default();
        let multipliers = kv.f64_list("multipliers")?.unwrap_or_default();
        let zeroed = kv.usize_list("zeroed")?.unwrap_or_default();
        if offsets.len() != features || multipliers.len() != features {
            return Err(Error::Format(format!(
                "expected {features} offsets and multipliers, found {} and {}",
                offsets.len(),
                multipliers.len()
            )));
        }
        if offsets.iter().chain(&multipliers).any(|v| !v.is_finite()) {
            return Err(Error::Format("scaler parameters must be finite".into()));
        }
        let fitted = FittedScaler::from_parts(spec, offsets, multipliers, Vec::new());
        if fitted.zeroed_features != zeroed {
            return Err(Error::Format(
                "`zeroed` does not match the zero multipliers".into(),
            ));
        }
        Ok(FittedScaler {
            warnings: Vec::new(),
            ..fitted
        })
    }
}
