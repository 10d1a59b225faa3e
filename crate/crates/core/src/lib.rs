//! Feature scaling as per-feature affine maps, including the adaptive
//! (regression-weighted) family, together with the penalized regressions,
//! classifiers and simulation harness used to measure how sensitive a model
//! is to the choice of scaling.
//!
//! ```
//! use adascale::numerics::Matrix;
//! use adascale::scaling::{fit_scaler, ScalerSpec, ScalingMethod};
//!
//! let x = Matrix::from_rows(&[[1.0], [2.0], [3.0]]).unwrap();
//! let s = fit_scaler(ScalerSpec::of(ScalingMethod::Standardization), &x, None, None).unwrap();
//! assert_eq!(s.transform(&x).unwrap().col(0), &[-1.0, 0.0, 1.0]);
//! ```

pub mod classifiers;
pub mod datagen;
pub mod dataio;
pub mod error;
pub mod harness;
pub mod kv;
pub mod metrics;
pub mod models;
pub mod numerics;
pub mod regression;
pub mod scaling;

pub use error::{Error, Result};
