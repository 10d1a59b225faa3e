use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};
use crate::numerics::{ColumnStats, Matrix};
use crate::scaling::FeatureKind;

#[derive(Debug, Clone, PartialEq)]
pub struct LoadOptions {
    /// Column holding the response; `None` loads every kept column as a feature.
    pub target: Option<String>,
    pub kind_overrides: BTreeMap<String, FeatureKind>,
    pub drop_columns: Vec<String>,
    /// Expand categorical features into 0/1 indicator columns.
    pub one_hot: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            target: None,
            kind_overrides: BTreeMap::new(),
            drop_columns: vec!["ID".to_string()],
            one_hot: false,
        }
    }
}

impl LoadOptions {
    pub fn with_target(target: impl Into<String>) -> Self {
        Self {
            target: Some(target.into()),
            ..Self::default()
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_csv(std::io::BufReader::new(file), opts)
}

/// Parses comma-separated numeric data with one header row.
///
/// Row numbers in errors are 1-based data-row indices (the header is row 0).
pub fn parse_csv<R: Read>(reader: R, opts: &LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(e, "header"))?
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let h = if i == 0 { h.trim_start_matches('\u{feff}') } else { h };
            h.trim().to_string()
        })
        .collect();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(Error::Format("missing header row".into()));
    }
    let mut seen = HashSet::new();
    for h in &headers {
        if h.is_empty() {
            return Err(Error::Format("empty column name in header".into()));
        }
        if !seen.insert(h.as_str()) {
            return Err(Error::Format(format!("duplicate column name `{h}`")));
        }
    }
    for name in opts.kind_overrides.keys() {
        if !seen.contains(name.as_str()) {
            return Err(Error::Argument(format!("kind override for unknown column `{name}`")));
        }
    }

    let target_idx = match &opts.target {
        Some(t) => Some(
            headers
                .iter()
                .position(|h| h == t)
                .ok_or_else(|| Error::Argument(format!("target column `{t}` not found")))?,
        ),
        None => None,
    };
    if let Some(t) = &opts.target {
        if opts.drop_columns.iter().any(|d| d == t) {
            return Err(Error::Argument(format!("target column `{t}` is also dropped")));
        }
    }
    let feature_idx: Vec<usize> = (0..headers.len())
        .filter(|&i| Some(i) != target_idx && !opts.drop_columns.iter().any(|d| *d == headers[i]))
        .collect();

    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    let mut record = csv::StringRecord::new();
    let mut row = 0usize;
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(csv_error(e, "record")),
        }
        row += 1;
        for (c, field) in record.iter().enumerate() {
            if opts.drop_columns.iter().any(|d| *d == headers[c]) {
                continue;
            }
            let v = parse_cell(field).ok_or_else(|| Error::Parse {
                row,
                column: headers[c].clone(),
                message: format!("`{field}` is not a finite number"),
            })?;
            cols[c].push(v);
        }
    }
    if row == 0 {
        return Err(Error::Format("no data rows".into()));
    }

    let mut names = Vec::with_capacity(feature_idx.len());
    let mut kinds = Vec::with_capacity(feature_idx.len());
    for &i in &feature_idx {
        let inferred = if ColumnStats::of(&cols[i])?.distinct_count <= 2 {
            FeatureKind::Binary
        } else {
            FeatureKind::Numeric
        };
        kinds.push(*opts.kind_overrides.get(&headers[i]).unwrap_or(&inferred));
        names.push(headers[i].clone());
    }
    let x = if feature_idx.is_empty() {
        Matrix::zeros(row, 0)
    } else {
        let data: Vec<&[f64]> = feature_idx.iter().map(|&i| cols[i].as_slice()).collect();
        Matrix::from_columns(&data)?
    };
    let (y, target_name) = match target_idx {
        Some(t) => (std::mem::take(&mut cols[t]), Some(headers[t].clone())),
        None => (Vec::new(), None),
    };
    let d = Dataset::new(x, names, kinds, y, target_name)?;
    if opts.one_hot {
        d.one_hot_categoricals()
    } else {
        Ok(d)
    }
}

fn parse_cell(field: &str) -> Option<f64> {
    let v: f64 = field.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

fn csv_error(e: csv::Error, what: &str) -> Error {
    match e.position() {
        Some(pos) => Error::Format(format!("malformed {what} at line {}: {e}", pos.line())),
        None => Error::Format(format!("malformed {what}: {e}")),
    }
}

/// Writes features then target (if any) with shortest round-trip decimals.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = d.feature_names.iter().map(String::as_str).collect();
    if let Some(t) = &d.target_name {
        header.push(t);
    }
    w.write_record(&header).map_err(write_error)?;
    let mut buf = vec![0.0; d.n_features()];
    let mut fields: Vec<String> = Vec::with_capacity(header.len());
    for i in 0..d.n_rows() {
        d.x.row_into(i, &mut buf);
        fields.clear();
        fields.extend(buf.iter().map(|v| format!("{v:?}")));
        if d.has_target() {
            fields.push(format!("{:?}", d.y[i]));
        }
        w.write_record(&fields).map_err(write_error)?;
    }
    w.flush()?;
    Ok(())
}

fn write_error(e: csv::Error) -> Error {
    Error::Format(format!("failed to write CSV: {e}"))
}
