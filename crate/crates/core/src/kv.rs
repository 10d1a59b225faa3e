//! Flat `key = value` text records shared by scaler/fit audit output and
//! experiment config files.
//!
//! One entry per line, `#` starts a comment line, blank lines are ignored.
//! Keys are ASCII identifiers (`[A-Za-z0-9_.-]`). Numbers use `.` as the
//! decimal separator and shortest round-trip formatting.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvRecord {
    entries: BTreeMap<String, (usize, String)>,
}

impl KvRecord {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Format(format!("line {line_no}: expected `key = value`")));
            };
            let key = k.trim();
            if key.is_empty()
                || !key
                    .bytes()
                    .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-'))
            {
                return Err(Error::Format(format!("line {line_no}: invalid key {key:?}")));
            }
            if entries
                .insert(key.to_string(), (line_no, v.trim().to_string()))
                .is_some()
            {
                return Err(Error::Format(format!("line {line_no}: duplicate key `{key}`")));
            }
        }
        Ok(Self { entries })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Format(format!("missing key `{key}`")))
    }

    pub fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| {
                Error::Format(format!("line {line}: cannot parse `{key}` value {v:?}"))
            }),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some((line, v)) = self.entries.get(key) else {
            return Ok(None);
        };
        parse_list(v)
            .map(Some)
            .map_err(|bad| Error::Format(format!("line {line}: bad number {bad:?} in `{key}`")))
    }

    pub fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some((line, v)) = self.entries.get(key) else {
            return Ok(None);
        };
        parse_list(v)
            .map(Some)
            .map_err(|bad| Error::Format(format!("line {line}: bad index {bad:?} in `{key}`")))
    }
}

fn parse_list<T: std::str::FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| s.trim().to_string()))
        .collect()
}

/// Comma-joined list using the shortest representation that parses back bit-exactly.
pub fn format_f64_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn format_usize_list(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
