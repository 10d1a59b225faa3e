use std::fmt::Write as _;

use super::{Cell, ExperimentReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            other => Err(Error::Argument(format!("unknown report format `{other}`"))),
        }
    }
}

const SKIPPED: &str = "/";

fn fmt_cell(c: &Cell, sd: bool) -> String {
    match c {
        Cell::Value(v) => format!("{:.4}", if sd { v.sd } else { v.mean }),
        Cell::Skipped(_) => SKIPPED.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders mean and standard-deviation tables for every metric, four decimals.
/// Skipped cells print as `/` with their reasons listed after the tables.
pub fn render_report(r: &ExperimentReport, format: ReportFormat) -> String {
    let mut out = String::new();
    let skipped = r.skipped();
    match format {
        ReportFormat::Csv => {
            let mut header = vec!["metric".to_string(), "statistic".into(), "scaler".into()];
            header.extend(r.models.iter().map(|m| csv_field(m)));
            let _ = writeln!(out, "{}", header.join(","));
            for (m, metric) in r.metrics.iter().enumerate() {
                for (stat, sd) in [("mean", false), ("sd", true)] {
                    for (s, scaler) in r.scalers.iter().enumerate() {
                        let mut row = vec![metric.name().to_string(), stat.into(), csv_field(scaler)];
                        row.extend(r.cells[m][s].iter().map(|c| fmt_cell(c, sd)));
                        let _ = writeln!(out, "{}", row.join(","));
                    }
                }
            }
            for (s, m, why) in &skipped {
                let _ = writeln!(out, "# skipped {s} / {m}: {why}");
            }
            for w in &r.warnings {
                let _ = writeln!(out, "# warning: {w}");
            }
        }
        ReportFormat::Markdown => {
            let _ = writeln!(out, "# {}\n", r.title);
            let reps: Vec<String> = r.models.iter().zip(&r.reps).map(|(m, n)| format!("{m}: {n}")).collect();
            let _ = writeln!(out, "Replications per model: {}.\n", reps.join(", "));
            for (m, metric) in r.metrics.iter().enumerate() {
                for (stat, sd) in [("mean", false), ("standard deviation", true)] {
                    let _ = writeln!(out, "## {} ({stat})\n", metric.title());
                    let _ = writeln!(out, "| Scaler | {} |", r.models.join(" | "));
                    let _ = writeln!(out, "|---|{}", "---:|".repeat(r.models.len()));
                    for (s, scaler) in r.scalers.iter().enumerate() {
                        let row: Vec<String> = r.cells[m][s].iter().map(|c| fmt_cell(c, sd)).collect();
                        let _ = writeln!(out, "| {scaler} | {} |", row.join(" | "));
                    }
                    out.push('\n');
                }
            }
            if !skipped.is_empty() {
                let _ = writeln!(out, "`{SKIPPED}` marks cells that could not be computed:\n");
                for (s, m, why) in &skipped {
                    let _ = writeln!(out, "- {s} / {m}: {why}");
                }
                out.push('\n');
            }
            if !r.warnings.is_empty() {
                let _ = writeln!(out, "Warnings:\n");
                for w in &r.warnings {
                    let _ = writeln!(out, "- {w}");
                }
            }
        }
    }
    out
}
