//! Aggregated per-method report rows and their CSV / JSON / Markdown
//! emission. Output bytes are deterministic for a fixed input.

use serde::{Deserialize, Serialize};

use crate::BenchError;

/// One aggregated line of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub dataset: String,
    pub cost_best: f64,
    pub cost_mean: f64,
    pub cost_std: f64,
    /// Mean recall of the recomputed outlier set against the ground-truth
    /// mask; absent when the dataset carries no mask.
    pub recall_mean: Option<f64>,
    pub recall_std: Option<f64>,
    pub time_mean_s: f64,
    pub time_std_s: f64,
    pub n_seeds: usize,
}

/// A method whose row could not be produced.
#[derive(Debug, Clone, Serialize)]
pub struct MethodFailure {
    pub method: String,
    pub reason: String,
}

/// Report output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(BenchError::Config(format!(
                "unknown report format '{other}' (expected csv, json or markdown)"
            ))),
        }
    }
}

const HEADER: [&str; 10] = [
    "method",
    "dataset",
    "cost_best",
    "cost_mean",
    "cost_std",
    "recall_mean",
    "recall_std",
    "time_mean_s",
    "time_std_s",
    "n_seeds",
];

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

fn opt4(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

fn row_cells(row: &ReportRow) -> [String; 10] {
    [
        row.method.clone(),
        row.dataset.clone(),
        sci(row.cost_best),
        sci(row.cost_mean),
        sci(row.cost_std),
        opt4(row.recall_mean),
        opt4(row.recall_std),
        format!("{:.4}", row.time_mean_s),
        format!("{:.4}", row.time_std_s),
        row.n_seeds.to_string(),
    ]
}

/// Renders the rows in the requested format. Costs use scientific notation
/// with four significant digits; JSON carries the raw values.
pub fn emit_report(rows: &[ReportRow], format: ReportFormat) -> Result<String, BenchError> {
    match format {
        ReportFormat::Csv => {
            let mut out = String::new();
            out.push_str(&HEADER.join(","));
            out.push('\n');
            for row in rows {
                out.push_str(&row_cells(row).join(","));
                out.push('\n');
            }
            Ok(out)
        }
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(rows)
                .map_err(|e| BenchError::Config(e.to_string()))?;
            out.push('\n');
            Ok(out)
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str("| ");
            out.push_str(&HEADER.join(" | "));
            out.push_str(" |\n|");
            out.push_str(&" --- |".repeat(HEADER.len()));
            out.push('\n');
            for row in rows {
                let cells = row_cells(row)
                    .into_iter()
                    .map(|c| if c.is_empty() { "-".to_string() } else { c })
                    .collect::<Vec<_>>();
                out.push_str("| ");
                out.push_str(&cells.join(" | "));
                out.push_str(" |\n");
            }
            Ok(out)
        }
    }
}

/// Sample best / mean / population-std of a series (std is 0 for one value).
/// The mean is clamped to at least the minimum, which summation rounding can
/// otherwise violate by an ulp when all values coincide.
pub fn summarize(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let best = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = (values.iter().sum::<f64>() / n).max(best);
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (best, mean, var.sqrt())
}
