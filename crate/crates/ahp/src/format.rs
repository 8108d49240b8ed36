//! Matrix file formats.
//!
//! JSON: the canonical form lists the upper triangle,
//! `{"n": 3, "labels": ["a", "b", "c"], "upper": [[0, 1, 3.0], [0, 2, 5.0], [1, 2, 0.5]]}`.
//! A full matrix is also accepted as `{"entries": [[1, 3, 5], ...]}`.
//!
//! CSV: comma-separated rows, optional header row of labels. Cells may be
//! decimals or fractions such as `1/3`; blank cells are filled from their
//! reciprocal mirror.

use std::path::Path;

use ahp_core::{JudgmentMatrix, ScaleMode};
use serde::{Deserialize, Serialize};

use crate::error::{AhpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MatrixFormat {
    Json,
    Csv,
}

impl MatrixFormat {
    /// `.csv` files are CSV, everything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Json,
        }
    }
}

/// Serialized judgment matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_mode: Option<ScaleMode>,
}

impl MatrixDocument {
    /// Canonical upper-triangle document for a matrix.
    pub fn from_matrix(a: &JudgmentMatrix) -> Self {
        MatrixDocument {
            n: Some(a.n()),
            labels: a.labels().to_vec(),
            upper: Some(a.upper_judgments()),
            entries: None,
            scale_mode: None,
        }
    }

    /// Validates the document. `strict` forces the 1/9..9 scale regardless of
    /// the document's own `scale_mode`.
    pub fn into_matrix(self, strict: bool) -> Result<JudgmentMatrix> {
        let scale_mode = if strict {
            ScaleMode::StrictSaaty
        } else {
            self.scale_mode.unwrap_or_default()
        };
        let a = match (self.upper, self.entries) {
            (Some(upper), None) => {
                let n = self
                    .n
                    .ok_or_else(|| AhpError::parse("field `n`", "required with `upper`"))?;
                JudgmentMatrix::from_upper(n, &upper, scale_mode)?
            }
            (None, Some(entries)) => {
                if let Some(n) = self.n {
                    if n != entries.len() {
                        return Err(AhpError::parse(
                            "field `n`",
                            format!("n = {n} but `entries` has {} rows", entries.len()),
                        ));
                    }
                }
                JudgmentMatrix::from_rows(&entries, scale_mode)?
            }
            (Some(_), Some(_)) => {
                return Err(AhpError::parse("document", "give either `upper` or `entries`, not both"))
            }
            (None, None) => return Err(AhpError::parse("document", "missing `upper` or `entries`")),
        };
        Ok(a.with_labels(self.labels)?)
    }
}

pub fn parse_json_document<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        AhpError::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })
}

pub fn parse_matrix_json(text: &str, strict: bool) -> Result<JudgmentMatrix> {
    parse_json_document::<MatrixDocument>(text)?.into_matrix(strict)
}

/// Parses `3`, `0.5` or `1/3`.
pub fn parse_ratio(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    match cell.split_once('/') {
        Some((num, den)) => Some(num.trim().parse::<f64>().ok()? / den.trim().parse::<f64>().ok()?),
        None => cell.parse().ok(),
    }
}

pub fn parse_matrix_csv(text: &str, strict: bool) -> Result<JudgmentMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(index as u64 + 1, |p| p.line());
            AhpError::parse(format!("line {line}"), e.to_string())
        })?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Option<Option<f64>>> = record
            .iter()
            .map(|cell| if cell.is_empty() { Some(None) } else { parse_ratio(cell).map(Some) })
            .collect();
        if let Some(field) = parsed.iter().position(Option::is_none) {
            if rows.is_empty() && labels.is_empty() {
                labels = record.iter().map(str::to_owned).collect();
                continue;
            }
            return Err(AhpError::parse(
                format!("line {line}, field {}", field + 1),
                format!("`{}` is not a number or fraction", &record[field]),
            ));
        }
        rows.push(parsed.into_iter().flatten().collect());
    }
    if rows.is_empty() {
        return Err(AhpError::parse("line 1", "no matrix rows"));
    }
    let scale_mode = if strict { ScaleMode::StrictSaaty } else { ScaleMode::FreePositive };
    Ok(JudgmentMatrix::from_optional_rows(&rows, scale_mode)?.with_labels(labels)?)
}

pub fn parse_matrix(text: &str, format: MatrixFormat, strict: bool) -> Result<JudgmentMatrix> {
    match format {
        MatrixFormat::Json => parse_matrix_json(text, strict),
        MatrixFormat::Csv => parse_matrix_csv(text, strict),
    }
}

/// Reads and validates a matrix file; `format` defaults to the file extension.
pub fn load_matrix(path: &Path, format: Option<MatrixFormat>, strict: bool) -> Result<JudgmentMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| AhpError::io(path, e))?;
    parse_matrix(&text, format.unwrap_or_else(|| MatrixFormat::from_path(path)), strict)
}

/// Canonical JSON for a matrix.
pub fn matrix_to_json(a: &JudgmentMatrix) -> String {
    serde_json::to_string(&MatrixDocument::from_matrix(a)).expect("documents always serialize")
}
