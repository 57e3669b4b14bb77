use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::model::TimedSample;

/// Which CSV columns hold time, label and features. An empty feature list
/// selects every other column in header order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub time_column: String,
    pub label_column: String,
    pub feature_columns: Vec<String>,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            time_column: "t".into(),
            label_column: "label".into(),
            feature_columns: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestedStream {
    pub samples: Vec<TimedSample>,
    /// Label strings by dense class id, in first-appearance order.
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

pub fn ingest_csv(path: &Path, columns: &ColumnSpec) -> Result<IngestedStream, HarnessError> {
    let file = std::fs::File::open(path)?;
    ingest_reader(file, columns)
}

/// Reads a headered CSV. Row numbers in errors count data rows from 0.
pub fn ingest_reader<R: Read>(reader: R, columns: &ColumnSpec) -> Result<IngestedStream, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::MissingColumn(name.to_string()))
    };
    let t_col = find(&columns.time_column)?;
    let l_col = find(&columns.label_column)?;
    let feature_names: Vec<String> = if columns.feature_columns.is_empty() {
        headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != t_col && *i != l_col)
            .map(|(_, h)| h.to_string())
            .collect()
    } else {
        columns.feature_columns.clone()
    };
    let f_cols = feature_names
        .iter()
        .map(|n| find(n))
        .collect::<Result<Vec<_>, _>>()?;

    let parse = |row: usize, rec: &csv::StringRecord, col: usize| -> Result<f64, HarnessError> {
        let raw = rec.get(col).unwrap_or("");
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| HarnessError::ParseError {
                row,
                column: headers.get(col).unwrap_or("").to_string(),
                value: raw.to_string(),
            })
    };

    let mut class_names: Vec<String> = Vec::new();
    let mut samples = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let t = parse(row, &rec, t_col)?;
        if let Some(prev) = samples.last().map(|s: &TimedSample| s.t) {
            if !(t > prev) {
                return Err(HarnessError::NonMonotoneTime { row });
            }
        }
        let x = f_cols
            .iter()
            .map(|&c| parse(row, &rec, c))
            .collect::<Result<Vec<_>, _>>()?;
        let name = rec.get(l_col).unwrap_or("");
        let label = match class_names.iter().position(|c| c == name) {
            Some(id) => id,
            None => {
                class_names.push(name.to_string());
                class_names.len() - 1
            }
        };
        samples.push(TimedSample::labeled(t, x, label));
    }
    Ok(IngestedStream {
        samples,
        class_names,
        feature_names,
    })
}
