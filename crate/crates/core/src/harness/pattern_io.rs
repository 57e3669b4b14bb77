use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::model::GoverningPattern;

pub const PATTERN_FORMAT: &str = "governing-pattern";
pub const PATTERN_VERSION: u32 = 1;

/// On-disk form of a fitted pattern plus the names needed to read it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternFile {
    pub format: String,
    pub version: u32,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub pattern: GoverningPattern,
}

impl PatternFile {
    pub fn new(pattern: GoverningPattern, feature_names: Vec<String>, class_names: Vec<String>) -> Self {
        Self {
            format: PATTERN_FORMAT.into(),
            version: PATTERN_VERSION,
            feature_names,
            class_names,
            pattern,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let file: PatternFile = serde_json::from_str(text)?;
        if file.format != PATTERN_FORMAT || file.version != PATTERN_VERSION {
            return Err(HarnessError::InvalidConfig(format!(
                "unsupported pattern file {} v{}",
                file.format, file.version
            )));
        }
        Ok(file)
    }
}

/// One row per curve point: `class_id,class,point,t,<features>`.
pub fn pattern_to_csv(file: &PatternFile) -> String {
    let dim = file.pattern.dim();
    let features: Vec<String> = (0..dim)
        .map(|k| file.feature_names.get(k).cloned().unwrap_or_else(|| format!("x{k}")))
        .collect();
    let mut out = format!("class_id,class,point,t,{}\n", features.join(","));
    for curve in file.pattern.curves() {
        let name = file
            .class_names
            .get(curve.class_id())
            .map_or("", String::as_str);
        for (i, p) in curve.points().iter().enumerate() {
            let ys: Vec<String> = p.y.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{},{},{},{},{}\n", curve.class_id(), name, i, p.t, ys.join(",")));
        }
    }
    out
}
