//! Pair records: one JSON object per line.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use entail_core::Label;
use serde::Deserialize;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct PairRecord {
    pub id: String,
    pub premise: String,
    pub hypothesis: String,
    #[serde(default)]
    pub gold: Option<Label>,
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
    #[error("{path}:{line}: duplicate id `{id}`")]
    DuplicateId { path: String, line: usize, id: String },
    #[error("prediction ids do not match the dataset: {0}")]
    IdMismatch(String),
}

pub fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io { path: path.display().to_string(), source })
}

pub fn parse_dataset(text: &str, path: &str) -> Result<Vec<PairRecord>, InputError> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: PairRecord = serde_json::from_str(line).map_err(|e| InputError::Format {
            path: path.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if !ids.insert(rec.id.clone()) {
            return Err(InputError::DuplicateId { path: path.to_string(), line: i + 1, id: rec.id });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn load_dataset(path: &Path) -> Result<Vec<PairRecord>, InputError> {
    parse_dataset(&read(path)?, &path.display().to_string())
}

/// `id<TAB>label` lines.
pub fn parse_predictions(text: &str, path: &str) -> Result<Vec<(String, Label)>, InputError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| InputError::Format { path: path.to_string(), line: i + 1, message };
        let (id, label) = line.split_once('\t').ok_or_else(|| bad("expected id<TAB>label".into()))?;
        out.push((id.to_string(), label.parse().map_err(bad)?));
    }
    Ok(out)
}

pub fn format_predictions(rows: &[(String, Label)]) -> String {
    rows.iter().map(|(id, l)| format!("{id}\t{l}\n")).collect()
}
