//! CSV ingestion and export of panels, and the versioned result document.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WnError};
use crate::mc::McTable;
use crate::panel::SeriesPanel;
use crate::scan::{Calibration, TestOutcome};

pub const SCHEMA_VERSION: &str = "1";

/// A panel read from CSV together with its column names and any warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedPanel {
    pub panel: SeriesPanel,
    pub names: Option<Vec<String>>,
    pub warnings: Vec<String>,
}

impl LoadedPanel {
    /// Name of 0-based column `i`, or its 1-based index without a header.
    pub fn column_name(&self, i: usize) -> String {
        match &self.names {
            Some(names) => names[i].clone(),
            None => (i + 1).to_string(),
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<LoadedPanel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| WnError::Io(format!("{}: {e}", path.display())))?;
    read_csv(file, has_header)
}

/// Reads a rectangular numeric CSV with one row per time point.
pub fn read_csv<R: Read>(input: R, has_header: bool) -> Result<LoadedPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut names = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(idx as u64 + 1, |p| p.line());
            WnError::Parse {
                line: line as usize,
                column: None,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(idx as u64 + 1, |p| p.line()) as usize;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if let Some(w) = width {
            if record.len() != w {
                return Err(WnError::Parse {
                    line,
                    column: None,
                    message: format!("expected {w} fields, found {}", record.len()),
                });
            }
        } else {
            width = Some(record.len());
        }
        if has_header && names.is_none() {
            names = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(WnError::Parse {
                    line,
                    column: Some(c + 1),
                    message: format!("'{cell}' is not a finite number"),
                }),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(WnError::EmptyInput);
    }
    let panel = SeriesPanel::from_rows(&rows)?;
    let mut warnings = Vec::new();
    if panel.has_ties() {
        let msg = "ties detected; ranks are broken by time order".to_string();
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(LoadedPanel { panel, names, warnings })
}

/// Writes a panel as CSV in shortest round-trip decimal form.
pub fn write_csv<W: Write>(panel: &SeriesPanel, names: Option<&[String]>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| WnError::Io(e.to_string());
    if let Some(names) = names {
        w.write_record(names).map_err(io)?;
    }
    for t in 0..panel.n() {
        w.write_record(panel.row(t).iter().map(|v| v.to_string())).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(panel: &SeriesPanel, names: Option<&[String]>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| WnError::Io(format!("{}: {e}", path.display())))?;
    write_csv(panel, names, file)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Outcome {
    Test(TestOutcome),
    Table(McTable),
}

/// Output of one command: configuration echo, result, warnings and timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: String,
    /// Fully resolved configuration of the command.
    pub command: serde_json::Value,
    pub outcome: Outcome,
    /// Column names of the argmax pair, when the input had a header.
    #[serde(default)]
    pub argmax_columns: Option<(String, String)>,
    pub warnings: Vec<String>,
    pub wall_seconds: f64,
    pub seed: Option<u64>,
}

impl ResultDocument {
    pub fn new(command: serde_json::Value, outcome: Outcome) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            command,
            outcome,
            argmax_columns: None,
            warnings: Vec::new(),
            wall_seconds: 0.0,
            seed: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| WnError::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ResultDocument =
            serde_json::from_str(text).map_err(|e| WnError::Config(format!("invalid result document: {e}")))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(WnError::Config(format!(
                "unsupported schema version '{}'",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    /// CSV projection: one row for a test, one row per cell for a table.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        match &self.outcome {
            Outcome::Table(table) => table.write_csv(out),
            Outcome::Test(o) => {
                let (l, perms) = match o.calibration {
                    Calibration::Gumbel => (None, None),
                    Calibration::Permutation { perms, l } => (Some(l), Some(perms)),
                };
                let (name_i, name_j) = self
                    .argmax_columns
                    .clone()
                    .unwrap_or_else(|| (o.argmax.0.to_string(), o.argmax.1.to_string()));
                let row = TestRow {
                    method: o.method.short_name(),
                    calibration: if l.is_some() { "permutation" } else { "gumbel" },
                    l,
                    perms,
                    statistic: o.statistic,
                    threshold: o.threshold,
                    p_value: o.p_value,
                    reject: o.reject,
                    alpha: o.alpha,
                    argmax_i: name_i,
                    argmax_j: name_j,
                    argmax_k: o.argmax.2,
                    max_cell: o.max_cell,
                    n_cells: o.n_cells,
                    tie_flag: o.tie_flag,
                };
                let mut w = csv::Writer::from_writer(out);
                w.serialize(row).map_err(|e| WnError::Io(e.to_string()))?;
                w.flush()?;
                Ok(())
            }
        }
    }
}

#[derive(Serialize)]
struct TestRow {
    method: &'static str,
    calibration: &'static str,
    l: Option<usize>,
    perms: Option<usize>,
    statistic: f64,
    threshold: f64,
    p_value: f64,
    reject: bool,
    alpha: f64,
    argmax_i: String,
    argmax_j: String,
    argmax_k: usize,
    max_cell: f64,
    n_cells: usize,
    tie_flag: bool,
}
