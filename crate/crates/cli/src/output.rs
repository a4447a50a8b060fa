use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::run::Artifacts;

/// Numeric sample table with a fixed column order.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == header.len()));
        Table { header, rows }
    }

    /// Values use Rust's shortest round-trip formatting, so output is byte-stable.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv of numbers is utf-8"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Written {
    pub csv: PathBuf,
    pub report: PathBuf,
}

/// Writes `<stem>.csv` and `<stem>.report.json` under `dir`.
pub fn write_artifacts(dir: &Path, stem: &str, artifacts: &Artifacts) -> Result<Written, CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let report_path = dir.join(format!("{stem}.report.json"));
    let csv = artifacts.table.to_csv().map_err(|e| CliError::Io {
        path: csv_path.clone(),
        source: e.into(),
    })?;
    fs::write(&csv_path, csv).map_err(io(&csv_path))?;
    let mut json = serde_json::to_string_pretty(&artifacts.report).expect("report serializes");
    json.push('\n');
    fs::write(&report_path, json).map_err(io(&report_path))?;
    Ok(Written {
        csv: csv_path,
        report: report_path,
    })
}
