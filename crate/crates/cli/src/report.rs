//! CSV and JSON report emission.
//!
//! Every CSV starts with a `# stability-lab report v1 ...` comment line that
//! stamps the schema version and pipeline. Files are written to a temporary
//! name and renamed, so a report either appears whole or not at all.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, pipeline: &str) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv");
        format!("# stability-lab report v{SCHEMA_VERSION} pipeline={pipeline}\n{body}")
    }
}

/// Rendered report of one pipeline run.
#[derive(Clone, Debug)]
pub struct Report {
    pub pipeline: String,
    pub csv: String,
    pub json: String,
    /// Set when an adversary search ran out of sweeps.
    pub unconverged: bool,
}

impl Report {
    /// Writes `<pipeline>.csv` and `<pipeline>.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> CliResult<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let csv = dir.join(format!("{}.csv", self.pipeline));
        let json = dir.join(format!("{}.json", self.pipeline));
        write_atomic(&csv, &self.csv)?;
        write_atomic(&json, &self.json)?;
        Ok((csv, json))
    }
}

fn write_atomic(path: &Path, body: &str) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Shortest round-trip rendering of a float, stable across platforms.
pub fn num(v: f64) -> String {
    format!("{v}")
}
