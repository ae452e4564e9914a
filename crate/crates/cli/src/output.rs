//! Result files. Every file is written to a temporary sibling and renamed
//! into place, so readers never observe a partial file.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Int(k) => k.to_string(),
            // 17 significant digits: enough to reproduce every f64 exactly.
            Cell::Real(x) => format!("{x:.16e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file_name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render()))?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let wrap = |source: std::io::Error| CliError::Write { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(wrap)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(bytes).map_err(wrap)?;
    tmp.as_file().sync_all().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

/// Writes `result.json` and every table into `dir`; returns the paths written.
pub fn write_all(dir: &Path, result: &serde_json::Value, tables: &[Table]) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(t.file_name);
        let bytes = t.to_csv().map_err(|e| CliError::Runtime(e.to_string()))?;
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    let path = dir.join("result.json");
    let mut text = serde_json::to_string_pretty(result).expect("result serializes");
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    written.push(path);
    Ok(written)
}
