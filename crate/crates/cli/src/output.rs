//! Data-file and manifest emission.
//!
//! Floats are serialized with 17 significant digits so files round-trip
//! bit-exactly; identical (config, seed) runs produce byte-identical data
//! files. The manifest carries the resolved configuration, library version,
//! seed, wall time, and flagged-sample counts.

use crate::config::{ExperimentConfig, OutputFormat};
use serde_json::{json, Value};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Formats one float at full round-trip precision.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A table of named float columns, written as CSV or JSON.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| fmt_f64(*x)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|row| {
                row.iter().map(|x| {
                    if x.is_finite() { json!(x) } else { json!(x.to_string()) }
                }).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }
}

/// Collects the artifacts of one run and writes them at the end.
pub struct RunWriter {
    dir: PathBuf,
    format: OutputFormat,
    files: Vec<String>,
    pub flagged_samples: usize,
    pub warnings: Vec<String>,
}

impl RunWriter {
    pub fn new(dir: &Path, format: OutputFormat) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(RunWriter {
            dir: dir.to_path_buf(),
            format,
            files: Vec::new(),
            flagged_samples: 0,
            warnings: Vec::new(),
        })
    }

    /// Writes a data table under `name` (extension chosen by format).
    pub fn write_table(&mut self, name: &str, table: &Table) -> std::io::Result<PathBuf> {
        let (file_name, payload) = match self.format {
            OutputFormat::Csv => (format!("{name}.csv"), table.to_csv()),
            OutputFormat::Json => (
                format!("{name}.json"),
                serde_json::to_string_pretty(&table.to_json()).expect("table serialization"),
            ),
        };
        let path = self.dir.join(&file_name);
        let mut f = fs::File::create(&path)?;
        f.write_all(payload.as_bytes())?;
        self.files.push(file_name);
        Ok(path)
    }

    /// Writes scenario-level summary values as JSON.
    pub fn write_summary(&mut self, summary: &Value) -> std::io::Result<PathBuf> {
        let path = self.dir.join("summary.json");
        fs::write(&path, serde_json::to_string_pretty(summary).expect("summary"))?;
        self.files.push("summary.json".to_string());
        Ok(path)
    }

    /// Writes the manifest; call last so the file list is complete.
    pub fn write_manifest(
        &mut self,
        config: &ExperimentConfig,
        wall_time_s: f64,
    ) -> std::io::Result<PathBuf> {
        let manifest = json!({
            "library_version": loschmidt::VERSION,
            "scenario": config.scenario.map(|s| s.name()),
            "seed": config.seed,
            "wall_time_s": wall_time_s,
            "flagged_samples": self.flagged_samples,
            "warnings": self.warnings,
            "data_files": self.files,
            "resolved_config": serde_json::to_value(config).expect("config serialization"),
        });
        let path = self.dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest"))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [1.0 / 3.0, -2.718281828459045e-7, 0.0, 123456.789] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["t", "G"]);
        t.push(vec![0.0, 1.0]);
        t.push(vec![0.5, 0.25]);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,G");
        assert_eq!(csv.lines().count(), 3);
    }
}
