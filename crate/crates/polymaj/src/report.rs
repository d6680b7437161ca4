//! Reports. A report is `{meta, result}` serialized deterministically:
//! the same configuration and seed give byte-identical JSON. Wall-clock
//! data goes to a separate sidecar file so it never enters that output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Run metadata recorded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Resolved parameters of the command.
    pub params: serde_json::Value,
}

impl RunMeta {
    pub fn new(command: &str, seed: u64, trials: Option<u64>, params: serde_json::Value) -> Self {
        RunMeta { tool: "polymaj", version: env!("CARGO_PKG_VERSION"), command: command.into(), seed, trials, params }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub meta: &'a RunMeta,
    pub result: &'a T,
}

/// Timing data kept out of the deterministic report.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub started_unix_ms: u128,
    pub elapsed_ms: u128,
    pub threads: usize,
}

impl Sidecar {
    pub fn new(started: SystemTime, elapsed: Duration, threads: usize) -> Self {
        let started_unix_ms = started.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis());
        Sidecar { started_unix_ms, elapsed_ms: elapsed.as_millis(), threads }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let mut s =
        serde_json::to_string_pretty(v).map_err(|source| Error::Json { context: "serialize".into(), source })?;
    s.push('\n');
    Ok(s)
}

/// CSV with a header row taken from the field names of `T`.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, v: &T) -> Result<()> {
    write_text(path, &to_json(v)?)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_text(path, &to_csv(rows)?)
}

/// `dir/report.json` has its sidecar at `dir/report.sidecar.json`.
pub fn sidecar_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    report.with_file_name(format!("{stem}.sidecar.json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        n: u32,
        epsilon: f64,
        degree: usize,
    }

    #[test]
    fn csv_header_and_rows() {
        let rows = [Row { n: 3, epsilon: 0.125, degree: 2 }, Row { n: 5, epsilon: 0.125, degree: 2 }];
        assert_eq!(to_csv(&rows).unwrap(), "n,epsilon,degree\n3,0.125,2\n5,0.125,2\n");
    }

    #[test]
    fn json_is_stable() {
        let meta = RunMeta::new("degree", 7, None, serde_json::json!({"epsilon": 0.25}));
        let a = to_json(&Report { meta: &meta, result: &[1, 2] }).unwrap();
        let b = to_json(&Report { meta: &meta, result: &[1, 2] }).unwrap();
        assert_eq!(a, b);
        assert!(a.ends_with("}\n") && a.contains("\"seed\": 7"));
        assert_eq!(sidecar_path(Path::new("out/report.json")), Path::new("out/report.sidecar.json"));
    }
}
