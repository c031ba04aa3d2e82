//! CSV and JSON emission.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bounds::Constants;
use crate::error::{Error, Result};

/// Scientific notation with 17 significant digits; round-trips every `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// First 16 hex digits of the SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    hex::encode(&hash[..8])
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Columns appended to every experiment row.
pub const PROVENANCE_COLUMNS: [&str; 6] = ["C1", "C2", "c", "delta", "lipschitz", "config_digest"];

pub fn provenance_cells(constants: &Constants, config_digest: &str) -> Vec<String> {
    vec![
        format_float(constants.c1),
        format_float(constants.c2),
        format_float(constants.c),
        format_float(constants.delta),
        format_float(constants.lipschitz),
        config_digest.to_string(),
    ]
}

/// A plot-ready table plus a JSON summary of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub kind: String,
    pub config_digest: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: serde_json::Value,
}

impl Report {
    pub fn to_csv(&self) -> Result<String> {
        let header: Vec<&str> = self.header.iter().map(String::as_str).collect();
        csv_string(&header, &self.rows)
    }

    /// Index of column `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Column `name` parsed as floats.
    pub fn float_column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .column(name)
            .ok_or_else(|| Error::InvalidArgument(format!("report has no column {name}")))?;
        self.rows
            .iter()
            .map(|r| {
                r[j].parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("column {name}: `{}` is not a number", r[j])))
            })
            .collect()
    }

    /// Writes `path` (CSV) and the companion `path.json`; returns the JSON path.
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
        }
        std::fs::write(path, self.to_csv()?).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let json_path = companion_path(path);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&json_path, text).map_err(|source| Error::Io { path: json_path.clone(), source })?;
        Ok(json_path)
    }
}

pub fn companion_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Worker count from `RANKCAP_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("RANKCAP_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config { path: "RANKCAP_THREADS".into(), message: format!("expected a positive integer, got `{v}`") }),
        },
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (rayon's default when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}
