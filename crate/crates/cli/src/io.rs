//! Manifest, series and feature-matrix files.
//!
//! Manifest: comma-separated with header `id,series_file,cord_ph,compromise,split`.
//! Series paths are resolved relative to the manifest. Series files hold one
//! sample per line; `nan` marks a missing sample. Matrix files have an `id`
//! column followed by one column per feature; special values are written as
//! `NaN` (degenerate) or `Inf` (not finite). A JSON sidecar next to each
//! matrix records the catalog and seed it was built with.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use ctgfeat_core::dataset::DatasetError;
use ctgfeat_core::matrix::ColumnMeta;
use ctgfeat_core::series::FHR_SAMPLE_RATE_HZ;
use ctgfeat_core::{FeatureMatrix, FeatureValue, LabeledDataset, Outcome, SpecialKind, Split, TimeSeries};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MANIFEST_HEADER: [&str; 5] = ["id", "series_file", "cord_ph", "compromise", "split"];
pub const MISSING_TOKEN: &str = "nan";
pub const DEGENERATE_TOKEN: &str = "NaN";
pub const NOT_FINITE_TOKEN: &str = "Inf";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("{0}")]
    Dataset(#[from] DatasetError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl IoError {
    fn parse(path: &Path, line: u64, column: usize, message: impl Into<String>) -> Self {
        IoError::Parse {
            path: path.to_path_buf(),
            line,
            column,
            message: message.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            IoError::MissingFile(path.to_path_buf())
        } else {
            IoError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    }

    fn csv(path: &Path, e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line());
        match e.into_kind() {
            csv::ErrorKind::Io(source) => IoError::io(path, source),
            kind => IoError::parse(path, line, 1, format!("{kind:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestRecord {
    pub id: String,
    /// As written in the manifest.
    pub series_file: PathBuf,
    pub outcome: Outcome,
}

fn read_file(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| IoError::io(path, e))
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// Parses the manifest without touching the series files.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>, IoError> {
    let text = read_file(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| IoError::csv(path, e))?.clone();
    let mut cols = [0usize; 5];
    for (slot, name) in cols.iter_mut().zip(MANIFEST_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::parse(path, 1, 1, format!("missing column {name:?}")))?;
    }
    let [c_id, c_file, c_ph, c_comp, c_split] = cols;

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| IoError::csv(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |c: usize| row.get(c).unwrap_or("");
        let id = field(c_id).to_string();
        if id.is_empty() {
            return Err(IoError::parse(path, line, c_id + 1, "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(IoError::DuplicateId(id));
        }
        let ph = field(c_ph);
        let cord_ph = if ph.is_empty() {
            None
        } else {
            let v: f64 = ph
                .parse()
                .map_err(|_| IoError::parse(path, line, c_ph + 1, format!("invalid cord_ph {ph:?}")))?;
            Some(v)
        };
        let comp = field(c_comp);
        let compromise = parse_bool(comp)
            .ok_or_else(|| IoError::parse(path, line, c_comp + 1, format!("invalid compromise {comp:?}")))?;
        let split: Split = field(c_split)
            .parse()
            .map_err(|e: DatasetError| IoError::parse(path, line, c_split + 1, e.to_string()))?;
        out.push(ManifestRecord {
            id,
            series_file: PathBuf::from(field(c_file)),
            outcome: Outcome {
                cord_ph,
                compromise,
                split,
            },
        });
    }
    Ok(out)
}

pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| IoError::csv(path, e);
    w.write_record(MANIFEST_HEADER).map_err(io_err)?;
    for r in records {
        let ph = r.outcome.cord_ph.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            r.id.as_str(),
            &r.series_file.to_string_lossy(),
            &ph,
            if r.outcome.compromise { "true" } else { "false" },
            r.outcome.split.as_str(),
        ])
        .map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::io(path, e.into_error()))?;
    write_file(path, bytes)
}

/// Reads one sample per line at 4 Hz; blank trailing lines are ignored.
pub fn read_series_file(path: &Path, id: &str) -> Result<TimeSeries, IoError> {
    let text = read_file(path)?;
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.eq_ignore_ascii_case(MISSING_TOKEN) {
            samples.push(None);
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| IoError::parse(path, i as u64 + 1, 1, format!("invalid sample {line:?}")))?;
        if !v.is_finite() {
            return Err(IoError::parse(path, i as u64 + 1, 1, format!("non-finite sample {line:?}")));
        }
        samples.push(Some(v));
    }
    TimeSeries::from_samples(id, &samples, FHR_SAMPLE_RATE_HZ)
        .map_err(|e| IoError::parse(path, 1, 1, e.to_string()))
}

pub fn format_series(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(series.len() * 8);
    for s in series.samples() {
        match s {
            Some(v) => out.push_str(&v.to_string()),
            None => out.push_str(MISSING_TOKEN),
        }
        out.push('\n');
    }
    out
}

pub fn write_series_file(path: &Path, series: &TimeSeries) -> Result<(), IoError> {
    write_file(path, format_series(series))
}

pub fn resolve(manifest: &Path, series_file: &Path) -> PathBuf {
    if series_file.is_absolute() {
        series_file.to_path_buf()
    } else {
        manifest.parent().unwrap_or(Path::new("")).join(series_file)
    }
}

/// Manifest plus every referenced series.
pub fn ingest_dataset(manifest: &Path) -> Result<LabeledDataset, IoError> {
    let records = read_manifest(manifest)?;
    let mut series = Vec::with_capacity(records.len());
    let mut outcomes = Vec::with_capacity(records.len());
    for r in records {
        series.push(read_series_file(&resolve(manifest, &r.series_file), &r.id)?);
        outcomes.push(r.outcome);
    }
    Ok(LabeledDataset::new(series, outcomes)?)
}

pub fn format_value(v: FeatureValue) -> String {
    match v {
        FeatureValue::Value(x) => x.to_string(),
        FeatureValue::Special(SpecialKind::Degenerate) => DEGENERATE_TOKEN.into(),
        FeatureValue::Special(SpecialKind::NotFinite) => NOT_FINITE_TOKEN.into(),
    }
}

fn parse_value(s: &str) -> Option<FeatureValue> {
    match s {
        DEGENERATE_TOKEN => Some(FeatureValue::Special(SpecialKind::Degenerate)),
        NOT_FINITE_TOKEN | "-Inf" => Some(FeatureValue::Special(SpecialKind::NotFinite)),
        _ => s.parse::<f64>().ok().filter(|v| v.is_finite()).map(FeatureValue::Value),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureProvenance {
    pub name: String,
    pub params: std::collections::BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectedSeries {
    pub id: String,
    pub missing_fraction: f64,
}

/// Contents of the JSON sidecar written next to a matrix file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixProvenance {
    pub schema_version: u32,
    pub generator: String,
    pub seed: u64,
    pub max_interp_gap_samples: Option<usize>,
    pub max_missing_fraction: Option<f64>,
    pub features: Vec<FeatureProvenance>,
    pub rejected: Vec<RejectedSeries>,
}

pub const SCHEMA_VERSION: u32 = 1;

pub fn generator() -> String {
    format!("ctgfeat {}", env!("CARGO_PKG_VERSION"))
}

pub fn column_provenance(columns: &[ColumnMeta]) -> Vec<FeatureProvenance> {
    columns
        .iter()
        .map(|c| FeatureProvenance {
            name: c.name.clone(),
            params: c.params.iter().cloned().collect(),
        })
        .collect()
}

pub fn sidecar_path(matrix: &Path) -> PathBuf {
    let mut name = matrix.file_name().unwrap_or_default().to_os_string();
    name.push(".provenance.json");
    matrix.with_file_name(name)
}

pub fn format_matrix(m: &FeatureMatrix) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend(m.column_names().into_iter().map(String::from));
    w.write_record(&header).expect("in-memory write");
    for (r, id) in m.row_ids().iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(m.row(r).iter().map(|&v| format_value(v)));
        w.write_record(&rec).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_matrix(path: &Path, m: &FeatureMatrix, provenance: &MatrixProvenance) -> Result<(), IoError> {
    write_file(path, format_matrix(m))?;
    let json = serde_json::to_string_pretty(provenance).expect("serialisable") + "\n";
    write_file(&sidecar_path(path), json)
}

/// Reads a matrix file; parameters and seed come from the sidecar when it
/// exists.
pub fn read_matrix(path: &Path) -> Result<FeatureMatrix, IoError> {
    let text = read_file(path)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| IoError::csv(path, e))?.clone();
    if headers.get(0) != Some("id") {
        return Err(IoError::parse(path, 1, 1, "first column must be \"id\""));
    }
    let names: Vec<String> = headers.iter().skip(1).map(String::from).collect();

    let sidecar = sidecar_path(path);
    let provenance: Option<MatrixProvenance> = if sidecar.exists() {
        let s = read_file(&sidecar)?;
        Some(serde_json::from_str(&s).map_err(|e| {
            IoError::parse(&sidecar, e.line() as u64, e.column(), e.to_string())
        })?)
    } else {
        None
    };
    let columns = names
        .iter()
        .map(|n| ColumnMeta {
            name: n.clone(),
            params: provenance
                .as_ref()
                .and_then(|p| p.features.iter().find(|f| &f.name == n))
                .map(|f| f.params.iter().map(|(k, v)| (k.clone(), *v)).collect())
                .unwrap_or_default(),
        })
        .collect();

    let mut ids = Vec::new();
    let mut cells = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| IoError::csv(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != names.len() + 1 {
            return Err(IoError::parse(
                path,
                line,
                row.len().min(names.len() + 1),
                format!("expected {} fields, found {}", names.len() + 1, row.len()),
            ));
        }
        ids.push(row[0].to_string());
        for (c, tok) in row.iter().enumerate().skip(1) {
            let v = parse_value(tok.trim())
                .ok_or_else(|| IoError::parse(path, line, c + 1, format!("invalid value {tok:?}")))?;
            cells.push(v);
        }
    }
    FeatureMatrix::new(ids, columns, cells, provenance.map_or(0, |p| p.seed)).map_err(|e| match e {
        ctgfeat_core::matrix::MatrixError::DuplicateRow(id) => IoError::DuplicateId(id),
        other => IoError::parse(path, 1, 1, other.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_tokens_round_trip() {
        for v in [
            FeatureValue::Value(0.1),
            FeatureValue::Value(-1.5e-300),
            FeatureValue::Value(140.0),
            FeatureValue::Special(SpecialKind::Degenerate),
            FeatureValue::Special(SpecialKind::NotFinite),
        ] {
            assert_eq!(parse_value(&format_value(v)), Some(v));
        }
        assert_eq!(parse_value("inf"), None);
        assert_eq!(parse_value("abc"), None);
    }

    #[test]
    fn sidecar_sits_next_to_matrix() {
        assert_eq!(
            sidecar_path(Path::new("out/m.csv")),
            PathBuf::from("out/m.csv.provenance.json")
        );
    }

    #[test]
    fn booleans() {
        assert_eq!(parse_bool("TRUE"), Some(true));
        assert_eq!(parse_bool("0"), Some(false));
        assert_eq!(parse_bool("maybe"), None);
    }
}
