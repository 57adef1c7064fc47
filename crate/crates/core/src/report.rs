//! Experiment configuration, CSV rows and JSON sidecars.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orientation::PatternKind;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid config: {0}")]
    Config(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub kind: String,
    pub n: usize,
    pub k: Option<usize>,
}

impl PatternSpec {
    pub fn kind(&self) -> Result<PatternKind, ReportError> {
        self.kind.parse().map_err(|e: crate::orientation::OrientationError| ReportError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub n: usize,
    pub t: usize,
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub search_nodes: u64,
    pub support: u64,
    pub brute_force_n: usize,
    pub injections: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            search_nodes: crate::designs::DEFAULT_NODE_BUDGET,
            support: 1 << 24,
            brute_force_n: crate::counting::EXACT_MAX_N,
            injections: crate::counting::DEFAULT_INJECTION_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub pattern: PatternSpec,
    pub design: DesignSpec,
    /// Regular base tournament file for `R`; the circulant when absent.
    pub base: Option<PathBuf>,
    pub samples: u64,
    pub seed: u64,
    pub exact: bool,
    pub output: Option<PathBuf>,
    pub budgets: Budgets,
}

impl ExperimentConfig {
    pub fn check(&self) -> Result<(), ReportError> {
        self.pattern.kind()?;
        if self.samples == 0 && !self.exact {
            return Err(ReportError::Config("samples must be positive".into()));
        }
        let b = &self.budgets;
        if b.search_nodes == 0 || b.support == 0 || b.brute_force_n == 0 || b.injections == 0 {
            return Err(ReportError::Config("budgets must be positive".into()));
        }
        for path in [&self.design.file, &self.base].into_iter().flatten() {
            if !path.exists() {
                return Err(ReportError::Config(format!("{} does not exist", path.display())));
            }
        }
        Ok(())
    }

    /// Reads the config embedded in a sidecar, or a bare config document.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        #[derive(Deserialize)]
        struct Wrapped {
            config: ExperimentConfig,
        }
        serde_json::from_str::<Wrapped>(text).map(|w| w.config).or_else(|_| serde_json::from_str(text))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub n: usize,
    pub t: usize,
    pub pattern: String,
    pub design: String,
    pub samples: String,
    pub baseline_log2: f64,
    pub estimate_log2: f64,
    pub ratio: f64,
    pub stderr_ratio: f64,
    pub typical_frac: f64,
    pub seed: u64,
}

pub const CSV_HEADER: [&str; 11] = [
    "n",
    "t",
    "pattern",
    "design",
    "samples",
    "baseline_log2",
    "estimate_log2",
    "ratio",
    "stderr_ratio",
    "typical_frac",
    "seed",
];

pub fn csv_string(records: &[CsvRecord]) -> Result<String, ReportError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub seed_generated: bool,
    pub t: usize,
    pub delta: Option<String>,
    /// `R` in hex-row form.
    pub base_r: String,
    pub baseline: String,
    pub design: String,
    pub records: Vec<CsvRecord>,
    pub extra: serde_json::Value,
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| ReportError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_report(csv_path: &Path, records: &[CsvRecord], sidecar: &Sidecar) -> Result<(), ReportError> {
    write_atomic(csv_path, csv_string(records)?.as_bytes())?;
    let side = sidecar_path(csv_path);
    let json = serde_json::to_string_pretty(sidecar).map_err(|source| ReportError::Json { path: side.clone(), source })?;
    write_atomic(&side, json.as_bytes())
}

pub fn read_to_string(path: &Path) -> Result<String, ReportError> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: usize) -> CsvRecord {
        CsvRecord {
            n,
            t: 3,
            pattern: "cycle".into(),
            design: "n7-t3[7xKT]".into(),
            samples: "5040".into(),
            baseline_log2: 5.3,
            estimate_log2: 6.9,
            ratio: 3.01,
            stderr_ratio: 0.0,
            typical_frac: 1.0,
            seed: 1,
        }
    }

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            pattern: PatternSpec { kind: "cycle".into(), n: 7, k: None },
            design: DesignSpec { n: 7, t: 3, file: None },
            base: None,
            samples: 100,
            seed: 5,
            exact: false,
            output: Some("out.csv".into()),
            budgets: Budgets::default(),
        }
    }

    #[test]
    fn header_only_and_rows() {
        let empty = csv_string(&[]).unwrap();
        assert_eq!(empty, format!("{}\n", CSV_HEADER.join(",")));
        let three = csv_string(&[record(7), record(8), record(9)]).unwrap();
        assert_eq!(three.lines().count(), 4);
    }

    #[test]
    fn sidecar_round_trip() {
        let side = Sidecar {
            config: config(),
            seed: 5,
            seed_generated: false,
            t: 3,
            delta: Some("1/4".into()),
            base_r: "3\n40\n20\n80\n".into(),
            baseline: "315/8".into(),
            design: "n7-t3[7xKT]".into(),
            records: vec![record(7)],
            extra: serde_json::Value::Null,
        };
        let text = serde_json::to_string_pretty(&side).unwrap();
        let parsed = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(parsed, side.config);
        let again = serde_json::to_string(&parsed).unwrap();
        assert_eq!(ExperimentConfig::from_json(&again).unwrap(), parsed);
    }

    #[test]
    fn atomic_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let side = Sidecar {
            config: config(),
            seed: 5,
            seed_generated: true,
            t: 3,
            delta: None,
            base_r: String::new(),
            baseline: String::new(),
            design: String::new(),
            records: vec![],
            extra: serde_json::Value::Null,
        };
        write_report(&path, &[record(7)], &side).unwrap();
        write_report(&path, &[record(7)], &side).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
        assert!(sidecar_path(&path).exists());
        let err = write_atomic(Path::new("/nonexistent-dir/x.csv"), b"x").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn config_checks() {
        let mut c = config();
        assert!(c.check().is_ok());
        c.samples = 0;
        assert!(c.check().is_err());
        let mut c = config();
        c.pattern.kind = "star".into();
        assert!(c.check().is_err());
        let mut c = config();
        c.design.file = Some("/no/such/design.json".into());
        assert!(c.check().is_err());
    }
}
