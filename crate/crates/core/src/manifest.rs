//! Run manifests: the configuration plus content hashes of every input, enough
//! to repeat an analysis exactly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pipeline::{analyze_pair, AnalysisConfig, AnalysisReport};
use crate::report::{write_report, ReportOptions};
use crate::signal_io::{load_series, ColumnSelector, CsvOptions};

pub const MANIFEST_JSON: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: PathBuf,
    pub column: ColumnSelector,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: AnalysisConfig,
    pub csv: CsvOptions,
    pub x: InputRecord,
    pub y: InputRecord,
    /// File names written next to the manifest.
    pub outputs: Vec<String>,
    #[serde(default)]
    pub dump_pyramids: bool,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// One input column of an analysis run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSpec {
    pub path: PathBuf,
    pub column: ColumnSelector,
}

impl InputSpec {
    pub fn new(path: impl Into<PathBuf>, column: ColumnSelector) -> Self {
        InputSpec {
            path: path.into(),
            column,
        }
    }

    fn record(&self) -> Result<InputRecord> {
        let path = std::fs::canonicalize(&self.path).map_err(|e| Error::io(&self.path, e))?;
        Ok(InputRecord {
            sha256: sha256_file(&path)?,
            path,
            column: self.column.clone(),
        })
    }
}

/// Load both inputs, analyze, and write all artifacts plus `manifest.json`.
pub fn run_analysis(
    x: &InputSpec,
    y: &InputSpec,
    csv: &CsvOptions,
    cfg: &AnalysisConfig,
    out_dir: &Path,
    opts: ReportOptions,
) -> Result<(AnalysisReport, RunManifest)> {
    cfg.validate()?;
    let (rx, ry) = (x.record()?, y.record()?);
    let sx = load_series(&rx.path, &x.column, csv)?;
    let sy = load_series(&ry.path, &y.column, csv)?;
    let report = analyze_pair(&sx, &sy, cfg)?;
    let written = write_report(&report, out_dir, opts)?;
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        csv: csv.clone(),
        x: rx,
        y: ry,
        outputs: written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        dump_pyramids: opts.dump_pyramids,
    };
    manifest.write(&out_dir.join(MANIFEST_JSON))?;
    Ok((report, manifest))
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: format!("not a run manifest: {e}"),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Fails if an input no longer matches its recorded hash.
    pub fn verify_inputs(&self) -> Result<()> {
        for rec in [&self.x, &self.y] {
            let actual = sha256_file(&rec.path)?;
            if actual != rec.sha256 {
                return Err(Error::Format {
                    path: rec.path.clone(),
                    message: format!(
                        "content hash {actual} does not match the manifest ({})",
                        rec.sha256
                    ),
                });
            }
        }
        Ok(())
    }

    /// Repeat the recorded run into `out_dir`.
    pub fn rerun(&self, out_dir: &Path) -> Result<(AnalysisReport, RunManifest)> {
        self.verify_inputs()?;
        run_analysis(
            &InputSpec::new(&self.x.path, self.x.column.clone()),
            &InputSpec::new(&self.y.path, self.y.column.clone()),
            &self.csv,
            &self.config,
            out_dir,
            ReportOptions {
                dump_pyramids: self.dump_pyramids,
            },
        )
    }
}
