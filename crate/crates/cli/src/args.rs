use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use mfxwl::analysis::{FdScheme, FitRange};
use mfxwl::dwt::Normalization;
use mfxwl::leaders::BoundaryPolicy;
use mfxwl::pipeline::{AnalysisConfig, Transform};
use mfxwl::signal_io::{AlignPolicy, ColumnSelector};
use mfxwl::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "mfxwl", version, about = "Joint multifractal analysis with wavelet leaders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a pair of series and write surfaces, spectra and a manifest.
    Analyze(Box<AnalyzeArgs>),
    /// Generate synthetic benchmark series.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Run the benchmark experiments and print a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Input file for x.
    #[arg(required_unless_present = "manifest")]
    pub x: Option<PathBuf>,
    /// Input file for y.
    #[arg(required_unless_present = "manifest")]
    pub y: Option<PathBuf>,
    /// Repeat the run recorded in a manifest.json.
    #[arg(long, conflicts_with_all = ["x", "y", "config"])]
    pub manifest: Option<PathBuf>,
    /// JSON analysis configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "mfxwl-out")]
    pub out: PathBuf,

    /// Column of both inputs, as zero-based index or header name.
    #[arg(long)]
    pub column: Option<ColumnSelector>,
    #[arg(long)]
    pub x_column: Option<ColumnSelector>,
    #[arg(long)]
    pub y_column: Option<ColumnSelector>,
    /// Inputs start with a header row.
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// Range of p as lo:hi.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub p_range: Option<(f64, f64)>,
    /// Range of q as lo:hi.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub q_range: Option<(f64, f64)>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Regression scales as j_lo:j_hi.
    #[arg(long, value_parser = parse_fit_range)]
    pub fit_range: Option<FitRange>,
    /// periodic, clamp or discard.
    #[arg(long, value_parser = parse_enum::<BoundaryPolicy>)]
    pub boundary: Option<BoundaryPolicy>,
    /// central or forward.
    #[arg(long, value_parser = parse_enum::<FdScheme>)]
    pub fd_scheme: Option<FdScheme>,
    /// Floor leaders at this value.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// none, returns or volatility.
    #[arg(long, value_parser = parse_enum::<Transform>)]
    pub transform: Option<Transform>,
    /// on or off: analyze the running sum of each series.
    #[arg(long, value_parser = parse_switch)]
    pub profile: Option<bool>,
    /// truncate_head or truncate_tail.
    #[arg(long, value_parser = parse_enum::<AlignPolicy>)]
    pub align: Option<AlignPolicy>,
    #[arg(long)]
    pub min_leaders: Option<usize>,
    /// Also write wavelet and leader pyramids.
    #[arg(long)]
    pub dump_pyramids: bool,
}

impl AnalyzeArgs {
    pub fn apply(&self, mut cfg: AnalysisConfig) -> AnalysisConfig {
        if let Some(v) = self.p_range {
            cfg.p_range = v;
        }
        if let Some(v) = self.q_range {
            cfg.q_range = v;
        }
        if let Some(v) = self.step {
            cfg.step = v;
        }
        if self.fit_range.is_some() {
            cfg.fit_range = self.fit_range;
        }
        if let Some(v) = self.boundary {
            cfg.boundary = v;
        }
        if let Some(v) = self.fd_scheme {
            cfg.fd_scheme = v;
        }
        if self.epsilon.is_some() {
            cfg.epsilon = self.epsilon;
        }
        if let Some(v) = self.transform {
            cfg.transform = v;
        }
        if let Some(v) = self.profile {
            cfg.profile = v;
        }
        if let Some(v) = self.align {
            cfg.align = v;
        }
        if let Some(v) = self.min_leaders {
            cfg.min_leaders = v;
        }
        cfg
    }
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Deterministic binomial cascade; a second weight adds a y column.
    Cascade {
        #[arg(long, alias = "p")]
        p_x: f64,
        #[arg(long)]
        p_y: Option<f64>,
        #[arg(long)]
        iterations: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bivariate fractional Brownian motion paths.
    Bfbm {
        #[arg(long)]
        hurst_x: f64,
        #[arg(long)]
        hurst_y: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        /// Length, a power of two.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the noise instead of its running sum.
        #[arg(long)]
        increments: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 10)]
    pub realizations: usize,
    /// Base seed of the bFBM realizations.
    #[arg(long, default_value_t = mfxwl::validate::ValidationOptions::default().seed)]
    pub seed: u64,
    /// Write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Coefficient normalization; l2 is a negative control.
    #[arg(long, value_parser = parse_enum::<Normalization>, hide = true)]
    pub normalization: Option<Normalization>,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((num(lo)?, num(hi)?))
}

fn parse_fit_range(s: &str) -> std::result::Result<FitRange, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected j_lo:j_hi, got {s:?}"))?;
    let num = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok(FitRange {
        lo: num(lo)?,
        hi: num(hi)?,
    })
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.trim().to_ascii_lowercase().replace('-', "_")))
        .map_err(|e| e.to_string())
}

fn parse_switch(s: &str) -> std::result::Result<bool, String> {
    match s {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        other => Err(format!("expected on or off, got {other:?}")),
    }
}

pub fn load_config(path: &std::path::Path) -> Result<AnalysisConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
