//! Artifacts of one analysis run: long-format CSV surfaces plus a JSON summary.
//!
//! Numbers are written with the shortest representation that round-trips, so
//! identical inputs give byte-identical files. Masked cells are empty fields
//! in CSV and `null` in JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{FitRange, MomentGrid, PlaneFit, SpectrumSurface};
use crate::error::{Error, Result};
use crate::pipeline::{AnalysisConfig, AnalysisReport};

pub const PARTITION_CSV: &str = "partition.csv";
pub const ZETA_CSV: &str = "zeta.csv";
pub const LEGENDRE_CSV: &str = "spectrum_legendre.csv";
pub const DIRECT_CSV: &str = "spectrum_direct.csv";
pub const DIAGONAL_CSV: &str = "diagonal.csv";
pub const SUMMARY_JSON: &str = "summary.json";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportOptions {
    /// Also write `leaders_{x,y}.csv` and `wavelets_{x,y}.csv`.
    pub dump_pyramids: bool,
}

/// Deterministic text form of a float; empty for NaN.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v == 0.0 || (1e-4..1e15).contains(&v.abs()) || v.is_infinite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

struct CsvOut {
    path: PathBuf,
    w: BufWriter<File>,
}

impl CsvOut {
    fn create(dir: &Path, name: &str, header: &str) -> Result<Self> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = CsvOut {
            path,
            w: BufWriter::new(file),
        };
        out.line(header)?;
        Ok(out)
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.w, "{s}").map_err(|e| Error::io(&self.path, e))
    }

    fn row(&mut self, fields: &[f64]) -> Result<()> {
        let s: Vec<String> = fields.iter().map(|&v| format_number(v)).collect();
        self.line(&s.join(","))
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.w.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.path)
    }
}

fn write_spectrum(dir: &Path, name: &str, s: &SpectrumSurface) -> Result<PathBuf> {
    let mut out = CsvOut::create(dir, name, "p,q,h_x,h_y,D")?;
    for (ip, iq, p, q) in s.grid.cells() {
        out.row(&[p, q, s.h_x.get(ip, iq), s.h_y.get(ip, iq), s.d.get(ip, iq)])?;
    }
    out.finish()
}

fn write_with<F>(dir: &Path, name: &str, f: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[derive(Serialize)]
struct SpectrumMeans {
    h_x: f64,
    h_y: f64,
    d: f64,
}

impl From<&SpectrumSurface> for SpectrumMeans {
    fn from(s: &SpectrumSurface) -> Self {
        SpectrumMeans {
            h_x: s.h_x.mean(),
            h_y: s.h_y.mean(),
            d: s.d.mean(),
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    version: &'static str,
    config: &'a AnalysisConfig,
    length: usize,
    fit_range: FitRange,
    scales: &'a [usize],
    leaders_per_scale: &'a [usize],
    grid: &'a MomentGrid,
    valid_cells: usize,
    plane_fit: Option<PlaneFit>,
    min_r2: Option<f64>,
    legendre_means: SpectrumMeans,
    direct_means: SpectrumMeans,
    zeta: &'a crate::analysis::Surface,
    r2: &'a crate::analysis::Surface,
    legendre: &'a SpectrumSurface,
    direct: &'a SpectrumSurface,
    diagonal: &'a crate::analysis::DiagonalAnalysis,
}

impl<'a> Summary<'a> {
    fn of(report: &'a AnalysisReport) -> Self {
        let (table, z) = (&report.table, &report.zeta);
        Summary {
            version: env!("CARGO_PKG_VERSION"),
            config: &report.config,
            length: report.length,
            fit_range: report.fit_range,
            scales: table.scales(),
            leaders_per_scale: table.counts(),
            grid: table.grid(),
            valid_cells: z.zeta.valid_count(),
            plane_fit: report.plane,
            min_r2: z.r2.min_max().map(|(lo, _)| lo),
            legendre_means: (&report.legendre).into(),
            direct_means: (&report.direct).into(),
            zeta: &z.zeta,
            r2: &z.r2,
            legendre: &report.legendre,
            direct: &report.direct,
            diagonal: &report.diagonal,
        }
    }
}

/// The contents of `summary.json` for `report`.
pub fn summary_json(report: &AnalysisReport) -> String {
    serde_json::to_string_pretty(&Summary::of(report)).expect("summary serializes")
}

/// Write every artifact of `report` into `dir` (created if missing) and
/// return the paths written, in a fixed order.
pub fn write_report(report: &AnalysisReport, dir: &Path, opts: ReportOptions) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let table = &report.table;
    let mut out = CsvOut::create(dir, PARTITION_CSV, "p,q,j,n_j,log_S,A_x,A_y,A_mu")?;
    for cell in table.cells() {
        for (i, m) in cell.moments.iter().enumerate() {
            out.row(&[
                cell.p,
                cell.q,
                table.scales()[i] as f64,
                table.counts()[i] as f64,
                m.log_s,
                m.a_x,
                m.a_y,
                m.a_mu,
            ])?;
        }
    }
    written.push(out.finish()?);

    let z = &report.zeta;
    let mut out = CsvOut::create(dir, ZETA_CSV, "p,q,zeta,r2")?;
    for (ip, iq, p, q) in z.grid.cells() {
        out.row(&[p, q, z.zeta.get(ip, iq), z.r2.get(ip, iq)])?;
    }
    written.push(out.finish()?);

    written.push(write_spectrum(dir, LEGENDRE_CSV, &report.legendre)?);
    written.push(write_spectrum(dir, DIRECT_CSV, &report.direct)?);

    let d = &report.diagonal;
    let mut out = CsvOut::create(
        dir,
        DIAGONAL_CSV,
        "q,zeta,r2,h_legendre,h_direct,D_legendre,D_direct",
    )?;
    for i in 0..d.len() {
        out.row(&[
            d.q[i],
            d.zeta[i],
            d.r2[i],
            d.h_legendre[i],
            d.h_direct[i],
            d.d_legendre[i],
            d.d_direct[i],
        ])?;
    }
    written.push(out.finish()?);

    let summary = Summary::of(report);
    written.push(write_with(dir, SUMMARY_JSON, |w| {
        serde_json::to_writer_pretty(&mut *w, &summary)?;
        writeln!(w)
    })?);

    if opts.dump_pyramids {
        for (tag, dec) in [("x", &report.x), ("y", &report.y)] {
            written.push(write_with(dir, &format!("leaders_{tag}.csv"), |w| {
                dec.leaders.write_csv(w)
            })?);
            written.push(write_with(dir, &format!("wavelets_{tag}.csv"), |w| {
                dec.wavelets.write_csv(w)
            })?);
        }
    }
    Ok(written)
}
