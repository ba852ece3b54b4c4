//! End-to-end checks on the synthetic benchmarks, each with an observed value,
//! a target and a tolerance.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    diagonal_analysis, plane_fit, DiagonalAnalysis, FitRange, Surface, ZetaSurface,
};
use crate::dwt::Normalization;
use crate::error::Result;
use crate::pipeline::{analyze_prepared, decompose, prepare_pair, AnalysisConfig, AnalysisReport};
use crate::signal_io::{Signal, SignalPair};
use crate::synth::{
    analytic_zeta_cross, analytic_zeta_single, bfbm, binomial_measure, pearson_correlation,
    BfbmSpec, CascadeSpec,
};

pub const CASCADE_ITERATIONS: u32 = 16;
pub const CASCADE_PX: f64 = 0.3;
pub const CASCADE_PY: f64 = 0.4;
pub const BFBM_HURST_X: f64 = 0.5;
pub const BFBM_HURST_Y: f64 = 0.8;
pub const BFBM_RHO: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expectation {
    Near { target: f64, tolerance: f64 },
    Between { lo: f64, hi: f64 },
    AtLeast { min: f64 },
    AtMost { max: f64 },
}

impl Expectation {
    pub fn accepts(&self, v: f64) -> bool {
        match *self {
            Expectation::Near { target, tolerance } => (v - target).abs() <= tolerance,
            Expectation::Between { lo, hi } => (lo..=hi).contains(&v),
            Expectation::AtLeast { min } => v >= min,
            Expectation::AtMost { max } => v <= max,
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Expectation::Near { target, tolerance } => write!(f, "{target:.4} ± {tolerance}"),
            Expectation::Between { lo, hi } => write!(f, "in [{lo}, {hi}]"),
            Expectation::AtLeast { min } => write!(f, ">= {min}"),
            Expectation::AtMost { max } => write!(f, "<= {max}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expect: Expectation,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, observed: f64, expect: Expectation) -> Self {
        Check {
            name: name.into(),
            observed,
            passed: expect.accepts(observed),
            expect,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<44} observed {:>10.4}  expected {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            self.expect
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationOptions {
    pub normalization: Normalization,
    pub bfbm_realizations: usize,
    pub bfbm_log2_len: u32,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            normalization: Normalization::L1,
            bfbm_realizations: 10,
            bfbm_log2_len: 16,
            seed: 2012,
        }
    }
}

impl ValidationOptions {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            normalization: self.normalization,
            ..AnalysisConfig::default()
        }
    }
}

/// Orders `lo, lo + step, …, hi`.
pub fn orders(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// The cascade pair and its prepared (integrated) form.
pub struct CascadeExperiment {
    pub x: Signal,
    pub y: Signal,
    pub pair: SignalPair,
    pub config: AnalysisConfig,
}

impl CascadeExperiment {
    pub fn new(p_x: f64, p_y: f64, opts: &ValidationOptions) -> Result<Self> {
        let x = binomial_measure(&CascadeSpec::new(p_x, CASCADE_ITERATIONS)?);
        let y = binomial_measure(&CascadeSpec::new(p_y, CASCADE_ITERATIONS)?);
        let config = opts.config();
        let pair = prepare_pair(&x, &y, &config)?;
        Ok(CascadeExperiment { x, y, pair, config })
    }

    pub fn fit_range(&self) -> Result<FitRange> {
        FitRange::default_for(self.pair.log2_length() as usize)
    }

    pub fn diagonal(&self, q: &[f64]) -> Result<DiagonalAnalysis> {
        let lx = decompose(self.pair.x(), &self.config)?.leaders;
        let ly = decompose(self.pair.y(), &self.config)?.leaders;
        diagonal_analysis(&lx, &ly, q, self.fit_range()?, self.config.fd_scheme)
    }

    pub fn surface(&self) -> Result<AnalysisReport> {
        analyze_prepared(&self.pair, &self.config)
    }
}

/// `max_q |ζ̂(q) - ζ(q)|` on the diagonal.
pub fn diagonal_zeta_error(d: &DiagonalAnalysis, exact: impl Fn(f64) -> f64) -> f64 {
    d.q.iter()
        .zip(&d.zeta)
        .map(|(&q, &z)| (z - exact(q)).abs())
        .fold(0.0, f64::max)
}

pub fn diagonal_h_disagreement(d: &DiagonalAnalysis) -> f64 {
    d.h_legendre
        .iter()
        .zip(&d.h_direct)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Fraction of cells with `|ζ̂ - ζ| <= tolerance`; masked cells count as misses.
pub fn surface_hit_rate(z: &ZetaSurface, exact: impl Fn(f64, f64) -> f64, tolerance: f64) -> f64 {
    let hits = z
        .grid
        .cells()
        .filter(|&(ip, iq, p, q)| (z.zeta.get(ip, iq) - exact(p, q)).abs() <= tolerance)
        .count();
    hits as f64 / z.grid.len() as f64
}

pub fn binomial_checks(opts: &ValidationOptions) -> Result<Vec<Check>> {
    let pair = CascadeExperiment::new(CASCADE_PX, CASCADE_PY, opts)?;
    let cross = |p: f64, q: f64| analytic_zeta_cross(CASCADE_PX, CASCADE_PY, p, q);
    let mut checks = Vec::new();

    let diag = pair.diagonal(&orders(-4.0, 5.0, 1.0))?;
    checks.push(Check::new(
        "binomial diagonal max |zeta - exact|",
        diagonal_zeta_error(&diag, |q| cross(q, q)),
        Expectation::AtMost { max: 0.1 },
    ));

    let surface = pair.surface()?;
    checks.push(Check::new(
        "binomial surface share within 0.15",
        surface_hit_rate(&surface.zeta, cross, 0.15),
        Expectation::AtLeast { min: 0.95 },
    ));
    checks.push(Check::new(
        "binomial surface min r2",
        surface.zeta.r2.min_max().map_or(f64::NAN, |(lo, _)| lo),
        Expectation::AtLeast { min: 0.99 },
    ));

    let single = CascadeExperiment::new(CASCADE_PX, CASCADE_PX, opts)?;
    let d = single.diagonal(&orders(-4.0, 4.0, 0.5))?;
    for q in [1.0, 2.0] {
        let i = d.index_of(q).expect("order on the grid");
        let tolerance = if q == 1.0 { 0.02 } else { 0.05 };
        checks.push(Check::new(
            format!("single measure zeta({q})"),
            d.zeta[i],
            Expectation::Near {
                target: analytic_zeta_single(CASCADE_PX, q),
                tolerance,
            },
        ));
    }

    let d = pair.diagonal(&orders(-4.0, 4.0, 0.5))?;
    checks.push(Check::new(
        "diagonal max |h legendre - h direct|",
        diagonal_h_disagreement(&d),
        Expectation::AtMost { max: 0.05 },
    ));

    checks.push(Check::new(
        "cascade pair correlation",
        pearson_correlation(&pair.x, &pair.y)?,
        Expectation::Near {
            target: 0.82,
            tolerance: 0.02,
        },
    ));
    Ok(checks)
}

/// Averages over bFBM realizations.
pub struct BfbmEnsemble {
    pub zeta: ZetaSurface,
    pub direct_d: Surface,
    pub realizations: usize,
}

pub fn bfbm_ensemble(opts: &ValidationOptions) -> Result<BfbmEnsemble> {
    let cfg = AnalysisConfig {
        profile: false,
        ..opts.config()
    };
    let n = 1usize << opts.bfbm_log2_len;
    let reports = (0..opts.bfbm_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let spec = BfbmSpec::new(BFBM_HURST_X, BFBM_HURST_Y, BFBM_RHO, n, opts.seed + i)?;
            analyze_prepared(&bfbm(&spec)?, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let first = &reports[0].zeta;
    let zeta = ZetaSurface {
        zeta: Surface::average(reports.iter().map(|r| &r.zeta.zeta)).expect("non-empty"),
        r2: Surface::average(reports.iter().map(|r| &r.zeta.r2)).expect("non-empty"),
        grid: first.grid.clone(),
        fit_range: first.fit_range,
    };
    Ok(BfbmEnsemble {
        zeta,
        direct_d: Surface::average(reports.iter().map(|r| &r.direct.d)).expect("non-empty"),
        realizations: reports.len(),
    })
}

pub fn bfbm_checks(opts: &ValidationOptions) -> Result<Vec<Check>> {
    let ens = bfbm_ensemble(opts)?;
    let plane = plane_fit(&ens.zeta)?;
    let legendre = crate::analysis::legendre_spectrum(&ens.zeta, opts.config().fd_scheme)?;
    Ok(vec![
        Check::new("bfbm plane r2", plane.r2, Expectation::AtLeast { min: 0.99 }),
        Check::new("bfbm plane slope a", plane.a, Expectation::Between { lo: 0.19, hi: 0.28 }),
        Check::new("bfbm plane slope b", plane.b, Expectation::Between { lo: 0.34, hi: 0.43 }),
        Check::new(
            "bfbm mean h_x",
            legendre.h_x.mean(),
            Expectation::Between { lo: 0.40, hi: 0.55 },
        ),
        Check::new(
            "bfbm mean h_y",
            legendre.h_y.mean(),
            Expectation::Between { lo: 0.70, hi: 0.85 },
        ),
        Check::new(
            "bfbm mean direct D",
            ens.direct_d.mean(),
            Expectation::Between { lo: 0.85, hi: 1.05 },
        ),
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub options: ValidationOptions,
    pub checks: Vec<Check>,
    #[serde(serialize_with = "as_secs")]
    pub elapsed: Duration,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        write!(
            f,
            "{} of {} checks passed in {:.1} s",
            self.checks.len() - self.failures(),
            self.checks.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    let start = Instant::now();
    let mut checks = binomial_checks(opts)?;
    checks.extend(bfbm_checks(opts)?);
    Ok(ValidationReport {
        options: opts.clone(),
        checks,
        elapsed: start.elapsed(),
    })
}
