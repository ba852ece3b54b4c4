//! End-to-end analysis of a signal pair under one [`AnalysisConfig`].

use serde::{Deserialize, Serialize};

use crate::analysis::{
    common_scales, diagonal_analysis, direct_spectrum, legendre_spectrum, partition_table,
    plane_fit, scaling_exponents, DiagonalAnalysis, FdScheme, FitRange, MomentGrid,
    PartitionTable, PlaneFit, SpectrumSurface, ZetaSurface,
};
use crate::dwt::{haar_pyramid_with, Normalization, WaveletPyramid};
use crate::error::{Error, Result};
use crate::leaders::{wavelet_leaders, BoundaryPolicy, LeaderOptions, LeaderPyramid};
use crate::signal_io::{
    align_pair, cumulative_sum, log_returns, volatility, AlignPolicy, Signal, SignalPair,
};

/// Preprocessing applied to each loaded column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    None,
    /// Log returns of a price series.
    Returns,
    /// Absolute log returns of a price series.
    Volatility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub p_range: (f64, f64),
    pub q_range: (f64, f64),
    pub step: f64,
    /// Regression scales; `3..=J-3` when unset.
    pub fit_range: Option<FitRange>,
    pub boundary: BoundaryPolicy,
    pub fd_scheme: FdScheme,
    /// Leader floor `L <- max(L, epsilon)`.
    pub epsilon: Option<f64>,
    pub transform: Transform,
    /// Analyze the running sum of each (transformed) series.
    pub profile: bool,
    pub align: AlignPolicy,
    pub min_leaders: usize,
    /// Coefficient normalization. Anything but `l1` is a diagnostic setting
    /// and biases every exponent.
    pub normalization: Normalization,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            p_range: (-4.0, 4.0),
            q_range: (-4.0, 4.0),
            step: 0.5,
            fit_range: None,
            boundary: BoundaryPolicy::default(),
            fd_scheme: FdScheme::default(),
            epsilon: None,
            transform: Transform::default(),
            profile: true,
            align: AlignPolicy::default(),
            min_leaders: LeaderOptions::default().min_leaders,
            normalization: Normalization::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if let Some(fr) = self.fit_range {
            FitRange::new(fr.lo, fr.hi)?;
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::Config(format!("epsilon must be positive, got {eps}")));
            }
        }
        if self.min_leaders == 0 {
            return Err(Error::Config("min_leaders must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<MomentGrid> {
        MomentGrid::uniform(self.p_range, self.q_range, self.step)
    }

    /// Orders used for the `p = q` analysis.
    pub fn diagonal_orders(&self) -> Result<Vec<f64>> {
        Ok(self.grid()?.q_values().to_vec())
    }

    pub fn leader_options(&self) -> LeaderOptions {
        LeaderOptions {
            boundary: self.boundary,
            min_leaders: self.min_leaders,
            ..LeaderOptions::default()
        }
    }
}

fn apply_transform(s: &Signal, t: Transform) -> Result<Signal> {
    match t {
        Transform::None => Ok(s.clone()),
        Transform::Returns => log_returns(s),
        Transform::Volatility => volatility(&log_returns(s)?),
    }
}

/// Transform, align and optionally integrate two raw series.
pub fn prepare_pair(x: &Signal, y: &Signal, cfg: &AnalysisConfig) -> Result<SignalPair> {
    let x = apply_transform(x, cfg.transform)?;
    let y = apply_transform(y, cfg.transform)?;
    let pair = align_pair(&x, &y, cfg.align)?;
    if !cfg.profile {
        return Ok(pair);
    }
    let (x, y) = pair.into_parts();
    SignalPair::new(cumulative_sum(&x), cumulative_sum(&y))
}

/// Wavelet and leader pyramids of one prepared signal.
#[derive(Debug, Clone)]
pub struct SignalDecomposition {
    pub wavelets: WaveletPyramid,
    pub leaders: LeaderPyramid,
}

pub fn decompose(signal: &Signal, cfg: &AnalysisConfig) -> Result<SignalDecomposition> {
    let wavelets = haar_pyramid_with(signal, cfg.normalization)?;
    let mut leaders = wavelet_leaders(&wavelets, &cfg.leader_options())?;
    if let Some(eps) = cfg.epsilon {
        leaders = leaders.floored(eps);
    }
    Ok(SignalDecomposition { wavelets, leaders })
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub config: AnalysisConfig,
    pub length: usize,
    pub fit_range: FitRange,
    pub x: SignalDecomposition,
    pub y: SignalDecomposition,
    pub table: PartitionTable,
    pub zeta: ZetaSurface,
    pub legendre: SpectrumSurface,
    pub direct: SpectrumSurface,
    pub diagonal: DiagonalAnalysis,
    /// `None` when fewer than six cells are valid.
    pub plane: Option<PlaneFit>,
}

/// Analyze an already prepared pair (no transform, alignment or profile).
pub fn analyze_prepared(pair: &SignalPair, cfg: &AnalysisConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let x = decompose(pair.x(), cfg)?;
    let y = decompose(pair.y(), cfg)?;
    let fit_range = match cfg.fit_range {
        Some(fr) => fr,
        None => FitRange::default_for(pair.log2_length() as usize)?,
    };
    let scales = common_scales(&x.leaders, &y.leaders);
    fit_range.check_within(&scales)?;
    let table = partition_table(&x.leaders, &y.leaders, &grid, &scales)?;
    let zeta = scaling_exponents(&table, fit_range)?;
    let legendre = legendre_spectrum(&zeta, cfg.fd_scheme)?;
    let direct = direct_spectrum(&table, fit_range)?;
    let diagonal = diagonal_analysis(
        &x.leaders,
        &y.leaders,
        &cfg.diagonal_orders()?,
        fit_range,
        cfg.fd_scheme,
    )?;
    let plane = plane_fit(&zeta).ok();
    Ok(AnalysisReport {
        config: cfg.clone(),
        length: pair.length(),
        fit_range,
        x,
        y,
        table,
        zeta,
        legendre,
        direct,
        diagonal,
        plane,
    })
}

pub fn analyze_pair(x: &Signal, y: &Signal, cfg: &AnalysisConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let pair = prepare_pair(x, y, cfg)?;
    analyze_prepared(&pair, cfg)
}
