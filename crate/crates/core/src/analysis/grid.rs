use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SPACING_TOLERANCE: f64 = 1e-9;

/// Moment orders `p` (for `x`) and `q` (for `y`), each ascending and
/// uniformly spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentGrid {
    p_values: Vec<f64>,
    q_values: Vec<f64>,
}

fn axis(lo: f64, hi: f64, step: f64, name: &str) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(Error::Config(format!("{name} range must be finite")));
    }
    if step <= 0.0 {
        return Err(Error::Config(format!("{name} step must be positive")));
    }
    if hi < lo {
        return Err(Error::Config(format!("{name} range {lo}:{hi} is reversed")));
    }
    let span = (hi - lo) / step;
    let count = span.round();
    if (span - count).abs() > 1e-6 {
        return Err(Error::Config(format!(
            "{name} range {lo}:{hi} is not a whole number of {step} steps"
        )));
    }
    Ok((0..=count as usize).map(|i| lo + i as f64 * step).collect())
}

fn check_axis(values: &[f64], name: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("{name} axis is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!("{name} axis has non-finite orders")));
    }
    if values.len() < 2 {
        return Ok(());
    }
    let step = values[1] - values[0];
    if step <= 0.0 {
        return Err(Error::Config(format!("{name} orders must be strictly ascending")));
    }
    for w in values.windows(2) {
        if ((w[1] - w[0]) - step).abs() > SPACING_TOLERANCE * step.abs().max(1.0) {
            return Err(Error::Config(format!("{name} orders are not uniformly spaced")));
        }
    }
    Ok(())
}

impl MomentGrid {
    pub fn new(p_values: Vec<f64>, q_values: Vec<f64>) -> Result<Self> {
        check_axis(&p_values, "p")?;
        check_axis(&q_values, "q")?;
        Ok(MomentGrid { p_values, q_values })
    }

    /// Orders `lo, lo + step, ..., hi` on each axis.
    pub fn uniform(p_range: (f64, f64), q_range: (f64, f64), step: f64) -> Result<Self> {
        MomentGrid::new(
            axis(p_range.0, p_range.1, step, "p")?,
            axis(q_range.0, q_range.1, step, "q")?,
        )
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    pub fn q_values(&self) -> &[f64] {
        &self.q_values
    }

    pub fn n_p(&self) -> usize {
        self.p_values.len()
    }

    pub fn n_q(&self) -> usize {
        self.q_values.len()
    }

    pub fn len(&self) -> usize {
        self.n_p() * self.n_q()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step_p(&self) -> Option<f64> {
        (self.n_p() > 1).then(|| self.p_values[1] - self.p_values[0])
    }

    pub fn step_q(&self) -> Option<f64> {
        (self.n_q() > 1).then(|| self.q_values[1] - self.q_values[0])
    }

    pub fn has_negative_p(&self) -> bool {
        self.p_values.iter().any(|&p| p < 0.0)
    }

    pub fn has_negative_q(&self) -> bool {
        self.q_values.iter().any(|&q| q < 0.0)
    }

    /// Row-major `(ip, iq, p, q)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        self.p_values.iter().enumerate().flat_map(move |(ip, &p)| {
            self.q_values
                .iter()
                .enumerate()
                .map(move |(iq, &q)| (ip, iq, p, q))
        })
    }
}

impl Default for MomentGrid {
    /// `p, q` in `[-4, 4]` with step `0.5`.
    fn default() -> Self {
        MomentGrid::uniform((-4.0, 4.0), (-4.0, 4.0), 0.5).expect("valid default grid")
    }
}

/// Inclusive range of scales `j_lo..=j_hi` used for regressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitRange {
    pub lo: usize,
    pub hi: usize,
}

impl FitRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 {
            return Err(Error::Config("fit range starts at j = 1".into()));
        }
        if hi < lo + 2 {
            return Err(Error::Config(format!(
                "fit range {lo}:{hi} needs at least three scales"
            )));
        }
        Ok(FitRange { lo, hi })
    }

    /// `3..=J-3` for a signal of length `2^J`.
    pub fn default_for(log2_len: usize) -> Result<Self> {
        FitRange::new(3, log2_len.saturating_sub(3))
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Fails with the standard message when the range is not covered.
    pub fn check_within(&self, available: &[usize]) -> Result<()> {
        if self.scales().all(|j| available.contains(&j)) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "fit range exceeds available scales: {}:{} requested, {} available",
                self.lo,
                self.hi,
                match (available.first(), available.last()) {
                    (Some(a), Some(b)) => format!("{a}:{b}"),
                    _ => "none".into(),
                }
            )))
        }
    }
}

impl std::fmt::Display for FitRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}
