//! Joint partition function over a moment grid.
//!
//! For each `(p, q)` and scale `j`, with `w_k = (p/2) ln L_x(j,k) + (q/2) ln L_y(j,k)`:
//!
//! ```text
//! S(p,q,j)   = (1/n_j) Σ_k exp(w_k)
//! μ(p,q,j,k) = exp(w_k) / Σ_k exp(w_k)
//! A_x        = Σ_k μ ln L_x      A_y = Σ_k μ ln L_y      A_μ = Σ_k μ ln μ
//! ```
//!
//! Sums are shifted by `max_k w_k` so large `|p|`, `|q|` cannot overflow, and
//! run in ascending `k` so results do not depend on thread scheduling.

use rayon::prelude::*;

use super::grid::MomentGrid;
use crate::error::{Error, Result};
use crate::leaders::LeaderPyramid;

const MU_SUM_TOLERANCE: f64 = 1e-10;

/// Moments of one `(p, q)` cell at one scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleMoments {
    /// `ln S(p,q,j)`.
    pub log_s: f64,
    pub a_x: f64,
    pub a_y: f64,
    pub a_mu: f64,
}

impl ScaleMoments {
    const MASKED: ScaleMoments = ScaleMoments {
        log_s: f64::NAN,
        a_x: f64::NAN,
        a_y: f64::NAN,
        a_mu: f64::NAN,
    };

    /// `Σ_k μ ln (L_x L_y)^{1/2}`.
    pub fn a_xy(&self) -> f64 {
        0.5 * (self.a_x + self.a_y)
    }
}

fn log_power(leader: f64, half_order: f64) -> f64 {
    // 0^0 = 1 even for a zero leader
    if half_order == 0.0 {
        0.0
    } else {
        half_order * leader.ln()
    }
}

/// `w_k`, their maximum and `ln Σ_k exp(w_k - max)`; `None` when every
/// weight is zero.
fn log_weights(lx: &[f64], ly: &[f64], p: f64, q: f64) -> Option<(Vec<f64>, f64, f64)> {
    debug_assert_eq!(lx.len(), ly.len());
    let (hp, hq) = (p / 2.0, q / 2.0);
    let w: Vec<f64> = lx
        .iter()
        .zip(ly)
        .map(|(&a, &b)| log_power(a, hp) + log_power(b, hq))
        .collect();
    let shift = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return None;
    }
    let total: f64 = w.iter().map(|&v| (v - shift).exp()).sum();
    Some((w, shift, total.ln()))
}

/// `μ(p,q,j,k)` for one scale, or `None` when every term vanishes.
pub fn moment_weights(lx: &[f64], ly: &[f64], p: f64, q: f64) -> Option<Vec<f64>> {
    let (w, shift, log_total) = log_weights(lx, ly, p, q)?;
    Some(w.iter().map(|&v| (v - shift - log_total).exp()).collect())
}

/// Moments of a single scale. Zero leaders raised to a positive order
/// contribute nothing; callers reject negative orders on zero leaders before
/// getting here.
pub fn scale_moments(lx: &[f64], ly: &[f64], p: f64, q: f64) -> Result<ScaleMoments> {
    let Some((w, shift, log_total)) = log_weights(lx, ly, p, q) else {
        return Ok(ScaleMoments::MASKED);
    };
    let (mut a_x, mut a_y, mut a_mu, mut mu_sum) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..w.len() {
        let log_mu = w[k] - shift - log_total;
        let mu = log_mu.exp();
        if mu == 0.0 {
            continue;
        }
        mu_sum += mu;
        a_x += mu * lx[k].ln();
        a_y += mu * ly[k].ln();
        a_mu += mu * log_mu;
    }
    if (mu_sum - 1.0).abs() > MU_SUM_TOLERANCE {
        return Err(Error::Numerical(format!(
            "moment weights sum to {mu_sum} instead of 1 (p = {p}, q = {q})"
        )));
    }
    Ok(ScaleMoments {
        log_s: shift + log_total - (w.len() as f64).ln(),
        a_x,
        a_y,
        a_mu,
    })
}

/// Per-scale moments of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCell {
    pub p: f64,
    pub q: f64,
    /// Indexed like [`PartitionTable::scales`].
    pub moments: Vec<ScaleMoments>,
}

impl PartitionCell {
    pub fn log_s(&self) -> impl Iterator<Item = f64> + '_ {
        self.moments.iter().map(|m| m.log_s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTable {
    grid: MomentGrid,
    scales: Vec<usize>,
    counts: Vec<usize>,
    cells: Vec<PartitionCell>,
}

impl PartitionTable {
    pub fn grid(&self) -> &MomentGrid {
        &self.grid
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    /// `n_j` for each entry of [`scales`](Self::scales).
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn cell(&self, ip: usize, iq: usize) -> &PartitionCell {
        &self.cells[ip * self.grid.n_q() + iq]
    }

    pub fn cells(&self) -> &[PartitionCell] {
        &self.cells
    }

    pub fn scale_index(&self, j: usize) -> Option<usize> {
        self.scales.iter().position(|&s| s == j)
    }

    /// `S(p,q,j)` itself; may overflow to infinity where `ln S` does not.
    pub fn s(&self, ip: usize, iq: usize, j: usize) -> Option<f64> {
        let i = self.scale_index(j)?;
        Some(self.cell(ip, iq).moments[i].log_s.exp())
    }
}

/// Scales present in both pyramids, ascending.
pub fn common_scales(lx: &LeaderPyramid, ly: &LeaderPyramid) -> Vec<usize> {
    lx.scales().filter(|j| ly.scale(*j).is_some()).collect()
}

pub(crate) fn check_pair(
    lx: &LeaderPyramid,
    ly: &LeaderPyramid,
    scales: &[usize],
    negative_p: bool,
    negative_q: bool,
) -> Result<()> {
    if lx.signal_len() != ly.signal_len() {
        return Err(Error::InvalidInput(format!(
            "leader pyramids come from signals of different lengths ({} and {})",
            lx.signal_len(),
            ly.signal_len()
        )));
    }
    if scales.is_empty() {
        return Err(Error::Config("empty scale range".into()));
    }
    for &j in scales {
        let (a, b) = match (lx.scale(j), ly.scale(j)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Config(format!(
                    "scale {j} is not available in both leader pyramids"
                )))
            }
        };
        if a.len() != b.len() {
            return Err(Error::InvalidInput(format!(
                "scale {j} has {} leaders for x and {} for y",
                a.len(),
                b.len()
            )));
        }
        for (name, leaders, negative) in [("x", a, negative_p), ("y", b, negative_q)] {
            if negative {
                if let Some(k) = leaders.iter().position(|&v| v == 0.0) {
                    return Err(Error::Degenerate(format!(
                        "zero leader of {name} at scale {j}, position {k} with a negative \
                         moment order; pass an epsilon floor to regularize"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Partition function and direct-method accumulators for every grid cell at
/// each of `scales`.
pub fn partition_table(
    lx: &LeaderPyramid,
    ly: &LeaderPyramid,
    grid: &MomentGrid,
    scales: &[usize],
) -> Result<PartitionTable> {
    check_pair(lx, ly, scales, grid.has_negative_p(), grid.has_negative_q())?;
    let levels: Vec<(&[f64], &[f64])> = scales
        .iter()
        .map(|&j| (lx.scale(j).unwrap(), ly.scale(j).unwrap()))
        .collect();
    let coords: Vec<(f64, f64)> = grid.cells().map(|(_, _, p, q)| (p, q)).collect();
    let cells = coords
        .par_iter()
        .map(|&(p, q)| {
            let moments = levels
                .iter()
                .map(|(a, b)| scale_moments(a, b, p, q))
                .collect::<Result<Vec<_>>>()?;
            Ok(PartitionCell { p, q, moments })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PartitionTable {
        grid: grid.clone(),
        scales: scales.to_vec(),
        counts: levels.iter().map(|(a, _)| a.len()).collect(),
        cells,
    })
}
