use serde::{Deserialize, Serialize};

use super::fit::{fit_plane, loglog_fit, PlaneFit};
use super::grid::{FitRange, MomentGrid};
use super::partition::{PartitionTable, ScaleMoments};
use super::surface::Surface;
use crate::error::{Error, Result};

/// Joint scaling exponents `ζ(p,q)`: slopes of `ln S(p,q,j)` against `j ln 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaSurface {
    pub grid: MomentGrid,
    pub zeta: Surface,
    pub r2: Surface,
    pub fit_range: FitRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdScheme {
    #[default]
    Central,
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    Legendre,
    Direct,
}

/// Singularity strengths and multifractal function over the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSurface {
    pub method: SpectrumMethod,
    pub grid: MomentGrid,
    pub h_x: Surface,
    pub h_y: Surface,
    pub d: Surface,
}

fn fit_rows(
    table: &PartitionTable,
    fit_range: FitRange,
) -> Result<(Vec<usize>, Vec<f64>)> {
    fit_range.check_within(table.scales())?;
    let rows: Vec<usize> = fit_range
        .scales()
        .map(|j| table.scale_index(j).expect("checked above"))
        .collect();
    let xs = fit_range
        .scales()
        .map(|j| j as f64 * std::f64::consts::LN_2)
        .collect();
    Ok((rows, xs))
}

/// Slope and r2 of one accumulator over the fit range, or `NaN`s when the
/// cell has masked values or the regression fails.
fn slope_of(
    moments: &[ScaleMoments],
    rows: &[usize],
    xs: &[f64],
    pick: impl Fn(&ScaleMoments) -> f64,
) -> (f64, f64) {
    let ys: Vec<f64> = rows.iter().map(|&i| pick(&moments[i])).collect();
    match loglog_fit(xs, &ys) {
        Ok(f) => (f.slope, f.r2),
        Err(_) => (f64::NAN, f64::NAN),
    }
}

pub fn scaling_exponents(table: &PartitionTable, fit_range: FitRange) -> Result<ZetaSurface> {
    let (rows, xs) = fit_rows(table, fit_range)?;
    let grid = table.grid().clone();
    let (zeta, r2): (Vec<f64>, Vec<f64>) = table
        .cells()
        .iter()
        .map(|c| slope_of(&c.moments, &rows, &xs, |m| m.log_s))
        .unzip();
    Ok(ZetaSurface {
        zeta: Surface::from_data(&grid, zeta),
        r2: Surface::from_data(&grid, r2),
        grid,
        fit_range,
    })
}

/// Derivative of `values` (uniform `step`) at every index.
pub(crate) fn differentiate(values: &[f64], step: f64, scheme: FdScheme) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            if i + 1 == n {
                (values[i] - values[i - 1]) / step
            } else if i == 0 || scheme == FdScheme::Forward {
                (values[i + 1] - values[i]) / step
            } else {
                (values[i + 1] - values[i - 1]) / (2.0 * step)
            }
        })
        .collect()
}

/// `h_x = 2 ∂ζ/∂p`, `h_y = 2 ∂ζ/∂q` by finite differences on the grid and
/// `D = 1 + p h_x / 2 + q h_y / 2 - ζ`.
pub fn legendre_spectrum(z: &ZetaSurface, scheme: FdScheme) -> Result<SpectrumSurface> {
    let grid = &z.grid;
    let (np, nq) = (grid.n_p(), grid.n_q());
    if np < 3 || nq < 3 {
        return Err(Error::Config(format!(
            "finite differences need at least 3 orders per axis, grid is {np}x{nq}"
        )));
    }
    let (dp, dq) = (grid.step_p().unwrap(), grid.step_q().unwrap());
    let mut h_x = Surface::filled(grid, f64::NAN);
    let mut h_y = Surface::filled(grid, f64::NAN);
    for iq in 0..nq {
        let column: Vec<f64> = (0..np).map(|ip| z.zeta.get(ip, iq)).collect();
        for (ip, d) in differentiate(&column, dp, scheme).into_iter().enumerate() {
            h_x.set(ip, iq, 2.0 * d);
        }
    }
    for ip in 0..np {
        let row: Vec<f64> = (0..nq).map(|iq| z.zeta.get(ip, iq)).collect();
        for (iq, d) in differentiate(&row, dq, scheme).into_iter().enumerate() {
            h_y.set(ip, iq, 2.0 * d);
        }
    }
    let mut d = Surface::filled(grid, f64::NAN);
    for (ip, iq, p, q) in grid.cells() {
        let v = 1.0 + p * h_x.get(ip, iq) / 2.0 + q * h_y.get(ip, iq) / 2.0 - z.zeta.get(ip, iq);
        d.set(ip, iq, v);
    }
    Ok(SpectrumSurface {
        method: SpectrumMethod::Legendre,
        grid: grid.clone(),
        h_x,
        h_y,
        d,
    })
}

/// Slopes of `A_x`, `A_y`, `A_μ` against `j ln 2` over the fit range.
pub fn direct_spectrum(table: &PartitionTable, fit_range: FitRange) -> Result<SpectrumSurface> {
    let (rows, xs) = fit_rows(table, fit_range)?;
    let grid = table.grid().clone();
    let mut h_x = Vec::with_capacity(grid.len());
    let mut h_y = Vec::with_capacity(grid.len());
    let mut d = Vec::with_capacity(grid.len());
    for cell in table.cells() {
        h_x.push(slope_of(&cell.moments, &rows, &xs, |m| m.a_x).0);
        h_y.push(slope_of(&cell.moments, &rows, &xs, |m| m.a_y).0);
        d.push(slope_of(&cell.moments, &rows, &xs, |m| m.a_mu).0);
    }
    Ok(SpectrumSurface {
        method: SpectrumMethod::Direct,
        h_x: Surface::from_data(&grid, h_x),
        h_y: Surface::from_data(&grid, h_y),
        d: Surface::from_data(&grid, d),
        grid,
    })
}

/// Least-squares plane through the valid cells of `ζ`. An `r2` near one
/// means `ζ` is linear in the orders, i.e. the cross-correlation is
/// monofractal.
pub fn plane_fit(z: &ZetaSurface) -> Result<PlaneFit> {
    let points: Vec<(f64, f64, f64)> = z
        .grid
        .cells()
        .filter(|&(ip, iq, _, _)| z.zeta.is_valid(ip, iq))
        .map(|(ip, iq, p, q)| (p, q, z.zeta.get(ip, iq)))
        .collect();
    fit_plane(&points)
}
