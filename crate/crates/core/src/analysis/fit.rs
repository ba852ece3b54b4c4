use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Coefficient of determination, taken as 1 when the residuals vanish
/// (this covers data that is exactly constant).
fn r_squared(ss_res: f64, ss_tot: f64) -> f64 {
    if ss_res == 0.0 {
        1.0
    } else if ss_tot == 0.0 {
        0.0
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidInput(format!(
            "fit needs matching lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidInput("fit needs at least three points".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("fit input is not finite".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0).powi(2) {
        return Err(Error::Numerical("fit abscissae have zero variance".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    Ok(LinearFit {
        slope,
        intercept,
        r2: r_squared(ss_res, syy),
    })
}

/// Least-squares plane `z = a p + b q + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub r2: f64,
    pub cells: usize,
}

pub(crate) fn fit_plane(points: &[(f64, f64, f64)]) -> Result<PlaneFit> {
    if points.len() < 6 {
        return Err(Error::InvalidInput(format!(
            "plane fit needs at least six valid cells, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let (mp, mq, mz) = points.iter().fold((0.0, 0.0, 0.0), |acc, &(p, q, z)| {
        (acc.0 + p / n, acc.1 + q / n, acc.2 + z / n)
    });
    let (mut spp, mut sqq, mut spq, mut spz, mut sqz, mut szz) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &(p, q, z) in points {
        let (dp, dq, dz) = (p - mp, q - mq, z - mz);
        spp += dp * dp;
        sqq += dq * dq;
        spq += dp * dq;
        spz += dp * dz;
        sqz += dq * dz;
        szz += dz * dz;
    }
    let det = spp * sqq - spq * spq;
    if det.abs() <= 1e-12 * (spp * sqq).max(f64::MIN_POSITIVE) {
        return Err(Error::Numerical("plane fit over a degenerate grid".into()));
    }
    let a = (spz * sqq - sqz * spq) / det;
    let b = (sqz * spp - spz * spq) / det;
    let c = mz - a * mp - b * mq;
    let ss_res: f64 = points
        .iter()
        .map(|&(p, q, z)| {
            let e = z - (a * p + b * q + c);
            e * e
        })
        .sum();
    Ok(PlaneFit {
        a,
        b,
        c,
        r2: r_squared(ss_res, szz),
        cells: points.len(),
    })
}
