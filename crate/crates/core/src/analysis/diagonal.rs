use serde::Serialize;

use super::grid::{FitRange, MomentGrid};
use super::partition::{check_pair, scale_moments};
use super::spectrum::{differentiate, FdScheme};
use crate::analysis::fit::loglog_fit;
use crate::error::{Error, Result};
use crate::leaders::LeaderPyramid;

/// Joint analysis restricted to `p = q`.
///
/// `h_xy = (h_x + h_y) / 2` is obtained twice: as the derivative of `ζ(q)`
/// and directly as the slope of `Σ_k μ ln (L_x L_y)^{1/2}`. Likewise `D`
/// comes from `1 + q h_xy - ζ` and from the slope of `Σ_k μ ln μ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalAnalysis {
    pub q: Vec<f64>,
    pub zeta: Vec<f64>,
    pub r2: Vec<f64>,
    pub h_legendre: Vec<f64>,
    pub h_direct: Vec<f64>,
    pub d_legendre: Vec<f64>,
    pub d_direct: Vec<f64>,
    pub fit_range: FitRange,
}

impl DiagonalAnalysis {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn index_of(&self, q: f64) -> Option<usize> {
        self.q.iter().position(|&v| (v - q).abs() < 1e-9)
    }
}

pub fn diagonal_analysis(
    lx: &LeaderPyramid,
    ly: &LeaderPyramid,
    q_values: &[f64],
    fit_range: FitRange,
    scheme: FdScheme,
) -> Result<DiagonalAnalysis> {
    // Reuse the grid validation for ascending, uniform orders.
    let axis = MomentGrid::new(q_values.to_vec(), vec![0.0])?;
    if q_values.len() < 3 {
        return Err(Error::Config(
            "diagonal analysis needs at least 3 orders".into(),
        ));
    }
    let step = axis.step_p().expect("at least 3 orders");
    let scales: Vec<usize> = fit_range.scales().collect();
    let available: Vec<usize> = lx.scales().filter(|j| ly.scale(*j).is_some()).collect();
    fit_range.check_within(&available)?;
    check_pair(lx, ly, &scales, axis.has_negative_p(), axis.has_negative_p())?;

    let xs: Vec<f64> = scales
        .iter()
        .map(|&j| j as f64 * std::f64::consts::LN_2)
        .collect();
    let n = q_values.len();
    let mut out = DiagonalAnalysis {
        q: q_values.to_vec(),
        zeta: Vec::with_capacity(n),
        r2: Vec::with_capacity(n),
        h_legendre: Vec::new(),
        h_direct: Vec::with_capacity(n),
        d_legendre: Vec::with_capacity(n),
        d_direct: Vec::with_capacity(n),
        fit_range,
    };
    for &q in q_values {
        let moments = scales
            .iter()
            .map(|&j| scale_moments(lx.scale(j).unwrap(), ly.scale(j).unwrap(), q, q))
            .collect::<Result<Vec<_>>>()?;
        let fit = |ys: Vec<f64>| loglog_fit(&xs, &ys).map(|f| (f.slope, f.r2)).unwrap_or((f64::NAN, f64::NAN));
        let (zeta, r2) = fit(moments.iter().map(|m| m.log_s).collect());
        out.zeta.push(zeta);
        out.r2.push(r2);
        out.h_direct.push(fit(moments.iter().map(|m| m.a_xy()).collect()).0);
        out.d_direct.push(fit(moments.iter().map(|m| m.a_mu).collect()).0);
    }
    out.h_legendre = differentiate(&out.zeta, step, scheme);
    out.d_legendre = q_values
        .iter()
        .zip(&out.h_legendre)
        .zip(&out.zeta)
        .map(|((q, h), z)| 1.0 + q * h - z)
        .collect();
    Ok(out)
}
