//! Synthetic benchmarks with known scaling: binomial cascades and bivariate
//! fractional Brownian motion.

mod analytic;
mod bfbm;
mod cascade;

pub use analytic::{
    analytic_cross_spectrum, analytic_zeta_cross, analytic_zeta_single, CrossSpectrumPoint,
};
pub use bfbm::{
    bfbm, bfgn, bfgn_covariance, bfgn_exact, coherence, embedding_min_eigenvalue, rho_bound,
    BfbmSpec, Bfgn, BfgnMethod, EXACT_MAX_LEN,
};
pub use cascade::{binomial_measure, CascadeSpec};

use crate::error::{Error, Result};
use crate::signal_io::Signal;

/// Product-moment correlation of two equal-length signals.
pub fn pearson_correlation(x: &Signal, y: &Signal) -> Result<f64> {
    let (x, y) = (x.values(), y.values());
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "correlation needs two series of equal length >= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("correlation of a constant series".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: Vec<f64>) -> Signal {
        Signal::raw("s", v).unwrap()
    }

    #[test]
    fn perfect_correlations() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson_correlation(&sig(x.clone()), &sig(x.clone())).unwrap() - 1.0).abs() < 1e-14);
        assert!((pearson_correlation(&sig(x), &sig(neg)).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_constant_and_mismatched() {
        assert!(matches!(
            pearson_correlation(&sig(vec![1.0; 4]), &sig(vec![1.0, 2.0, 3.0, 4.0])),
            Err(Error::Degenerate(_))
        ));
        assert!(pearson_correlation(&sig(vec![1.0, 2.0]), &sig(vec![1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn binomial_pair_correlation() {
        let x = binomial_measure(&CascadeSpec::new(0.3, 16).unwrap());
        let y = binomial_measure(&CascadeSpec::new(0.4, 16).unwrap());
        let r = pearson_correlation(&x, &y).unwrap();
        assert!((r - 0.82).abs() <= 0.02, "{r}");
    }
}
