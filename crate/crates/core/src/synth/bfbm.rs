//! Time-reversible bivariate fractional Brownian motion.
//!
//! The increments form a bivariate fractional Gaussian noise with
//! `γ_ii(h) = ½(|h-1|^{2H_i} - 2|h|^{2H_i} + |h+1|^{2H_i})` and
//! `γ_12(h) = (ρ/2)(|h-1|^{H_1+H_2} - 2|h|^{H_1+H_2} + |h+1|^{H_1+H_2})`.
//! Samples are drawn by circulant embedding; when the embedding is not
//! nonnegative definite, short series fall back to an exact sequential
//! factorization.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_io::{check_dyadic, Signal, SignalKind, SignalPair};

/// Longest series handled by the exact fallback.
pub const EXACT_MAX_LEN: usize = 1 << 12;
const EMBEDDING_RETRIES: u32 = 4;
const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BfbmSpec {
    pub hurst_x: f64,
    pub hurst_y: f64,
    pub rho: f64,
    pub n: usize,
    pub seed: u64,
}

impl BfbmSpec {
    pub fn new(hurst_x: f64, hurst_y: f64, rho: f64, n: usize, seed: u64) -> Result<Self> {
        for (name, h) in [("hurst_x", hurst_x), ("hurst_y", hurst_y)] {
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {h}")));
            }
        }
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::Config(format!("rho must lie in (-1, 1), got {rho}")));
        }
        check_dyadic(n)?;
        let bound = rho_bound(hurst_x, hurst_y);
        if rho.abs() > bound {
            return Err(Error::Config(format!(
                "inadmissible bFBM parameters: |rho| = {} exceeds the coherence bound {bound:.4} \
                 for hurst_x = {hurst_x}, hurst_y = {hurst_y}",
                rho.abs()
            )));
        }
        Ok(BfbmSpec {
            hurst_x,
            hurst_y,
            rho,
            n,
            seed,
        })
    }

    /// Squared spectral coherence implied by the parameters; at most one for
    /// a valid process.
    pub fn coherence(&self) -> f64 {
        coherence(self.hurst_x, self.hurst_y, self.rho)
    }
}

pub fn coherence(hurst_x: f64, hurst_y: f64, rho: f64) -> f64 {
    let hs = hurst_x + hurst_y;
    let num = libm::tgamma(hs + 1.0).powi(2) * (PI * hs / 2.0).sin().powi(2);
    let den = libm::tgamma(2.0 * hurst_x + 1.0)
        * libm::tgamma(2.0 * hurst_y + 1.0)
        * (PI * hurst_x).sin()
        * (PI * hurst_y).sin();
    rho * rho * num / den
}

/// Largest admissible `|ρ|` for the given Hurst indices.
pub fn rho_bound(hurst_x: f64, hurst_y: f64) -> f64 {
    coherence(hurst_x, hurst_y, 1.0).recip().sqrt().min(1.0)
}

fn fgn_kernel(h: usize, exponent: f64) -> f64 {
    let h = h as f64;
    0.5 * ((h - 1.0).abs().powf(exponent) - 2.0 * h.powf(exponent) + (h + 1.0).powf(exponent))
}

/// Lag-`h` autocovariance matrix `[[γ_11, γ_12], [γ_12, γ_22]]` of the noise.
pub fn bfgn_covariance(spec: &BfbmSpec, h: usize) -> [f64; 3] {
    [
        fgn_kernel(h, 2.0 * spec.hurst_x),
        spec.rho * fgn_kernel(h, spec.hurst_x + spec.hurst_y),
        fgn_kernel(h, 2.0 * spec.hurst_y),
    ]
}

/// How the noise was synthesized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BfgnMethod {
    Circulant { embedding: usize },
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bfgn {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub method: BfgnMethod,
}

/// Per-frequency 2x2 eigenvalues of the circulant embedding of size `m`,
/// ordered `(a, b, d)` for the matrix `[[a, b], [b, d]]`.
fn embedding_spectrum(spec: &BfbmSpec, m: usize) -> Vec<[f64; 3]> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let mut cols: [Vec<Complex64>; 3] = Default::default();
    for (c, col) in cols.iter_mut().enumerate() {
        *col = (0..m)
            .map(|k| {
                let lag = k.min(m - k);
                Complex64::new(bfgn_covariance(spec, lag)[c], 0.0)
            })
            .collect();
        fft.process(col);
    }
    (0..m)
        .map(|f| [cols[0][f].re, cols[1][f].re, cols[2][f].re])
        .collect()
}

fn sym_eigen(a: f64, b: f64, d: f64) -> (f64, f64, f64) {
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (s, c) = theta.sin_cos();
    let l1 = c * c * a + 2.0 * s * c * b + s * s * d;
    let l2 = s * s * a - 2.0 * s * c * b + c * c * d;
    (theta, l1, l2)
}

/// Smallest eigenvalue over all frequencies of the size-`m` embedding,
/// relative to the largest.
pub fn embedding_min_eigenvalue(spec: &BfbmSpec, m: usize) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for [a, b, d] in embedding_spectrum(spec, m) {
        let (_, l1, l2) = sym_eigen(a, b, d);
        lo = lo.min(l1).min(l2);
        hi = hi.max(l1.abs()).max(l2.abs());
    }
    lo / hi
}

fn circulant(spec: &BfbmSpec, m: usize, rng: &mut ChaCha8Rng) -> Option<(Vec<f64>, Vec<f64>)> {
    let spectrum = embedding_spectrum(spec, m);
    let scale = spectrum
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut zx = Vec::with_capacity(m);
    let mut zy = Vec::with_capacity(m);
    for &[a, b, d] in &spectrum {
        let (theta, l1, l2) = sym_eigen(a, b, d);
        if l1.min(l2) < -EIGEN_TOL * scale {
            return None;
        }
        let (s, c) = theta.sin_cos();
        let (r1, r2) = ((l1.max(0.0) / m as f64).sqrt(), (l2.max(0.0) / m as f64).sqrt());
        let w1 = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let w2 = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        zx.push(w1 * (c * r1) - w2 * (s * r2));
        zy.push(w1 * (s * r1) + w2 * (c * r2));
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut zx);
    fft.process(&mut zy);
    let n = spec.n;
    Some((
        zx[..n].iter().map(|z| z.re).collect(),
        zy[..n].iter().map(|z| z.re).collect(),
    ))
}

type Mat2 = [[f64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn mat_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

fn mat_t(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn mat_inv(a: &Mat2) -> Option<Mat2> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    (det > 0.0).then(|| {
        [
            [a[1][1] / det, -a[0][1] / det],
            [-a[1][0] / det, a[0][0] / det],
        ]
    })
}

fn cholesky2(v: &Mat2) -> Option<Mat2> {
    let l00 = v[0][0].sqrt();
    if l00.is_nan() || l00 <= 0.0 {
        return None;
    }
    let l10 = v[1][0] / l00;
    let l11 = (v[1][1] - l10 * l10).sqrt();
    l11.is_finite().then_some([[l00, 0.0], [l10, l11]])
}

fn gamma_mat(spec: &BfbmSpec, h: usize) -> Mat2 {
    let [a, b, d] = bfgn_covariance(spec, h);
    [[a, b], [b, d]]
}

/// Multivariate Durbin-Levinson recursion. Time reversibility makes the
/// backward predictors equal to the forward ones. `visit(t, Φ_t, V_t)` sees
/// the coefficients of the best linear predictor of `X_{t+1}` from
/// `X_t, …, X_1` and its error covariance.
fn durbin_levinson(spec: &BfbmSpec, mut visit: impl FnMut(usize, &[Mat2], &Mat2)) -> Result<()> {
    let n = spec.n;
    let gamma: Vec<Mat2> = (0..n).map(|h| gamma_mat(spec, h)).collect();
    let mut phi: Vec<Mat2> = Vec::with_capacity(n);
    let mut v = gamma[0];
    visit(0, &phi, &v);
    for t in 1..n {
        // Δ = Γ(t) - Σ_{j=1}^{t-1} Φ_{t-1,j} Γ(t-j)
        let mut delta = gamma[t];
        for (j, p) in phi.iter().enumerate() {
            delta = mat_sub(&delta, &mat_mul(p, &gamma[t - 1 - j]));
        }
        let v_inv = mat_inv(&v).ok_or_else(|| {
            Error::Numerical(format!("prediction error covariance singular at step {t}"))
        })?;
        let k = mat_mul(&delta, &v_inv);
        let prev = phi.clone();
        for j in 0..phi.len() {
            phi[j] = mat_sub(&prev[j], &mat_mul(&k, &prev[prev.len() - 1 - j]));
        }
        phi.push(k);
        v = mat_sub(&v, &mat_mul(&mat_mul(&k, &v), &mat_t(&k)));
        visit(t, &phi, &v);
    }
    Ok(())
}

fn exact(spec: &BfbmSpec, rng: &mut ChaCha8Rng) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = spec.n;
    let mut xs: Vec<[f64; 2]> = Vec::with_capacity(n);
    let mut failure = None;
    durbin_levinson(spec, |t, phi, v| {
        if failure.is_some() {
            return;
        }
        let Some(l) = cholesky2(v) else {
            failure = Some(t);
            return;
        };
        let e: [f64; 2] = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let mut next = [l[0][0] * e[0], l[1][0] * e[0] + l[1][1] * e[1]];
        for (j, p) in phi.iter().enumerate() {
            let past = xs[t - 1 - j];
            next[0] += p[0][0] * past[0] + p[0][1] * past[1];
            next[1] += p[1][0] * past[0] + p[1][1] * past[1];
        }
        xs.push(next);
    })?;
    if let Some(t) = failure {
        return Err(Error::Numerical(format!(
            "covariance is not positive definite at step {t}"
        )));
    }
    Ok(xs.into_iter().map(|[a, b]| (a, b)).unzip())
}

/// Bivariate fractional Gaussian noise of length `spec.n`.
pub fn bfgn(spec: &BfbmSpec) -> Result<Bfgn> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut m = 2 * spec.n.next_power_of_two();
    for _ in 0..EMBEDDING_RETRIES {
        if let Some((x, y)) = circulant(spec, m, &mut rng) {
            return Ok(Bfgn {
                x,
                y,
                method: BfgnMethod::Circulant { embedding: m },
            });
        }
        m *= 2;
    }
    bfgn_exact(spec)
}

/// Exact sequential synthesis, limited to `n ≤ EXACT_MAX_LEN`.
pub fn bfgn_exact(spec: &BfbmSpec) -> Result<Bfgn> {
    if spec.n > EXACT_MAX_LEN {
        return Err(Error::Numerical(format!(
            "circulant embedding is not nonnegative definite and n = {} exceeds the exact \
             fallback limit {EXACT_MAX_LEN}",
            spec.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (x, y) = exact(spec, &mut rng)?;
    Ok(Bfgn {
        x,
        y,
        method: BfgnMethod::Exact,
    })
}

fn cumsum(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect()
}

/// Paths are the cumulative sums of [`bfgn`].
pub fn bfbm(spec: &BfbmSpec) -> Result<SignalPair> {
    let noise = bfgn(spec)?;
    let x = Signal::new("bfbm_x", cumsum(&noise.x), SignalKind::Raw)?;
    let y = Signal::new("bfbm_y", cumsum(&noise.y), SignalKind::Raw)?;
    SignalPair::new(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::pearson_correlation;

    fn corr(x: &[f64], y: &[f64]) -> f64 {
        let sx = Signal::raw("x", x.to_vec()).unwrap();
        let sy = Signal::raw("y", y.to_vec()).unwrap();
        pearson_correlation(&sx, &sy).unwrap()
    }

    #[test]
    fn coherence_values() {
        assert!((coherence(0.5, 0.5, 0.3) - 0.09).abs() < 1e-12);
        assert!((rho_bound(0.5, 0.5) - 1.0).abs() < 1e-12);
        let c = coherence(0.1, 0.9, 1.0);
        assert!((c.recip() - 0.1469).abs() < 1e-3, "{}", c.recip());
        assert!(coherence(0.5, 0.8, 0.3) < 1.0);
    }

    #[test]
    fn inadmissible_spec_is_rejected() {
        let err = BfbmSpec::new(0.1, 0.9, 0.99, 1024, 1).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("inadmissible"));
        assert!(BfbmSpec::new(0.5, 0.8, 0.3, 1000, 1).is_err());
        assert!(BfbmSpec::new(0.0, 0.8, 0.3, 1024, 1).is_err());
        assert!(BfbmSpec::new(0.5, 0.8, 1.0, 1024, 1).is_err());
    }

    #[test]
    fn embedding_goes_negative_beyond_the_bound() {
        let inadmissible = BfbmSpec {
            hurst_x: 0.1,
            hurst_y: 0.9,
            rho: 0.99,
            n: 1024,
            seed: 0,
        };
        assert!(embedding_min_eigenvalue(&inadmissible, 2048) < -1e-3);
        let fine = BfbmSpec::new(0.5, 0.8, 0.3, 1024, 0).unwrap();
        assert!(embedding_min_eigenvalue(&fine, 2048) > -EIGEN_TOL);
    }

    #[test]
    fn fgn_covariance_at_half_is_white() {
        let s = BfbmSpec::new(0.5, 0.5, 0.3, 16, 0).unwrap();
        assert_eq!(bfgn_covariance(&s, 0), [1.0, 0.3, 1.0]);
        for h in 1..5 {
            let [a, b, d] = bfgn_covariance(&s, h);
            assert!(a.abs() < 1e-15 && b.abs() < 1e-15 && d.abs() < 1e-15);
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let s = BfbmSpec::new(0.5, 0.8, 0.3, 4096, 42).unwrap();
        let a = bfbm(&s).unwrap();
        let b = bfbm(&s).unwrap();
        assert_eq!(a.x().values(), b.x().values());
        assert_eq!(a.y().values(), b.y().values());
        let c = bfbm(&BfbmSpec { seed: 43, ..s }).unwrap();
        assert_ne!(a.x().values(), c.x().values());
    }

    #[test]
    fn independent_components() {
        let n = 1 << 16;
        let s = BfbmSpec::new(0.5, 0.8, 0.0, n, 7).unwrap();
        let g = bfgn(&s).unwrap();
        assert!(matches!(g.method, BfgnMethod::Circulant { .. }));
        assert!(corr(&g.x, &g.y).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn increment_correlation_matches_rho() {
        let s = BfbmSpec::new(0.5, 0.5, 0.3, 1 << 16, 3).unwrap();
        let g = bfgn(&s).unwrap();
        assert!((corr(&g.x, &g.y) - 0.3).abs() < 0.02);
    }

    fn variance_time_hurst(x: &[f64]) -> f64 {
        let (mut lx, mut ly) = (Vec::new(), Vec::new());
        for k in 0..8 {
            let m = 1usize << k;
            let means: Vec<f64> = x.chunks(m).map(|c| c.iter().sum::<f64>() / m as f64).collect();
            let mu = means.iter().sum::<f64>() / means.len() as f64;
            let var = means.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / means.len() as f64;
            lx.push((m as f64).ln());
            ly.push(var.ln());
        }
        let slope = crate::analysis::loglog_fit(&lx, &ly).unwrap().slope;
        1.0 + slope / 2.0
    }

    #[test]
    fn variance_time_slope() {
        let s = BfbmSpec::new(0.5, 0.8, 0.3, 1 << 16, 5).unwrap();
        let g = bfgn(&s).unwrap();
        assert!((variance_time_hurst(&g.x) - 0.5).abs() < 0.05);
        assert!((variance_time_hurst(&g.y) - 0.8).abs() < 0.05);
    }

    #[test]
    fn recursion_solves_the_normal_equations() {
        let s = BfbmSpec::new(0.3, 0.8, 0.4, 64, 0).unwrap();
        let mut worst = 0.0f64;
        durbin_levinson(&s, |t, phi, _| {
            // Γ(k) = Σ_j Φ_{t,j} Γ(|k - j|) for k = 1..=t
            for k in 1..=t {
                let mut rhs = [[0.0; 2]; 2];
                for (j, p) in phi.iter().enumerate() {
                    let g = gamma_mat(&s, (k as isize - j as isize - 1).unsigned_abs());
                    let prod = mat_mul(p, &g);
                    for r in 0..2 {
                        for c in 0..2 {
                            rhs[r][c] += prod[r][c];
                        }
                    }
                }
                let g = gamma_mat(&s, k);
                for r in 0..2 {
                    for c in 0..2 {
                        worst = worst.max((rhs[r][c] - g[r][c]).abs());
                    }
                }
            }
        })
        .unwrap();
        assert!(worst < 1e-10, "{worst}");
    }

    /// Ensemble lag covariances of both generators against the target.
    #[test]
    fn both_generators_match_the_covariance() {
        let n = 64;
        let reps = 4000;
        let base = BfbmSpec::new(0.3, 0.8, 0.4, n, 0).unwrap();
        for exact_path in [false, true] {
            let mut acc = [[0.0f64; 3]; 4];
            for r in 0..reps {
                let s = BfbmSpec { seed: r, ..base };
                let g = if exact_path { bfgn_exact(&s) } else { bfgn(&s) }.unwrap();
                for (h, slot) in acc.iter_mut().enumerate() {
                    let t = 20;
                    slot[0] += g.x[t + h] * g.x[t];
                    slot[1] += g.x[t + h] * g.y[t];
                    slot[2] += g.y[t + h] * g.y[t];
                }
            }
            for (h, slot) in acc.iter().enumerate() {
                let target = bfgn_covariance(&base, h);
                for c in 0..3 {
                    let est = slot[c] / reps as f64;
                    // Standard error of a product of unit-variance Gaussians is at most √2/√reps.
                    assert!(
                        (est - target[c]).abs() < 4.0 * (2.0 / reps as f64).sqrt(),
                        "exact={exact_path} h={h} c={c} est={est} target={}",
                        target[c]
                    );
                }
            }
        }
    }
}
