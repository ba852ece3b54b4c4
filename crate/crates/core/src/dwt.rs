//! Haar (order-1 Daubechies) discrete wavelet pyramid.
//!
//! Coefficients use the L1 normalization, i.e. the `2^-j` prefactor on the
//! dilated wavelet. With block means `s(0,t) = x(t)`,
//! `s(j,k) = (s(j-1,2k) + s(j-1,2k+1)) / 2`, the detail coefficient is
//!
//! ```text
//! d(j,k) = (s(j-1,2k+1) - s(j-1,2k)) / 2
//! ```
//!
//! which equals `2^-j` times the difference between the sums over the second
//! and first halves of the block `[k 2^j, (k+1) 2^j)`.
//!
//! The L2 convention (`2^-j/2`) multiplies every scale-`j` coefficient by
//! `2^(j/2)` and shifts the scaling exponents by `(p+q)/4`. It is available
//! only so that checks can demonstrate that they detect the wrong
//! normalization.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_io::{check_dyadic, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wavelet {
    #[default]
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    L1,
    L2,
}

/// Detail coefficients `d(j,k)` for `j = 1..=J`, `k = 0..N/2^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    coeffs: Vec<Vec<f64>>,
    len: usize,
    wavelet: Wavelet,
    normalization: Normalization,
}

impl WaveletPyramid {
    /// Length `N` of the analysed signal.
    pub fn signal_len(&self) -> usize {
        self.len
    }

    /// Coarsest scale `J = log2 N`.
    pub fn max_scale(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients at scale `j` (1-based).
    pub fn scale(&self, j: usize) -> Option<&[f64]> {
        j.checked_sub(1)
            .and_then(|i| self.coeffs.get(i))
            .map(Vec::as_slice)
    }

    /// `(j, n_j)` in ascending `j`.
    pub fn scales(&self) -> Vec<(usize, usize)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i + 1, c.len()))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i + 1, c.as_slice()))
    }

    pub fn coefficient_count(&self) -> usize {
        self.coeffs.iter().map(Vec::len).sum()
    }

    pub fn wavelet(&self) -> Wavelet {
        self.wavelet
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Rows `j,k,d`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "j,k,d")?;
        for (j, c) in self.iter() {
            for (k, d) in c.iter().enumerate() {
                writeln!(out, "{j},{k},{d}")?;
            }
        }
        Ok(())
    }
}

/// Haar pyramid of any power-of-two-length slice (`N >= 2`).
pub fn haar_coefficients(values: &[f64], normalization: Normalization) -> Result<Vec<Vec<f64>>> {
    let n = values.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "Haar transform needs a power-of-two length of at least 2, got {n}"
        )));
    }
    let mut coeffs = Vec::with_capacity(n.trailing_zeros() as usize);
    let mut smooth = values.to_vec();
    let mut j = 0i32;
    while smooth.len() > 1 {
        j += 1;
        let gain = match normalization {
            Normalization::L1 => 1.0,
            Normalization::L2 => 2f64.powf(j as f64 / 2.0),
        };
        let half = smooth.len() / 2;
        let mut detail = Vec::with_capacity(half);
        let mut next = Vec::with_capacity(half);
        for pair in smooth.chunks_exact(2) {
            detail.push(gain * (pair[1] - pair[0]) / 2.0);
            next.push((pair[0] + pair[1]) / 2.0);
        }
        coeffs.push(detail);
        smooth = next;
    }
    Ok(coeffs)
}

/// L1-normalized Haar pyramid of a signal of length `2^J`, `J >= 4`.
pub fn haar_pyramid(signal: &Signal) -> Result<WaveletPyramid> {
    haar_pyramid_with(signal, Normalization::L1)
}

pub fn haar_pyramid_with(signal: &Signal, normalization: Normalization) -> Result<WaveletPyramid> {
    check_dyadic(signal.len())?;
    let coeffs = haar_coefficients(signal.values(), normalization)?;
    Ok(WaveletPyramid {
        coeffs,
        len: signal.len(),
        wavelet: Wavelet::Haar,
        normalization,
    })
}

/// `(j, n_j)` for every scale of the pyramid.
pub fn pyramid_scales(p: &WaveletPyramid) -> Vec<(usize, usize)> {
    p.scales()
}
