//! Wavelet leaders.
//!
//! `L(j,k)` is the largest `|d(j',k')|` over all dyadic intervals `λ(j',k')`
//! with `j' <= j` contained in `3λ(j,k) = λ(j,k-1) ∪ λ(j,k) ∪ λ(j,k+1)`.
//! It is computed in `O(N)` from subtree maxima
//! `M(j,k) = max(|d(j,k)|, M(j-1,2k), M(j-1,2k+1))` followed by a three-point
//! running maximum at each scale.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dwt::WaveletPyramid;
use crate::error::{Error, Result};

/// How the neighbourhood `3λ` is formed at the first and last position of a
/// scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    /// Neighbours wrap around: position 0 sees `n_j - 1` and vice versa.
    #[default]
    Periodic,
    /// Only existing neighbours are used.
    Clamp,
    /// Boundary positions are dropped, leaving `n_j - 2` leaders.
    Discard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderOptions {
    pub boundary: BoundaryPolicy,
    /// Scales retaining fewer leaders than this are excluded.
    pub min_leaders: usize,
    /// Finest scale kept in the leader pyramid.
    pub j_min: usize,
}

impl Default for LeaderOptions {
    fn default() -> Self {
        LeaderOptions {
            boundary: BoundaryPolicy::default(),
            min_leaders: 4,
            j_min: 1,
        }
    }
}

impl LeaderOptions {
    pub fn with_boundary(boundary: BoundaryPolicy) -> Self {
        LeaderOptions {
            boundary,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderPyramid {
    leaders: Vec<Vec<f64>>,
    j_min: usize,
    boundary: BoundaryPolicy,
    signal_len: usize,
}

impl LeaderPyramid {
    pub fn j_min(&self) -> usize {
        self.j_min
    }

    pub fn j_max(&self) -> usize {
        self.j_min + self.leaders.len() - 1
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<usize> {
        self.j_min..=self.j_max()
    }

    pub fn scale(&self, j: usize) -> Option<&[f64]> {
        j.checked_sub(self.j_min)
            .and_then(|i| self.leaders.get(i))
            .map(Vec::as_slice)
    }

    pub fn boundary(&self) -> BoundaryPolicy {
        self.boundary
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> {
        let j0 = self.j_min;
        self.leaders
            .iter()
            .enumerate()
            .map(move |(i, l)| (j0 + i, l.as_slice()))
    }

    /// First retained position with a zero leader, as `(j, k)`.
    pub fn first_zero(&self) -> Option<(usize, usize)> {
        self.iter()
            .find_map(|(j, l)| l.iter().position(|&v| v == 0.0).map(|k| (j, k)))
    }

    /// Regularize with `L <- max(L, epsilon)`.
    pub fn floored(&self, epsilon: f64) -> LeaderPyramid {
        LeaderPyramid {
            leaders: self
                .leaders
                .iter()
                .map(|l| l.iter().map(|&v| v.max(epsilon)).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// Rows `j,k,L`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "j,k,L")?;
        for (j, l) in self.iter() {
            for (k, v) in l.iter().enumerate() {
                writeln!(out, "{j},{k},{v}")?;
            }
        }
        Ok(())
    }
}

/// `M(j,k)`: largest `|d|` over the dyadic subtree rooted at `(j,k)`.
/// Index 0 holds scale 1.
pub fn subtree_maxima(p: &WaveletPyramid) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(p.max_scale());
    for (_, coeffs) in p.iter() {
        let level: Vec<f64> = match out.last() {
            None => coeffs.iter().map(|d| d.abs()).collect(),
            Some(finer) => coeffs
                .iter()
                .enumerate()
                .map(|(k, d)| d.abs().max(finer[2 * k]).max(finer[2 * k + 1]))
                .collect(),
        };
        out.push(level);
    }
    out
}

fn neighbourhood_max(m: &[f64], boundary: BoundaryPolicy) -> Vec<f64> {
    let n = m.len();
    let at = |k: usize| -> f64 {
        let own = m[k];
        let left = if k > 0 {
            Some(m[k - 1])
        } else if boundary == BoundaryPolicy::Periodic && n > 1 {
            Some(m[n - 1])
        } else {
            None
        };
        let right = if k + 1 < n {
            Some(m[k + 1])
        } else if boundary == BoundaryPolicy::Periodic && n > 1 {
            Some(m[0])
        } else {
            None
        };
        [left, right].into_iter().flatten().fold(own, f64::max)
    };
    match boundary {
        BoundaryPolicy::Discard => (1..n.saturating_sub(1)).map(at).collect(),
        _ => (0..n).map(at).collect(),
    }
}

/// Leader pyramid of a wavelet pyramid.
///
/// Fails when every coefficient is zero, since no moment of negative order
/// could then be formed.
pub fn wavelet_leaders(p: &WaveletPyramid, opts: &LeaderOptions) -> Result<LeaderPyramid> {
    if opts.j_min == 0 {
        return Err(Error::Config("leader scales start at j = 1".into()));
    }
    let maxima = subtree_maxima(p);
    if maxima.last().is_none_or(|top| top.iter().all(|&v| v == 0.0)) {
        return Err(Error::Degenerate(
            "all wavelet coefficients are zero".into(),
        ));
    }

    let mut leaders = Vec::new();
    for (i, m) in maxima.iter().enumerate() {
        let j = i + 1;
        if j < opts.j_min {
            continue;
        }
        let l = neighbourhood_max(m, opts.boundary);
        if l.len() < opts.min_leaders.max(1) {
            break;
        }
        leaders.push(l);
    }
    if leaders.is_empty() {
        return Err(Error::Config(format!(
            "no scale from j = {} keeps at least {} leaders",
            opts.j_min, opts.min_leaders
        )));
    }
    Ok(LeaderPyramid {
        leaders,
        j_min: opts.j_min,
        boundary: opts.boundary,
        signal_len: p.signal_len(),
    })
}
