use serde::{Serialize, Serializer};

use super::grid::MomentGrid;

/// Values over a moment grid, row-major in `p`. `NaN` marks a masked cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    n_p: usize,
    n_q: usize,
    data: Vec<f64>,
}

impl Surface {
    pub fn filled(grid: &MomentGrid, value: f64) -> Self {
        Surface {
            n_p: grid.n_p(),
            n_q: grid.n_q(),
            data: vec![value; grid.len()],
        }
    }

    pub(crate) fn from_data(grid: &MomentGrid, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), grid.len());
        Surface {
            n_p: grid.n_p(),
            n_q: grid.n_q(),
            data,
        }
    }

    /// Build from a closure of `(p, q)`.
    pub fn from_fn(grid: &MomentGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        Surface::from_data(grid, grid.cells().map(|(_, _, p, q)| f(p, q)).collect())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_p, self.n_q)
    }

    pub fn get(&self, ip: usize, iq: usize) -> f64 {
        self.data[ip * self.n_q + iq]
    }

    pub fn set(&mut self, ip: usize, iq: usize, v: f64) {
        self.data[ip * self.n_q + iq] = v;
    }

    pub fn is_valid(&self, ip: usize, iq: usize) -> bool {
        self.get(ip, iq).is_finite()
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn valid_count(&self) -> usize {
        self.data.iter().filter(|v| v.is_finite()).count()
    }

    /// Mean over valid cells; `NaN` when none is valid.
    pub fn mean(&self) -> f64 {
        let (sum, n) = self
            .data
            .iter()
            .filter(|v| v.is_finite())
            .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        if n == 0 {
            f64::NAN
        } else {
            sum / n as f64
        }
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        self.data.iter().filter(|v| v.is_finite()).fold(None, |acc, &v| {
            Some(match acc {
                None => (v, v),
                Some((lo, hi)) => (lo.min(v), hi.max(v)),
            })
        })
    }

    /// Nested rows with masked cells as `None`.
    pub fn to_nested(&self) -> Vec<Vec<Option<f64>>> {
        self.data
            .chunks(self.n_q)
            .map(|row| row.iter().map(|v| v.is_finite().then_some(*v)).collect())
            .collect()
    }

    /// Cellwise mean of several surfaces of identical shape.
    pub fn average<'a>(surfaces: impl IntoIterator<Item = &'a Surface>) -> Option<Surface> {
        let mut iter = surfaces.into_iter();
        let first = iter.next()?.clone();
        let mut count = 1.0;
        let mut acc = first;
        for s in iter {
            assert_eq!(s.shape(), acc.shape());
            for (a, v) in acc.data.iter_mut().zip(&s.data) {
                *a += v;
            }
            count += 1.0;
        }
        for a in &mut acc.data {
            *a /= count;
        }
        Some(acc)
    }
}

impl Serialize for Surface {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_nested().serialize(serializer)
    }
}
