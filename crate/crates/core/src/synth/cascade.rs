use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_io::{Signal, SignalKind};

/// Deterministic binomial cascade (p-model).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeSpec {
    pub p_z: f64,
    pub iterations: u32,
}

impl CascadeSpec {
    pub const MAX_ITERATIONS: u32 = 28;

    pub fn new(p_z: f64, iterations: u32) -> Result<Self> {
        if !(p_z > 0.0 && p_z < 1.0) {
            return Err(Error::Config(format!(
                "cascade weight must lie strictly between 0 and 1, got {p_z}"
            )));
        }
        if iterations == 0 || iterations > Self::MAX_ITERATIONS {
            return Err(Error::Config(format!(
                "cascade iterations must be in 1..={}, got {iterations}",
                Self::MAX_ITERATIONS
            )));
        }
        Ok(CascadeSpec { p_z, iterations })
    }
}

/// Start from a unit mass and split every cell `m` into `(p_z m, (1 - p_z) m)`
/// at each iteration; the result has `2^iterations` cells summing to one.
pub fn binomial_measure(spec: &CascadeSpec) -> Signal {
    let mut z = vec![1.0];
    for _ in 0..spec.iterations {
        z = z
            .iter()
            .flat_map(|&m| [spec.p_z * m, (1.0 - spec.p_z) * m])
            .collect();
    }
    Signal::new(format!("cascade_p{}", spec.p_z), z, SignalKind::Measure)
        .expect("cascade masses are finite and non-negative")
}
