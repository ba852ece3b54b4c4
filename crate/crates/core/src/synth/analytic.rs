//! Closed-form scaling functions of binomial cascades.
//!
//! For a single cascade with weight `p_z`,
//! `ζ(q) = 1 - log2(p_z^q + (1 - p_z)^q)`. For two cascades split with the
//! same orientation,
//! `ζ(p,q) = 1 - log2(p_x^{p/2} p_y^{q/2} + (1 - p_x)^{p/2} (1 - p_y)^{q/2})`.

use serde::Serialize;

pub fn analytic_zeta_single(p_z: f64, q: f64) -> f64 {
    1.0 - (p_z.powf(q) + (1.0 - p_z).powf(q)).log2()
}

/// Log-weights of the two branches, `(p/2) ln p_x + (q/2) ln p_y` and the
/// complementary one.
fn branch_logs(p_x: f64, p_y: f64, p: f64, q: f64) -> (f64, f64) {
    (
        0.5 * p * p_x.ln() + 0.5 * q * p_y.ln(),
        0.5 * p * (1.0 - p_x).ln() + 0.5 * q * (1.0 - p_y).ln(),
    )
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub fn analytic_zeta_cross(p_x: f64, p_y: f64, p: f64, q: f64) -> f64 {
    let (a, b) = branch_logs(p_x, p_y, p, q);
    1.0 - log_sum_exp(a, b) / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossSpectrumPoint {
    pub h_x: f64,
    pub h_y: f64,
    pub d: f64,
}

/// Exact `h_x = 2 ∂ζ/∂p`, `h_y = 2 ∂ζ/∂q` and `D = 1 + p h_x/2 + q h_y/2 - ζ`.
pub fn analytic_cross_spectrum(p_x: f64, p_y: f64, p: f64, q: f64) -> CrossSpectrumPoint {
    let (a, b) = branch_logs(p_x, p_y, p, q);
    let lse = log_sum_exp(a, b);
    let (wa, wb) = ((a - lse).exp(), (b - lse).exp());
    let h_x = -(wa * p_x.log2() + wb * (1.0 - p_x).log2());
    let h_y = -(wa * p_y.log2() + wb * (1.0 - p_y).log2());
    let zeta = 1.0 - lse / std::f64::consts::LN_2;
    CrossSpectrumPoint {
        h_x,
        h_y,
        d: 1.0 + p * h_x / 2.0 + q * h_y / 2.0 - zeta,
    }
}
