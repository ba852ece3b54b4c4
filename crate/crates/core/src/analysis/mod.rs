//! Joint multifractal analysis of a pair of leader pyramids.
//!
//! The moment orders `p` and `q` apply to `x` and `y`:
//! `S(p,q,j) = (1/n_j) Σ_k L_x(j,k)^{p/2} L_y(j,k)^{q/2} ~ 2^{j ζ(p,q)}`.
//! Singularity strengths and the spectrum follow either from finite
//! differences of `ζ` ([`legendre_spectrum`]) or from weighted log averages
//! regressed over scale ([`direct_spectrum`]).

mod diagonal;
mod fit;
mod grid;
mod partition;
mod spectrum;
mod surface;

pub use diagonal::{diagonal_analysis, DiagonalAnalysis};
pub use fit::{loglog_fit, LinearFit, PlaneFit};
pub use grid::{FitRange, MomentGrid};
pub use partition::{
    common_scales, moment_weights, partition_table, scale_moments, PartitionCell, PartitionTable, ScaleMoments,
};
pub use spectrum::{
    direct_spectrum, legendre_spectrum, plane_fit, scaling_exponents, FdScheme, SpectrumMethod,
    SpectrumSurface, ZetaSurface,
};
pub use surface::Surface;
