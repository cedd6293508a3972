//! Finite-amplitude phasor sweeps, quadrature axes and the deamplification
//! ratio.

pub mod axes;
pub mod deamp;
pub mod sweep;

pub use axes::{linearized_axes, principal_axes, projected_variance, QuadratureFrame};
pub use deamp::{
    deamp_ratio, deamp_ratio_with, optimal_point, scan_deamp_along_contour, AxisChoice,
    ContourDeamp, DeampResult, OptimalPoint,
};
pub use sweep::{half_photon_probe, harmonic, phasor_sweep, PhasorSweep};
