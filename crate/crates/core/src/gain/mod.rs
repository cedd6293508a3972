//! Direct gain, gain maps over the pump plane, the line of maximum gain and
//! iso-gain contours.

pub mod contour;
pub mod critical;
pub mod direct;
pub mod lmg;
pub mod map;
pub mod operating;

pub use contour::{iso_gain_contour, power_cut_through_lmg, Contour, ContourPoint, PowerCut, Side};
pub use critical::{locate_critical_point, CriticalLocation, DIVERGENCE_THRESHOLD_DB};
pub use direct::{direct_gain, linear_gain, signal_response, theta_grid, SignalResponse};
pub use lmg::{lmg, lmg_point, LmgPoint, SearchSettings};
pub use map::{gain_map, linspace, GainMap, GainMapSpec};
pub use operating::{tone_amplitude, tone_power, Normalized, OperatingPoint};
