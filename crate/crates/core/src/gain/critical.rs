use serde::{Deserialize, Serialize};

use super::direct::linear_gain;
use super::operating::OperatingPoint;
use crate::error::Result;
use crate::model::{critical_params, CriticalParams, DeviceParams};
use crate::search::{bisect, golden_max};

/// Analytic critical point together with its numerical confirmation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalLocation {
    pub analytic: CriticalParams,
    /// Onset detuning found by scanning for a vanishing slope of the
    /// drive-vs-photon-number curve, rad/s.
    pub numeric_delta_c: f64,
    /// Drive amplitude at the numerically located inflection, √(photons/s).
    pub numeric_b_c: f64,
    /// Numeric critical pump frequency, Hz.
    pub numeric_f_c: f64,
    /// Peak small-signal gain just on the monostable side of the critical
    /// detuning, dB.
    pub peak_gain_db: f64,
}

/// Gain above which the map is considered divergent.
pub const DIVERGENCE_THRESHOLD_DB: f64 = 40.0;

// minimum over w ≥ 0 of the slope of p(w) = w((w − d)² + 1)
fn min_slope(d: f64) -> Result<(f64, f64)> {
    let slope = |w: f64| 3.0 * w * w - 4.0 * d * w + d * d + 1.0;
    let (w, neg) = golden_max(|w| Ok(-slope(w)), 0.0, 3.0 * d.abs() + 3.0, 1e-12)?;
    Ok((w, -neg))
}

pub fn locate_critical_point(device: &DeviceParams) -> Result<CriticalLocation> {
    let analytic = critical_params(device);
    let g = device.gamma();
    let k = device.kerr().abs();

    let d_c = bisect(|d| Ok(min_slope(d)?.1), 0.0, 10.0, 0.0, 1e-15)?;
    let (w_c, _) = min_slope(d_c)?;
    let p_c = w_c * ((w_c - d_c) * (w_c - d_c) + 1.0);
    let numeric_b_c = (p_c * g * g / (2.0 * k)).sqrt();
    let numeric_delta_c = -device.kerr().signum() * d_c * g;
    let numeric_f_c = device.pump_frequency(numeric_delta_c);

    // approach the critical point from the monostable side
    let delta_probe = numeric_delta_c * (1.0 - 1e-4);
    let f_probe = device.pump_frequency(delta_probe);
    let (_, peak_gain_db) = golden_max(
        |a| linear_gain(&OperatingPoint::new(device, f_probe, a), device),
        0.9 * numeric_b_c,
        1.1 * numeric_b_c,
        1e-9 * numeric_b_c,
    )?;

    Ok(CriticalLocation {
        analytic,
        numeric_delta_c,
        numeric_b_c,
        numeric_f_c,
        peak_gain_db,
    })
}
