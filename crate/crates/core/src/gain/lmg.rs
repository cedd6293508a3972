use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::direct::direct_gain;
use super::map::linspace;
use super::operating::OperatingPoint;
use crate::error::{Error, Result};
use crate::model::{critical_params, DeviceParams};
use crate::search::golden_max;

/// Search knobs shared by the LMG and contour routines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub probe_amp: f64,
    pub n_theta: usize,
    /// Pump-power window scanned for the gain maximum, dB re P_c.
    pub p_db_window: (f64, f64),
    pub coarse_points: usize,
    /// Gain tolerance for bisection, dB.
    pub gain_tol_db: f64,
    /// Relative amplitude tolerance.
    pub amp_rel_tol: f64,
}

impl SearchSettings {
    pub fn default_for(device: &DeviceParams) -> Self {
        SearchSettings {
            probe_amp: 1e-4 * critical_params(device).b_c,
            n_theta: 360,
            p_db_window: (-12.0, 6.0),
            coarse_points: 73,
            gain_tol_db: 1e-4,
            amp_rel_tol: 1e-9,
        }
    }

    /// Power tolerance in dB equivalent to the relative amplitude tolerance.
    pub(crate) fn p_db_tol(&self) -> f64 {
        20.0 / std::f64::consts::LN_10 * self.amp_rel_tol
    }

    pub fn gain_at(&self, device: &DeviceParams, f_ratio: f64, p_db: f64) -> Result<f64> {
        direct_gain(
            &OperatingPoint::from_normalized(device, f_ratio, p_db),
            device,
            self.probe_amp,
            self.n_theta,
        )
    }
}

/// Point of maximum gain at one pump frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmgPoint {
    pub op: OperatingPoint,
    pub gain_db: f64,
    /// False when the maximum sits on the edge of the scanned window.
    pub interior: bool,
}

/// Maximizes direct gain over pump power at fixed f_p/f_c.
pub fn lmg_point(device: &DeviceParams, f_ratio: f64, s: &SearchSettings) -> Result<LmgPoint> {
    let grid = linspace(s.p_db_window.0, s.p_db_window.1, s.coarse_points.max(3));
    let mut gains = Vec::with_capacity(grid.len());
    for &p in &grid {
        gains.push(match s.gain_at(device, f_ratio, p) {
            Ok(g) => Some(g),
            Err(Error::Bistable(_)) => None,
            Err(e) => return Err(e),
        });
    }
    let (best, _) = gains
        .iter()
        .enumerate()
        .filter_map(|(i, g)| g.map(|g| (i, g)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| {
            Error::Bistable(format!("no monostable pump power at f_p/f_c = {f_ratio}"))
        })?;
    let interior = best > 0
        && best + 1 < grid.len()
        && gains[best - 1].is_some()
        && gains[best + 1].is_some();
    let (p_db, gain_db) = if interior {
        golden_max(
            |p| s.gain_at(device, f_ratio, p),
            grid[best - 1],
            grid[best + 1],
            s.p_db_tol(),
        )?
    } else {
        (grid[best], gains[best].unwrap_or(f64::NAN))
    };
    Ok(LmgPoint {
        op: OperatingPoint::from_normalized(device, f_ratio, p_db),
        gain_db,
        interior,
    })
}

/// Line of maximum gain over a set of f_p/f_c values.
pub fn lmg(device: &DeviceParams, f_ratios: &[f64], s: &SearchSettings) -> Result<Vec<LmgPoint>> {
    f_ratios
        .par_iter()
        .map(|&f| lmg_point(device, f, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximum_is_stationary_and_insensitive() {
        let dev = DeviceParams::typical();
        let s = SearchSettings::default_for(&dev);
        let pt = lmg_point(&dev, 1.0015, &s).unwrap();
        assert!(pt.interior);
        let p = pt.op.normalized.p_db;
        let step = 10.0 * 1.01f64.log10();
        let up = s.gain_at(&dev, 1.0015, p + step).unwrap();
        let down = s.gain_at(&dev, 1.0015, p - step).unwrap();
        assert!(pt.gain_db > up && pt.gain_db > down);
        // first-order sensitivity, expressed per 1 % power change
        let h = 10.0 * 1.0001f64.log10();
        let slope = (s.gain_at(&dev, 1.0015, p + h).unwrap()
            - s.gain_at(&dev, 1.0015, p - h).unwrap())
            / (2.0 * h);
        assert!((slope * step).abs() < 0.01, "{slope}");
    }

    #[test]
    fn lmg_amplitude_grows_with_detuning() {
        let dev = DeviceParams::typical();
        let s = SearchSettings {
            n_theta: 64,
            ..SearchSettings::default_for(&dev)
        };
        let f = [1.0005, 1.001, 1.0015, 1.002, 1.003, 1.004];
        let pts = lmg(&dev, &f, &s).unwrap();
        // coarse-scan oracle: argmax over a dense amplitude grid
        let c = critical_params(&dev);
        // Δ = ω₀ − ω_p grows as f_p decreases towards f_c
        let mut prev = f64::INFINITY;
        for (pt, &fr) in pts.iter().zip(&f) {
            let f_p = fr * c.f_c;
            let (mut best_a, mut best_g) = (0.0, f64::MIN);
            for k in 1..=400 {
                let a = k as f64 * 0.005 * c.b_c;
                let g = direct_gain(&OperatingPoint::new(&dev, f_p, a), &dev, s.probe_amp, 64)
                    .unwrap();
                if g > best_g {
                    best_g = g;
                    best_a = a;
                }
            }
            assert!((pt.op.pump_amp - best_a).abs() <= 0.005 * c.b_c, "{fr}");
            assert!(pt.op.pump_amp < prev);
            prev = pt.op.pump_amp;
        }
    }
}
