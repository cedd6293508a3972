use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::direct::direct_gain;
use super::operating::{tone_amplitude, OperatingPoint};
use crate::error::{Error, Result};
use crate::model::{critical_params, DeviceParams};
use crate::units::from_db;

/// Pump-plane grid in coordinates normalized to the critical point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainMapSpec {
    /// f_p/f_c bounds.
    pub f_ratio: (f64, f64),
    /// P_p/P_c bounds in dB.
    pub p_db: (f64, f64),
    pub n_f: usize,
    pub n_p: usize,
    /// Probe amplitude, √(photons/s).
    pub probe_amp: f64,
    pub n_theta: usize,
}

impl GainMapSpec {
    /// 201×201 over f_p/f_c ∈ [0.999, 1.004], P_p/P_c ∈ [−6, 3] dB with a
    /// probe of 1e-4 b_c.
    pub fn default_for(device: &DeviceParams) -> Self {
        GainMapSpec {
            f_ratio: (0.999, 1.004),
            p_db: (-6.0, 3.0),
            n_f: 201,
            n_p: 201,
            probe_amp: 1e-4 * critical_params(device).b_c,
            n_theta: 360,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainMap {
    /// Pump frequencies, Hz.
    pub f_p: Vec<f64>,
    /// Pump powers at the device input, W.
    pub p_p: Vec<f64>,
    pub f_ratio: Vec<f64>,
    pub p_db: Vec<f64>,
    /// Direct gain in dB, indexed `[i_f * n_p + i_p]`; `None` on masked cells.
    pub gain_db: Vec<Option<f64>>,
    pub bistable: Vec<bool>,
}

impl GainMap {
    pub fn n_f(&self) -> usize {
        self.f_p.len()
    }

    pub fn n_p(&self) -> usize {
        self.p_p.len()
    }

    pub fn gain(&self, i_f: usize, i_p: usize) -> Option<f64> {
        self.gain_db[i_f * self.n_p() + i_p]
    }

    pub fn is_bistable(&self, i_f: usize, i_p: usize) -> bool {
        self.bistable[i_f * self.n_p() + i_p]
    }

    /// Largest unmasked gain with its (i_f, i_p) cell.
    pub fn max_gain(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i_f in 0..self.n_f() {
            for i_p in 0..self.n_p() {
                if let Some(g) = self.gain(i_f, i_p) {
                    if best.is_none_or(|b| g > b.2) {
                        best = Some((i_f, i_p, g));
                    }
                }
            }
        }
        best
    }
}

/// `n` evenly spaced values from `lo` to `hi`; a single value is `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn check_axis(name: &str, range: (f64, f64), n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(format!("{name} grid is empty")));
    }
    if !range.0.is_finite() || !range.1.is_finite() {
        return Err(Error::domain(format!("{name} range must be finite")));
    }
    if n > 1 && !(range.1 > range.0) {
        return Err(Error::domain(format!(
            "{name} range must be increasing, got {range:?}"
        )));
    }
    Ok(())
}

/// Direct gain on a (pump frequency, pump power) grid. Cells whose pump or
/// probe excursion reaches the bistable region are masked.
pub fn gain_map(device: &DeviceParams, spec: &GainMapSpec) -> Result<GainMap> {
    check_axis("frequency", spec.f_ratio, spec.n_f)?;
    check_axis("power", spec.p_db, spec.n_p)?;
    let c = critical_params(device);
    let f_ratio = linspace(spec.f_ratio.0, spec.f_ratio.1, spec.n_f);
    let p_db = linspace(spec.p_db.0, spec.p_db.1, spec.n_p);
    let f_p: Vec<f64> = f_ratio.iter().map(|r| r * c.f_c).collect();
    let p_p: Vec<f64> = p_db.iter().map(|d| c.p_c * from_db(*d)).collect();

    let cells: Vec<(usize, usize)> = (0..spec.n_f)
        .flat_map(|i| (0..spec.n_p).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<Option<f64>>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let op = OperatingPoint::from_normalized(device, f_ratio[i], p_db[j]);
            debug_assert!((tone_amplitude(f_p[i], p_p[j]) / op.pump_amp - 1.0).abs() < 1e-12);
            match direct_gain(&op, device, spec.probe_amp, spec.n_theta) {
                Ok(g) => Ok(Some(g)),
                Err(Error::Bistable(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut gain_db = Vec::with_capacity(cells.len());
    let mut bistable = Vec::with_capacity(cells.len());
    for r in results {
        let g = r?;
        bistable.push(g.is_none());
        gain_db.push(g);
    }
    if gain_db.iter().all(Option::is_none) {
        return Err(Error::domain("gain map grid lies entirely in the bistable region"));
    }
    Ok(GainMap {
        f_p,
        p_p,
        f_ratio,
        p_db,
        gain_db,
        bistable,
    })
}
