use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::model::constants::CODATA;
use crate::model::{critical_params, DeviceParams};
use crate::units::{from_db, to_db};

/// Pump coordinates relative to the critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalized {
    /// f_p / f_c
    pub f_ratio: f64,
    /// P_p / P_c in dB
    pub p_db: f64,
}

/// A pump setting: frequency and (real) input amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Pump frequency, Hz.
    pub f_p: f64,
    /// Pump input amplitude b_p,in, √(photons/s).
    pub pump_amp: f64,
    pub normalized: Normalized,
}

/// Power in W carried by a tone of amplitude `amp` at `f` Hz.
pub fn tone_power(f: f64, amp: f64) -> f64 {
    CODATA.hbar * 2.0 * PI * f * amp * amp
}

/// Amplitude √(photons/s) of a tone of power `watts` at `f` Hz.
pub fn tone_amplitude(f: f64, watts: f64) -> f64 {
    (watts / (CODATA.hbar * 2.0 * PI * f)).sqrt()
}

impl OperatingPoint {
    pub fn new(device: &DeviceParams, f_p: f64, pump_amp: f64) -> Self {
        let c = critical_params(device);
        let p = tone_power(f_p, pump_amp);
        OperatingPoint {
            f_p,
            pump_amp,
            normalized: Normalized {
                f_ratio: f_p / c.f_c,
                p_db: to_db(p / c.p_c),
            },
        }
    }

    /// Operating point from f_p/f_c and P_p/P_c (dB).
    pub fn from_normalized(device: &DeviceParams, f_ratio: f64, p_db: f64) -> Self {
        let c = critical_params(device);
        let f_p = f_ratio * c.f_c;
        let amp = tone_amplitude(f_p, c.p_c * from_db(p_db));
        OperatingPoint {
            f_p,
            pump_amp: amp,
            normalized: Normalized { f_ratio, p_db },
        }
    }

    /// Same frequency, different pump amplitude.
    pub fn with_pump_amp(&self, device: &DeviceParams, pump_amp: f64) -> Self {
        OperatingPoint::new(device, self.f_p, pump_amp)
    }

    pub fn detuning(&self, device: &DeviceParams) -> f64 {
        device.detuning(self.f_p)
    }

    pub fn pump_power(&self) -> f64 {
        tone_power(self.f_p, self.pump_amp)
    }
}
