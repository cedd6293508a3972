use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{critical_params, DeviceParams, HBAR};
use crate::units::{from_db, to_db, watts_to_dbm};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

/// Output-chain gain G^O from the integrated noise power P^O = ħωW·G^O·G.
pub fn chain_gain_from_noise(p_out: f64, window_hz: f64, device_gain_db: f64, omega: f64) -> Result<f64> {
    positive("output power", p_out)?;
    positive("integration window", window_hz)?;
    positive("angular frequency", omega)?;
    if !device_gain_db.is_finite() {
        return Err(Error::domain("device gain must be finite"));
    }
    Ok(to_db(p_out / (HBAR * omega * window_hz)) - device_gain_db)
}

/// Transport loss between the two amplifiers, η = G_A^O − G_S^O.
pub fn transport_loss(g_a_out_db: f64, g_s_out_db: f64) -> f64 {
    g_a_out_db - g_s_out_db
}

/// η with its standard uncertainty from independent gain uncertainties.
pub fn transport_loss_with_uncertainty(
    (g_a, sigma_a): (f64, f64),
    (g_s, sigma_s): (f64, f64),
) -> (f64, f64) {
    (transport_loss(g_a, g_s), sigma_a.hypot(sigma_s))
}

/// Input attenuation A^I from a probe seen at both ends, P_out = P_in·G_S^O·A^I.
pub fn input_attenuation(p_probe_out: f64, p_probe_in: f64, g_s_out_db: f64) -> Result<f64> {
    positive("probe output power", p_probe_out)?;
    positive("probe input power", p_probe_in)?;
    Ok(to_db(p_probe_out / p_probe_in) - g_s_out_db)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineBudget {
    pub g_a_out: f64,
    pub g_s_out: f64,
    pub eta_db: f64,
    pub a_in: f64,
}

impl LineBudget {
    pub fn new(g_a_out: f64, g_s_out: f64, a_in: f64) -> Self {
        LineBudget {
            g_a_out,
            g_s_out,
            eta_db: transport_loss(g_a_out, g_s_out),
            a_in,
        }
    }

    pub fn transmissivity(&self) -> f64 {
        from_db(-self.eta_db)
    }
}

/// Critical pump power at the device input and at the generator output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPowerPlanes {
    pub device_dbm: f64,
    pub generator_dbm: f64,
}

pub fn critical_power_planes(device: &DeviceParams, a_in_db: f64) -> CriticalPowerPlanes {
    let device_dbm = watts_to_dbm(critical_params(device).p_c);
    CriticalPowerPlanes {
        device_dbm,
        generator_dbm: device_dbm - a_in_db,
    }
}
