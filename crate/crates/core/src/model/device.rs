use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::constants::CODATA;
use crate::error::{Error, Result};

/// SQUID-array geometry of the resonator inductance. Kept as metadata unless
/// the Kerr constant is derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquidGeometry {
    /// Number of SQUIDs in the series array.
    pub n_squids: u32,
    /// Critical current of each junction, A.
    pub critical_current: f64,
    /// Shunt capacitance, F.
    pub capacitance: f64,
    /// Coupling capacitance, F.
    pub coupling_capacitance: f64,
}

/// Kerr constant K = −ħω₀² / (16 N_s φ₀ I_c) in rad/s.
pub fn kerr_constant(n_squids: u32, critical_current: f64, omega0: f64) -> Result<f64> {
    if n_squids < 1 {
        return Err(Error::domain("SQUID count must be at least 1"));
    }
    if !(critical_current > 0.0) || !critical_current.is_finite() {
        return Err(Error::domain("critical current must be positive"));
    }
    if !(omega0 > 0.0) || !omega0.is_finite() {
        return Err(Error::domain("resonance frequency must be positive"));
    }
    Ok(-CODATA.hbar * omega0 * omega0
        / (16.0 * f64::from(n_squids) * CODATA.phi0 * critical_current))
}

/// Driven Kerr resonator described by its bare resonance, field decay rate
/// and Kerr constant (all angular, rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    omega0: f64,
    gamma: f64,
    kerr: f64,
    squid: Option<SquidGeometry>,
}

impl DeviceParams {
    pub fn new(omega0: f64, gamma: f64, kerr: f64) -> Result<Self> {
        let dev = DeviceParams {
            omega0,
            gamma,
            kerr,
            squid: None,
        };
        dev.validate()?;
        Ok(dev)
    }

    /// Device whose Kerr constant is computed from the SQUID geometry.
    pub fn from_geometry(omega0: f64, gamma: f64, squid: SquidGeometry) -> Result<Self> {
        let kerr = kerr_constant(squid.n_squids, squid.critical_current, omega0)?;
        let dev = DeviceParams {
            omega0,
            gamma,
            kerr,
            squid: Some(squid),
        };
        dev.validate()?;
        Ok(dev)
    }

    /// Attach geometry metadata to an existing device; the geometry must
    /// reproduce the device's Kerr constant.
    pub fn with_geometry(mut self, squid: SquidGeometry) -> Result<Self> {
        self.squid = Some(squid);
        self.validate()?;
        Ok(self)
    }

    /// Builds a device from frequencies in Hz: resonance `f0`, linewidth
    /// `gamma/2π` and the ratio K/γ.
    pub fn from_hz(f0: f64, gamma_hz: f64, kerr_over_gamma: f64) -> Result<Self> {
        let gamma = 2.0 * PI * gamma_hz;
        DeviceParams::new(2.0 * PI * f0, gamma, kerr_over_gamma * gamma)
    }

    /// The "typical array JPA" parameters: γ = 2π×54.5 MHz, K/γ = −8.3e-4, Q = 65.
    pub fn typical() -> Self {
        let gamma = 2.0 * PI * 54.5e6;
        DeviceParams {
            omega0: 2.0 * 65.0 * gamma,
            gamma,
            kerr: -8.3e-4 * gamma,
            squid: None,
        }
    }

    /// The typical device with its resonance tuned so that the critical pump
    /// frequency lands on `f_c` (Hz).
    pub fn typical_tuned_to_critical(f_c: f64) -> Result<Self> {
        let base = DeviceParams::typical();
        DeviceParams::new(
            2.0 * PI * f_c + 3f64.sqrt() * base.gamma,
            base.gamma,
            base.kerr,
        )
    }

    fn validate(&self) -> Result<()> {
        if !self.omega0.is_finite() || self.omega0 <= 0.0 {
            return Err(Error::domain("omega0 must be positive and finite"));
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 {
            return Err(Error::domain("gamma must be positive and finite"));
        }
        if !self.kerr.is_finite() || self.kerr == 0.0 {
            return Err(Error::domain("kerr must be finite and non-zero"));
        }
        if self.quality_factor() <= 1.0 {
            return Err(Error::domain(format!(
                "quality factor {} must exceed 1",
                self.quality_factor()
            )));
        }
        if let Some(g) = self.squid {
            let k = kerr_constant(g.n_squids, g.critical_current, self.omega0)?;
            if ((k - self.kerr) / k).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "kerr {} disagrees with SQUID geometry value {}",
                    self.kerr, k
                )));
            }
        }
        Ok(())
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kerr(&self) -> f64 {
        self.kerr
    }

    pub fn squid_geometry(&self) -> Option<&SquidGeometry> {
        self.squid.as_ref()
    }

    pub fn quality_factor(&self) -> f64 {
        self.omega0 / (2.0 * self.gamma)
    }

    /// Detuning Δ = ω₀ − ω_p for a pump at `f_p` Hz.
    pub fn detuning(&self, f_p: f64) -> f64 {
        self.omega0 - 2.0 * PI * f_p
    }

    /// Pump frequency (Hz) for a detuning Δ.
    pub fn pump_frequency(&self, delta: f64) -> f64 {
        (self.omega0 - delta) / (2.0 * PI)
    }

    /// Copy of the device with the sign of K flipped.
    pub fn mirrored(&self) -> Self {
        DeviceParams {
            kerr: -self.kerr,
            squid: None,
            ..*self
        }
    }

    /// Sign-folded reduced detuning: bistability occurs for values above √3
    /// whatever the sign of K.
    pub(crate) fn reduced_detuning(&self, delta: f64) -> f64 {
        -self.kerr.signum() * delta / self.gamma
    }

    /// Reduced drive strength 2|K||b|²/γ².
    pub(crate) fn reduced_drive(&self, flux: f64) -> f64 {
        2.0 * self.kerr.abs() * flux / (self.gamma * self.gamma)
    }

    /// Photon number for a reduced intracavity variable w = |K|n/γ.
    pub(crate) fn photons_from_reduced(&self, w: f64) -> f64 {
        w * self.gamma / self.kerr.abs()
    }
}

/// Bifurcation point of the driven resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalParams {
    /// Critical detuning, rad/s.
    pub delta_c: f64,
    /// Critical drive amplitude, √(photons/s).
    pub b_c: f64,
    /// Intracavity photon number at the critical point.
    pub n_c: f64,
    /// Critical pump frequency, Hz.
    pub f_c: f64,
    /// Critical pump power at the device input, W.
    pub p_c: f64,
}

impl CriticalParams {
    /// Pump angular frequency at the critical point.
    pub fn omega_c(&self) -> f64 {
        2.0 * PI * self.f_c
    }
}

pub fn critical_params(device: &DeviceParams) -> CriticalParams {
    let gamma = device.gamma();
    let k = device.kerr().abs();
    let delta_c_mag = 3f64.sqrt() * gamma;
    // The bifurcation sits on the side of resonance where the Kerr shift
    // pulls the effective frequency towards the pump.
    let delta_c = -device.kerr().signum() * delta_c_mag;
    let b_c2 = 4.0 * gamma * gamma / (3.0 * 3f64.sqrt() * k);
    let n_c = 2.0 * delta_c_mag / (3.0 * k);
    let f_c = device.pump_frequency(delta_c);
    let p_c = CODATA.hbar * 2.0 * PI * f_c * b_c2;
    CriticalParams {
        delta_c,
        b_c: b_c2.sqrt(),
        n_c,
        f_c,
        p_c,
    }
}
