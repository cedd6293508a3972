use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::channel::jpa_signal_map;
use super::ensemble::{gaussian_pairs, PhasorEnsemble, Stream};
use crate::distortion::linearized_axes;
use crate::error::{Error, Result};
use crate::gain::OperatingPoint;
use crate::model::{linear_response, DeviceParams, Phasor};
use crate::units::from_db;

pub const DEFAULT_AMP_GAIN_DB: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmpKind {
    IdealPhaseSensitive { gain_db: f64 },
    FullJpa { op: OperatingPoint, device: DeviceParams },
}

/// Phase-sensitive readout amplifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmpModel {
    pub kind: AmpKind,
    /// Phase of the amplified quadrature at θ = 0, rad.
    pub pump_phase_offset: f64,
    /// Added noise of the following chain in quanta, injected after the AMP.
    /// One quantum adds `quanta_scale / 2` to the quadrature variance.
    pub hemt_noise_quanta: f64,
}

impl Default for AmpModel {
    fn default() -> Self {
        AmpModel::ideal(DEFAULT_AMP_GAIN_DB)
    }
}

impl AmpModel {
    pub fn ideal(gain_db: f64) -> Self {
        AmpModel {
            kind: AmpKind::IdealPhaseSensitive { gain_db },
            pump_phase_offset: 0.0,
            hemt_noise_quanta: 0.0,
        }
    }

    pub fn full_jpa(op: OperatingPoint, device: DeviceParams) -> Self {
        AmpModel {
            kind: AmpKind::FullJpa { op, device },
            pump_phase_offset: 0.0,
            hemt_noise_quanta: 0.0,
        }
    }

    pub fn with_hemt_noise(mut self, quanta: f64) -> Self {
        self.hemt_noise_quanta = quanta;
        self
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.pump_phase_offset = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hemt_noise_quanta >= 0.0) || !self.hemt_noise_quanta.is_finite() {
            return Err(Error::domain("HEMT noise must be finite and ≥ 0"));
        }
        if !self.pump_phase_offset.is_finite() {
            return Err(Error::domain("AMP phase offset must be finite"));
        }
        if let AmpKind::IdealPhaseSensitive { gain_db } = self.kind {
            if !(gain_db >= 0.0) || !gain_db.is_finite() {
                return Err(Error::domain(format!("AMP gain must be ≥ 0 dB, got {gain_db}")));
            }
        }
        Ok(())
    }
}

/// Amplified-quadrature output of each sample with the SQ–AMP phase at
/// `theta`.
pub fn amp_readout(ensemble: &PhasorEnsemble, amp: &AmpModel, theta: f64) -> Result<Vec<f64>> {
    amp.validate()?;
    let rot = Phasor::from_polar(1.0, -(theta + amp.pump_phase_offset));
    let mut out: Vec<f64> = match amp.kind {
        AmpKind::IdealPhaseSensitive { gain_db } => {
            let g = from_db(gain_db).sqrt();
            ensemble.samples.iter().map(|b| g * (b * rot).re).collect()
        }
        AmpKind::FullJpa { op, device } => {
            let j = linear_response(Phasor::new(op.pump_amp, 0.0), op.detuning(&device), &device)?;
            let axis = Phasor::from_polar(1.0, linearized_axes(&j, 1.0).angle - PI / 2.0);
            let rotated: Vec<Phasor> = ensemble.samples.iter().map(|b| b * rot).collect();
            jpa_signal_map(&rotated, &op, &device)?
                .iter()
                .map(|y| y.re * axis.re + y.im * axis.im)
                .collect()
        }
    };
    if amp.hemt_noise_quanta > 0.0 {
        let sigma = (amp.hemt_noise_quanta * ensemble.quanta_scale / 2.0).sqrt();
        // the chain noise is independent of θ but must be fresh per sample
        let noise = gaussian_pairs(out.len(), sigma, ensemble.seed, Stream::Readout, theta.to_bits());
        for (y, v) in out.iter_mut().zip(&noise) {
            *y += v.re;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeezing::vacuum_ensemble;

    fn var(x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n
    }

    #[test]
    fn ideal_amp_on_vacuum() {
        let n = 100_000;
        let vac = vacuum_ensemble(n, 2, 8.0).unwrap();
        let amp = AmpModel::ideal(20.0);
        let v = var(&amp_readout(&vac, &amp, 0.0).unwrap());
        let expected = 100.0 * 2.0;
        assert!((v / expected - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn readout_is_pi_periodic() {
        let vac = vacuum_ensemble(5000, 2, 1.0).unwrap();
        let amp = AmpModel::ideal(20.0).with_offset(0.3);
        for th in [0.0, 0.7, 2.0] {
            let a = amp_readout(&vac, &amp, th).unwrap();
            let b = amp_readout(&vac, &amp, th + PI).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x + y).abs() < 1e-9 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn full_jpa_amp_rejects_bistable_pump() {
        let dev = DeviceParams::typical();
        let c = crate::model::critical_params(&dev);
        let vac = vacuum_ensemble(1000, 2, dev.gamma() / PI).unwrap();
        let f_p = dev.pump_frequency(2.0 * dev.gamma());
        let op = OperatingPoint::new(&dev, f_p, 1.25f64.sqrt() * c.b_c);
        let amp = AmpModel::full_jpa(op, dev);
        assert!(matches!(amp_readout(&vac, &amp, 0.0), Err(Error::Bistable(_))));
    }

    #[test]
    fn invalid_models_are_rejected() {
        let vac = vacuum_ensemble(1000, 2, 1.0).unwrap();
        assert!(amp_readout(&vac, &AmpModel::ideal(-1.0), 0.0).is_err());
        assert!(amp_readout(&vac, &AmpModel::ideal(20.0).with_hemt_noise(-1.0), 0.0).is_err());
    }
}
