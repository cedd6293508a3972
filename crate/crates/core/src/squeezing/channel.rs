use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ensemble::{gaussian_pairs, PhasorEnsemble, Stream};
use crate::distortion::linearized_axes;
use crate::error::{Error, Result};
use crate::gain::OperatingPoint;
use crate::model::{linear_response, steady_output_with_state, DeviceParams, Jacobian, Phasor};
use crate::units::from_db;

/// Transformation applied by the squeezing JPA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Squeezer {
    /// Pump off: the lossless resonator leaves vacuum statistics unchanged.
    Off,
    /// Exact steady-state map around the pump.
    Jpa {
        op: OperatingPoint,
        device: DeviceParams,
    },
    /// Small-signal Jacobian of the map at the pump.
    Linearized {
        op: OperatingPoint,
        device: DeviceParams,
    },
    /// Symplectic squeezer: amplitude gain √G along `angle`, 1/√G across it.
    Ideal { gain_db: f64, angle: f64 },
}

fn rotation(angle: f64) -> Jacobian {
    let (s, c) = angle.sin_cos();
    Jacobian::new(c, -s, s, c)
}

fn ideal_matrix(gain_db: f64, angle: f64) -> Jacobian {
    let g = from_db(gain_db).sqrt();
    rotation(angle) * Jacobian::new(g, 0.0, 0.0, 1.0 / g) * rotation(-angle)
}

fn apply_matrix(m: &Jacobian, p: Phasor) -> Phasor {
    let v = m * nalgebra::Vector2::new(p.re, p.im);
    Phasor::new(v[0], v[1])
}

fn pump_jacobian(op: &OperatingPoint, device: &DeviceParams) -> Result<Jacobian> {
    linear_response(Phasor::new(op.pump_amp, 0.0), op.detuning(device), device)
}

/// Exact map of signal samples riding on the pump, with the pump output
/// subtracted.
pub(crate) fn jpa_signal_map(
    samples: &[Phasor],
    op: &OperatingPoint,
    device: &DeviceParams,
) -> Result<Vec<Phasor>> {
    let delta = op.detuning(device);
    let pump = Phasor::new(op.pump_amp, 0.0);
    let (pump_out, state) = steady_output_with_state(pump, delta, device)?;
    if state.is_bistable() {
        return Err(Error::Bistable(format!("pump at f_p = {} Hz", op.f_p)));
    }
    samples
        .par_iter()
        .map(|&v| {
            let (out, s) = steady_output_with_state(pump + v, delta, device)?;
            if s.is_bistable() {
                return Err(Error::Bistable(format!(
                    "signal sample drives f_p = {} Hz into the bistable region",
                    op.f_p
                )));
            }
            Ok(out - pump_out)
        })
        .collect()
}

impl Squeezer {
    /// Orientation of the output amplified quadrature, rad.
    pub fn amplified_angle(&self) -> Result<f64> {
        Ok(match self {
            Squeezer::Off => 0.0,
            Squeezer::Ideal { angle, .. } => *angle,
            Squeezer::Jpa { op, device } | Squeezer::Linearized { op, device } => {
                linearized_axes(&pump_jacobian(op, device)?, 1.0).angle - PI / 2.0
            }
        })
    }

    pub fn operating_point(&self) -> Option<OperatingPoint> {
        match self {
            Squeezer::Jpa { op, .. } | Squeezer::Linearized { op, .. } => Some(*op),
            _ => None,
        }
    }

    pub fn apply(&self, ensemble: &PhasorEnsemble) -> Result<PhasorEnsemble> {
        let samples = match self {
            Squeezer::Off => ensemble.samples.clone(),
            Squeezer::Jpa { op, device } => jpa_signal_map(&ensemble.samples, op, device)?,
            Squeezer::Linearized { op, device } => {
                let j = pump_jacobian(op, device)?;
                ensemble.samples.iter().map(|&p| apply_matrix(&j, p)).collect()
            }
            Squeezer::Ideal { gain_db, angle } => {
                let m = ideal_matrix(*gain_db, *angle);
                ensemble.samples.iter().map(|&p| apply_matrix(&m, p)).collect()
            }
        };
        Ok(PhasorEnsemble {
            samples,
            seed: ensemble.seed,
            quanta_scale: ensemble.quanta_scale,
        })
    }
}

/// Squeezes every sample with the exact JPA map at `sq_op`.
pub fn squeeze_state(
    ensemble: &PhasorEnsemble,
    sq_op: &OperatingPoint,
    device: &DeviceParams,
) -> Result<PhasorEnsemble> {
    Squeezer::Jpa {
        op: *sq_op,
        device: *device,
    }
    .apply(ensemble)
}

/// Beamsplitter loss between squeezer and readout amplifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossChannel {
    pub eta_db: f64,
}

impl LossChannel {
    pub fn new(eta_db: f64) -> Result<Self> {
        if !(eta_db >= 0.0) {
            return Err(Error::domain(format!("loss must be ≥ 0 dB, got {eta_db}")));
        }
        Ok(LossChannel { eta_db })
    }

    pub fn lossless() -> Self {
        LossChannel { eta_db: 0.0 }
    }

    /// Power transmissivity t = 10^(−η/10).
    pub fn transmissivity(&self) -> f64 {
        from_db(-self.eta_db)
    }

    /// Lowest S reachable through this channel, dB.
    pub fn floor_db(&self) -> f64 {
        crate::units::to_db(1.0 - self.transmissivity())
    }
}

/// b′ = √t·b + √(1−t)·v with v fresh vacuum drawn from `seed`.
pub fn apply_loss(ensemble: &PhasorEnsemble, loss: &LossChannel, seed: u64) -> PhasorEnsemble {
    let t = loss.transmissivity();
    if t >= 1.0 {
        return ensemble.clone();
    }
    let sigma = (ensemble.quanta_scale / 4.0).sqrt();
    let vac = gaussian_pairs(ensemble.len(), sigma, seed, Stream::Loss, 0);
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    PhasorEnsemble {
        samples: ensemble
            .samples
            .iter()
            .zip(&vac)
            .map(|(b, v)| b * st + v * sr)
            .collect(),
        seed: ensemble.seed,
        quanta_scale: ensemble.quanta_scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gain::OperatingPoint;
    use crate::squeezing::vacuum_ensemble;

    fn var_along(s: &[Phasor], angle: f64) -> f64 {
        let a = Phasor::from_polar(1.0, angle);
        let xs: Vec<f64> = s.iter().map(|p| p.re * a.re + p.im * a.im).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn pump_off_leaves_samples_untouched() {
        let dev = DeviceParams::typical();
        let vac = vacuum_ensemble(2000, 1, dev.gamma() / PI).unwrap();
        let op = OperatingPoint::from_normalized(&dev, 1.0015, 0.0).with_pump_amp(&dev, 0.0);
        let out = squeeze_state(&vac, &op, &dev).unwrap();
        // lossless reflection off the idle resonator only rotates each phasor
        for (a, b) in vac.samples.iter().zip(&out.samples) {
            assert!((a.norm() - b.norm()).abs() < 1e-9 * a.norm().max(1.0));
        }
        assert_eq!(Squeezer::Off.apply(&vac).unwrap(), vac);
    }

    #[test]
    fn linearized_squeezer_preserves_area() {
        let dev = DeviceParams::typical();
        let q = dev.gamma() / PI;
        let vac = vacuum_ensemble(200_000, 3, q).unwrap();
        let op = OperatingPoint::from_normalized(&dev, 1.0015, 0.6);
        let out = Squeezer::Linearized { op, device: dev }.apply(&vac).unwrap();
        let frame = crate::distortion::principal_axes(&out.samples).unwrap();
        let area = frame.sigma_maj * frame.sigma_min;
        assert!((area / (q / 4.0) - 1.0).abs() < 0.01, "{}", area / (q / 4.0));
    }

    #[test]
    fn distortion_penalty_at_peak_gain() {
        // deamplified variance at the gain maximum vs. the above-LMG optimum
        let dev = DeviceParams::typical();
        let c = crate::model::critical_params(&dev);
        let q = dev.gamma() / PI;
        let vac = vacuum_ensemble(50_000, 8, q).unwrap();
        let f_p = dev.pump_frequency(1.54 * dev.gamma());
        let peak = OperatingPoint::new(&dev, f_p, 0.92 * c.b_c);
        let above = OperatingPoint::new(&dev, f_p, 1.0 * c.b_c);
        let v_peak = {
            let out = squeeze_state(&vac, &peak, &dev).unwrap();
            crate::distortion::principal_axes(&out.samples).unwrap().sigma_min.powi(2)
        };
        let v_above = {
            let out = squeeze_state(&vac, &above, &dev).unwrap();
            crate::distortion::principal_axes(&out.samples).unwrap().sigma_min.powi(2)
        };
        assert!(v_peak > v_above, "{v_peak} {v_above}");
    }

    #[test]
    fn loss_limits() {
        let vac = vacuum_ensemble(100_000, 4, 4.0).unwrap();
        assert_eq!(apply_loss(&vac, &LossChannel::lossless(), 9), vac);
        let squeezed = Squeezer::Ideal {
            gain_db: 60.0,
            angle: 0.0,
        }
        .apply(&vac)
        .unwrap();
        // t = 0 leaves only fresh vacuum
        let dark = apply_loss(&squeezed, &LossChannel::new(f64::INFINITY).unwrap(), 9);
        let v = var_along(&dark.samples, 0.0);
        assert!((v - 1.0).abs() < 3.0 * (2.0 / 100_000f64).sqrt());

        let eta = LossChannel::new(1.2).unwrap();
        let lossy = apply_loss(&squeezed, &eta, 9);
        let v = var_along(&lossy.samples, PI / 2.0);
        let expected = (1.0 - eta.transmissivity()) + eta.transmissivity() * 1e-6;
        assert!((v / expected - 1.0).abs() < 3.0 * (2.0 / 100_000f64).sqrt());
        assert!((eta.floor_db() - -6.17).abs() < 0.01, "{}", eta.floor_db());
    }

    #[test]
    fn negative_loss_is_rejected() {
        assert!(LossChannel::new(-0.1).is_err());
        assert!(LossChannel::new(f64::NAN).is_err());
    }
}
