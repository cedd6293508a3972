use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gain::{signal_response, OperatingPoint};
use crate::model::{DeviceParams, Phasor};

/// Input signal circle and the corresponding output signal locus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasorSweep {
    pub thetas: Vec<f64>,
    pub inputs: Vec<Phasor>,
    pub outputs: Vec<Phasor>,
    pub op: OperatingPoint,
}

/// Probe amplitude carrying half a photon over the bandwidth `bandwidth_hz`
/// (defaults to the linewidth γ/π in Hz): |b_s|² = B/2.
pub fn half_photon_probe(device: &DeviceParams, bandwidth_hz: Option<f64>) -> f64 {
    let b = bandwidth_hz.unwrap_or(device.gamma() / PI);
    (b / 2.0).sqrt()
}

pub fn phasor_sweep(
    op: &OperatingPoint,
    device: &DeviceParams,
    probe_amp: f64,
    n_theta: usize,
) -> Result<PhasorSweep> {
    let r = signal_response(op, device, probe_amp, n_theta)?;
    Ok(PhasorSweep {
        thetas: r.thetas,
        inputs: r.inputs,
        outputs: r.outputs,
        op: *op,
    })
}

/// Magnitude of the `k`-th Fourier coefficient of samples taken on a
/// uniform grid over one period.
pub fn harmonic(values: &[f64], k: usize) -> f64 {
    let n = values.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (j, v) in values.iter().enumerate() {
        let phase = 2.0 * PI * (k * j) as f64 / n;
        re += v * phase.cos();
        im -= v * phase.sin();
    }
    (re * re + im * im).sqrt() / n
}

impl PhasorSweep {
    /// Output coordinates projected on the unit direction `axis`.
    pub fn projection(&self, axis: Phasor) -> Vec<f64> {
        self.outputs
            .iter()
            .map(|p| p.re * axis.re + p.im * axis.im)
            .collect()
    }

    /// Ratio of the third harmonic to the fundamental of the projection on
    /// `axis`; zero for a perfect ellipse.
    pub fn third_harmonic_ratio(&self, axis: Phasor) -> f64 {
        let proj = self.projection(axis);
        let fund = harmonic(&proj, 1);
        if fund == 0.0 {
            return 0.0;
        }
        harmonic(&proj, 3) / fund
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::principal_axes;
    use crate::model::{critical_params, linear_response};

    #[test]
    fn zero_probe_gives_zero_outputs() {
        let dev = DeviceParams::typical();
        let op = OperatingPoint::from_normalized(&dev, 1.0015, -1.0);
        let s = phasor_sweep(&op, &dev, 0.0, 36).unwrap();
        assert!(s.outputs.iter().all(|p| p.norm() == 0.0));
        assert_eq!(s.thetas.len(), 36);
    }

    #[test]
    fn weak_probe_traces_the_linearized_ellipse() {
        let dev = DeviceParams::typical();
        let c = critical_params(&dev);
        // ~9 dB point below the gain maximum at Δ/γ = 1.54
        let f_p = dev.pump_frequency(1.54 * dev.gamma());
        let op = OperatingPoint::new(&dev, f_p, 0.88 * c.b_c);
        let probe = 1e-6 * c.b_c;
        let s = phasor_sweep(&op, &dev, probe, 360).unwrap();
        let j = linear_response(Phasor::new(op.pump_amp, 0.0), op.detuning(&dev), &dev).unwrap();
        let mut err2 = 0.0;
        let mut ref2 = 0.0;
        for (inp, out) in s.inputs.iter().zip(&s.outputs) {
            let v = j * nalgebra::Vector2::new(inp.re, inp.im);
            let lin = Phasor::new(v[0], v[1]);
            err2 += (out - lin).norm_sqr();
            ref2 += lin.norm_sqr();
        }
        assert!((err2 / ref2).sqrt() < 1e-3, "{}", (err2 / ref2).sqrt());
    }

    #[test]
    fn half_photon_probe_bends_the_ellipse_at_peak_gain() {
        let dev = DeviceParams::typical();
        let c = critical_params(&dev);
        let f_p = dev.pump_frequency(1.54 * dev.gamma());
        let op = OperatingPoint::new(&dev, f_p, 0.92 * c.b_c);
        let probe = half_photon_probe(&dev, None);
        let s = phasor_sweep(&op, &dev, probe, 360).unwrap();
        let frame = principal_axes(&s.outputs).unwrap();
        let ratio = s.third_harmonic_ratio(frame.major_axis());
        assert!(ratio > 0.01, "{ratio}");

        let weak = phasor_sweep(&op, &dev, 1e-6 * c.b_c, 360).unwrap();
        let frame = principal_axes(&weak.outputs).unwrap();
        assert!(weak.third_harmonic_ratio(frame.major_axis()) < 1e-3);
    }

    #[test]
    fn harmonic_of_pure_tones() {
        let v: Vec<f64> = (0..64)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / 64.0;
                2.0 * t.cos() + 0.5 * (3.0 * t).sin()
            })
            .collect();
        assert!((harmonic(&v, 1) - 1.0).abs() < 1e-12);
        assert!((harmonic(&v, 3) - 0.25).abs() < 1e-12);
        assert!(harmonic(&v, 2) < 1e-12);
    }
}
