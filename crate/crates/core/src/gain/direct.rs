use std::f64::consts::PI;

use num_complex::Complex64;

use super::operating::OperatingPoint;
use crate::error::{Error, Result};
use crate::model::{steady_output_with_state, DeviceParams, Phasor};
use crate::units::to_db;

/// Input and output signal phasors for a probe circling the pump.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalResponse {
    pub thetas: Vec<f64>,
    /// b_s,in e^{iθ}
    pub inputs: Vec<Phasor>,
    /// b_out(θ) − b_p,out
    pub outputs: Vec<Phasor>,
}

/// Uniform phase grid 2πk/n.
pub fn theta_grid(n_theta: usize) -> Vec<f64> {
    (0..n_theta)
        .map(|k| 2.0 * PI * k as f64 / n_theta as f64)
        .collect()
}

/// Runs the exact map for every probe phase. Fails if the pump, or any
/// pump+probe input, lies in the bistable region.
pub fn signal_response(
    op: &OperatingPoint,
    device: &DeviceParams,
    probe_amp: f64,
    n_theta: usize,
) -> Result<SignalResponse> {
    if n_theta == 0 {
        return Err(Error::domain("n_theta must be positive"));
    }
    if !(probe_amp >= 0.0) {
        return Err(Error::domain("probe amplitude must be non-negative"));
    }
    let delta = op.detuning(device);
    let pump = Phasor::new(op.pump_amp, 0.0);
    let (pump_out, pump_state) = steady_output_with_state(pump, delta, device)?;
    if pump_state.is_bistable() {
        return Err(Error::Bistable(format!(
            "pump at f_p = {} Hz, P/P_c = {:.4} dB",
            op.f_p, op.normalized.p_db
        )));
    }
    let thetas = theta_grid(n_theta);
    let mut inputs = Vec::with_capacity(n_theta);
    let mut outputs = Vec::with_capacity(n_theta);
    for &theta in &thetas {
        let sig = Complex64::from_polar(probe_amp, theta);
        let (out, state) = steady_output_with_state(pump + sig, delta, device)?;
        if state.is_bistable() {
            return Err(Error::Bistable(format!(
                "probe phase {theta:.4} rad drives f_p = {} Hz into the bistable region",
                op.f_p
            )));
        }
        inputs.push(sig);
        outputs.push(out - pump_out);
    }
    Ok(SignalResponse {
        thetas,
        inputs,
        outputs,
    })
}

/// Phase-averaged signal power gain (⟨G_θ⟩ + 1)/2 in dB.
pub fn direct_gain(
    op: &OperatingPoint,
    device: &DeviceParams,
    probe_amp: f64,
    n_theta: usize,
) -> Result<f64> {
    if n_theta < 8 {
        return Err(Error::domain("n_theta must be at least 8"));
    }
    if !(probe_amp > 0.0) {
        return Err(Error::domain("probe amplitude must be positive"));
    }
    if op.pump_amp > 0.0 && probe_amp > op.pump_amp {
        return Err(Error::domain(format!(
            "probe amplitude {probe_amp} exceeds pump amplitude {}",
            op.pump_amp
        )));
    }
    let resp = signal_response(op, device, probe_amp, n_theta)?;
    let p_in = probe_amp * probe_amp;
    let mean_g = resp.outputs.iter().map(|o| o.norm_sqr() / p_in).sum::<f64>() / n_theta as f64;
    Ok(to_db((mean_g + 1.0) / 2.0))
}

/// Small-signal direct gain from the linearized map (dB).
pub fn linear_gain(op: &OperatingPoint, device: &DeviceParams) -> Result<f64> {
    let j = crate::model::linear_response(
        Phasor::new(op.pump_amp, 0.0),
        op.detuning(device),
        device,
    )?;
    // mean of |J u|² over unit vectors u is ‖J‖²_F / 2
    let mean_g = j.norm_squared() / 2.0;
    Ok(to_db((mean_g + 1.0) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{critical_params, steady_output};

    fn typical_op(p_db: f64) -> (DeviceParams, OperatingPoint) {
        let dev = DeviceParams::typical();
        let op = OperatingPoint::from_normalized(&dev, 1.0015, p_db);
        (dev, op)
    }

    #[test]
    fn no_pump_means_no_gain() {
        let dev = DeviceParams::typical();
        let op = OperatingPoint::from_normalized(&dev, 1.0015, 0.0).with_pump_amp(&dev, 0.0);
        let g = direct_gain(&op, &dev, 1e3, 360).unwrap();
        assert!(g.abs() < 1e-12, "{g}");
    }

    #[test]
    fn probe_larger_than_pump_is_rejected() {
        let (dev, op) = typical_op(-3.0);
        let err = direct_gain(&op, &dev, 2.0 * op.pump_amp, 360).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(direct_gain(&op, &dev, 1.0, 4).is_err());
    }

    #[test]
    fn bistable_pump_is_flagged() {
        let dev = DeviceParams::typical();
        let c = critical_params(&dev);
        let f_p = dev.pump_frequency(2.0 * dev.gamma());
        let op = OperatingPoint::new(&dev, f_p, (1.25f64).sqrt() * c.b_c);
        let err = direct_gain(&op, &dev, 1e-4 * c.b_c, 360).unwrap_err();
        assert!(matches!(err, Error::Bistable(_)));
    }

    #[test]
    fn weak_probe_gain_matches_finite_difference_jacobian() {
        let (dev, op) = typical_op(-1.0);
        let c = critical_params(&dev);
        let g = direct_gain(&op, &dev, 1e-6 * c.b_c, 360).unwrap();
        // independent oracle: central differences of the full map
        let delta = op.detuning(&dev);
        let pump = Phasor::new(op.pump_amp, 0.0);
        let h = 1e-6 * c.b_c;
        let mut frob = 0.0;
        for dir in [Phasor::new(h, 0.0), Phasor::new(0.0, h)] {
            let d = (steady_output(pump + dir, delta, &dev).unwrap()
                - steady_output(pump - dir, delta, &dev).unwrap())
                / (2.0 * h);
            frob += d.norm_sqr();
        }
        let oracle = to_db((frob / 2.0 + 1.0) / 2.0);
        assert!((g - oracle).abs() < 0.01, "{g} vs {oracle}");
        let lin = linear_gain(&op, &dev).unwrap();
        assert!((g - lin).abs() < 0.01, "{g} vs {lin}");
    }

    #[test]
    fn gain_vs_pump_amplitude_has_one_interior_peak() {
        let dev = DeviceParams::typical();
        let c = critical_params(&dev);
        let f_p = dev.pump_frequency(1.54 * dev.gamma());
        let gains: Vec<f64> = (1..=120)
            .map(|k| {
                let op = OperatingPoint::new(&dev, f_p, k as f64 * 0.015 * c.b_c);
                direct_gain(&op, &dev, 1e-4 * c.b_c, 360).unwrap()
            })
            .collect();
        let slopes: Vec<f64> = gains.windows(2).map(|w| w[1] - w[0]).collect();
        let sign_changes = slopes
            .windows(2)
            .filter(|s| s[0] > 0.0 && s[1] <= 0.0 || s[0] <= 0.0 && s[1] > 0.0)
            .count();
        assert_eq!(sign_changes, 1, "{gains:?}");
        let peak = gains
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(peak > 0 && peak < gains.len() - 1);
        assert!(gains.iter().all(|&g| g >= 0.0));
    }
}
