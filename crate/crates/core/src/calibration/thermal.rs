use crate::error::{Error, Result};
use crate::model::{HBAR, K_B};

/// Above this ħω/k_BT the Bose occupancy underflows and 1/2 is returned.
const FROZEN_RATIO: f64 = 700.0;

/// Symmetrized noise spectral density of a thermal mode, in quanta:
/// 1/2 + 1/(exp(ħω/k_BT) − 1).
pub fn thermal_occupancy(temperature: f64, omega: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::domain(format!("temperature must be positive, got {temperature} K")));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!("angular frequency must be positive, got {omega}")));
    }
    let x = HBAR * omega / (K_B * temperature);
    if x > FROZEN_RATIO {
        return Ok(0.5);
    }
    Ok(0.5 + 1.0 / x.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const W7: f64 = 2.0 * PI * 7e9;

    #[test]
    fn quantum_limit() {
        let x: f64 = HBAR * W7 / (K_B * 0.055);
        let s = thermal_occupancy(0.055, W7).unwrap();
        assert!((s - (0.5 + (-x).exp())).abs() < 2.0 * (-2.0 * x).exp());
        assert!(s - 0.5 < 3e-3);
        assert_eq!(thermal_occupancy(1e-6, W7).unwrap(), 0.5);
    }

    #[test]
    fn classical_limit() {
        let s = thermal_occupancy(10.0, W7).unwrap();
        let rj = K_B * 10.0 / (HBAR * W7);
        assert!((s / rj - 1.0).abs() < 0.01);
    }

    #[test]
    fn increasing_in_temperature() {
        let mut last = 0.0;
        for k in 1..200 {
            let s = thermal_occupancy(0.01 * k as f64, W7).unwrap();
            assert!(s > last);
            last = s;
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(thermal_occupancy(0.0, W7).is_err());
        assert!(thermal_occupancy(-1.0, W7).is_err());
        assert!(thermal_occupancy(0.1, 0.0).is_err());
    }
}
