//! Physical constants (CODATA 2018 exact or recommended values).

/// Fundamental constants used by the resonator and noise models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Reduced flux quantum ħ/2e, Wb.
    pub phi0: f64,
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const K_B: f64 = 1.380_649e-23;
pub const E_CHARGE: f64 = 1.602_176_634e-19;
pub const PHI0_REDUCED: f64 = HBAR / (2.0 * E_CHARGE);

pub const CODATA: PhysConstants = PhysConstants {
    hbar: HBAR,
    k_b: K_B,
    phi0: PHI0_REDUCED,
};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_quantum_matches_codata() {
        // h / 2e = 2.067833848e-15 Wb, reduced by 2π.
        let phi0 = 2.067_833_848e-15 / (2.0 * std::f64::consts::PI);
        assert!((CODATA.phi0 - phi0).abs() / phi0 < 1e-9);
    }
}
