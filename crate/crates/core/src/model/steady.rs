//! Steady-state response of the driven Kerr resonator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cubic::real_roots;
use super::device::DeviceParams;
use crate::error::{Error, Result};

/// Complex field amplitude in √(photons/s); |b|² is a photon flux.
pub type Phasor = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Monostable,
    /// Three steady states exist; the low-amplitude one reached by ramping
    /// the drive up from zero is selected.
    LowBranchOfBistable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// Selected intracavity photon number.
    pub n: f64,
    /// All non-negative real roots, ascending.
    pub all_roots: Vec<f64>,
    pub branch: Branch,
    /// Effective detuning Δ + K n, rad/s.
    pub delta_eff: f64,
}

impl SteadyState {
    pub fn is_bistable(&self) -> bool {
        self.branch == Branch::LowBranchOfBistable
    }
}

/// Residual of the photon-number cubic in photon units.
pub fn cubic_residual(n: f64, delta: f64, device: &DeviceParams, flux: f64) -> f64 {
    let k = device.kerr();
    let g = device.gamma();
    n * n * n + 2.0 * delta / k * n * n + (delta * delta + g * g) / (k * k) * n
        - 2.0 * g / (k * k) * flux
}

/// Residual of the dimensionless cubic w((w − d)² + 1) − p, where
/// w = |K|n/γ, d = −sgn(K)Δ/γ and p = 2|K||b|²/γ².
pub fn reduced_residual(n: f64, delta: f64, device: &DeviceParams, flux: f64) -> f64 {
    let w = n * device.kerr().abs() / device.gamma();
    let d = device.reduced_detuning(delta);
    w * ((w - d) * (w - d) + 1.0) - device.reduced_drive(flux)
}

/// Solves n((Δ + K n)² + γ²) = 2γ|b_in|² for the intracavity photon number.
pub fn solve_photon_number(
    delta: f64,
    device: &DeviceParams,
    input_power_flux: f64,
) -> Result<SteadyState> {
    if !(input_power_flux >= 0.0) || !input_power_flux.is_finite() {
        return Err(Error::domain(format!(
            "input flux must be non-negative and finite, got {input_power_flux}"
        )));
    }
    if !delta.is_finite() {
        return Err(Error::domain("detuning must be finite"));
    }
    if input_power_flux == 0.0 {
        return Ok(SteadyState {
            n: 0.0,
            all_roots: vec![0.0],
            branch: Branch::Monostable,
            delta_eff: delta,
        });
    }

    // Reduced form: w((w − d)² + 1) = p with w = |K| n / γ.
    let d = device.reduced_detuning(delta);
    let p = device.reduced_drive(input_power_flux);
    let ws = real_roots(-2.0 * d, d * d + 1.0, -p);

    let all_roots: Vec<f64> = ws
        .iter()
        .map(|&w| device.photons_from_reduced(w.max(0.0)))
        .collect();
    for &n in &all_roots {
        check_residual(n, delta, device, input_power_flux)?;
    }
    let branch = if all_roots.len() == 3 && ws[0] < ws[1] && ws[1] < ws[2] {
        Branch::LowBranchOfBistable
    } else {
        Branch::Monostable
    };
    let n = all_roots[0];
    Ok(SteadyState {
        n,
        all_roots,
        branch,
        delta_eff: delta + device.kerr() * n,
    })
}

fn check_residual(n: f64, delta: f64, device: &DeviceParams, flux: f64) -> Result<()> {
    let k = device.kerr();
    let g = device.gamma();
    let residual = cubic_residual(n, delta, device, flux);
    // scale by the largest term so that rounding in the evaluation itself
    // never trips the check
    let scale = [
        n * n * n,
        (2.0 * delta / k * n * n).abs(),
        (delta * delta + g * g) / (k * k) * n,
        2.0 * g / (k * k) * flux,
        1.0,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if residual.abs() > 1e-10 * scale {
        return Err(Error::numerical(
            format!("photon-number root {n} failed to converge"),
            residual,
        ));
    }
    Ok(())
}

/// Reflection coefficient (iX − γ)/(iX + γ) for an effective detuning X.
pub fn reflection(delta_eff: f64, gamma: f64) -> Complex64 {
    let num = Complex64::new(-gamma, delta_eff);
    let den = Complex64::new(gamma, delta_eff);
    num / den
}

/// Output field for the input `b_in`, evaluated on the low-amplitude branch.
pub fn steady_output(b_in: Phasor, delta: f64, device: &DeviceParams) -> Result<Phasor> {
    Ok(steady_output_with_state(b_in, delta, device)?.0)
}

pub fn steady_output_with_state(
    b_in: Phasor,
    delta: f64,
    device: &DeviceParams,
) -> Result<(Phasor, SteadyState)> {
    let state = solve_photon_number(delta, device, b_in.norm_sqr())?;
    let out = b_in * reflection(state.delta_eff, device.gamma());
    Ok((out, state))
}

/// Real 2×2 Jacobian of the input–output map, acting on (Re, Im).
pub type Jacobian = nalgebra::Matrix2<f64>;

/// Analytic linear response of the output to a small change of the input
/// around `b_in`.
pub fn linear_response(b_in: Phasor, delta: f64, device: &DeviceParams) -> Result<Jacobian> {
    let state = solve_photon_number(delta, device, b_in.norm_sqr())?;
    let g = device.gamma();
    let k = device.kerr();
    let x = state.delta_eff;
    let n = state.n;
    let r = reflection(x, g);
    // dn/d|b|² from implicit differentiation of n((Δ+Kn)² + γ²) = 2γ|b|²
    let dn_dflux = 2.0 * g / (x * x + g * g + 2.0 * k * n * x);
    let den = Complex64::new(g, x);
    let dr_dx = Complex64::new(0.0, 2.0 * g) / (den * den);
    let c = dr_dx * k * dn_dflux;
    // δ|b|² = 2 Re(b̄ δb)
    let col_re = r + b_in * c * (2.0 * b_in.re);
    let col_im = Complex64::i() * r + b_in * c * (2.0 * b_in.im);
    Ok(Jacobian::new(col_re.re, col_im.re, col_re.im, col_im.im))
}
