use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::thermal::thermal_occupancy;
use crate::error::{Error, Result};
use crate::model::HBAR;
use crate::units::{from_db, to_db};

/// One integrated noise measurement, in quanta at the chain output
/// (power divided by ħωW).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSample {
    pub t_vts: f64,
    pub t_fridge: f64,
    pub psd_out: f64,
}

impl NoiseSample {
    pub fn new(t_vts: f64, t_fridge: f64, psd_out: f64) -> Result<Self> {
        for (name, v) in [("T_vts", t_vts), ("T_fridge", t_fridge), ("psd_out", psd_out)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(NoiseSample {
            t_vts,
            t_fridge,
            psd_out,
        })
    }

    /// From a raw integrated power `watts` over `window_hz` at `omega`.
    pub fn from_power(t_vts: f64, t_fridge: f64, watts: f64, window_hz: f64, omega: f64) -> Result<Self> {
        if !(window_hz > 0.0 && omega > 0.0) {
            return Err(Error::domain("window and frequency must be positive"));
        }
        Self::new(t_vts, t_fridge, watts / (HBAR * omega * window_hz))
    }
}

/// Parameters of the chain noise model
/// S_out = G·(λ·S_in(T_vts) + (1 − λ)·S_in(T_fridge) + N_add).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub chain_gain_db: f64,
    pub lambda: f64,
    pub n_add: f64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if !self.chain_gain_db.is_finite() {
            return Err(Error::domain("chain gain must be finite"));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::domain(format!("λ must lie in [0, 1], got {}", self.lambda)));
        }
        if !(self.n_add >= 0.0) || !self.n_add.is_finite() {
            return Err(Error::domain(format!("N_add must be ≥ 0, got {}", self.n_add)));
        }
        Ok(())
    }

    pub fn eval(&self, t_vts: f64, t_fridge: f64, omega: f64) -> Result<f64> {
        let s_in = thermal_occupancy(t_vts, omega)?;
        let s_f = thermal_occupancy(t_fridge, omega)?;
        Ok(from_db(self.chain_gain_db) * (self.lambda * s_in + (1.0 - self.lambda) * s_f + self.n_add))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub n_add: f64,
    pub lambda: f64,
    pub chain_gain_db: f64,
    pub sigma_n_add: f64,
    pub sigma_lambda: f64,
    pub sigma_chain_gain_db: f64,
    /// Covariance of (ln G, λ, N_add).
    pub covariance: [[f64; 3]; 3],
    /// RMS of the relative residuals.
    pub residual_rms: f64,
    /// Condition number of the column-scaled Jacobian.
    pub condition_number: f64,
    pub ill_conditioned: bool,
    /// λ or N_add sits on its bound at the optimum.
    pub at_bound: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn model(&self) -> NoiseModel {
        NoiseModel {
            chain_gain_db: self.chain_gain_db,
            lambda: self.lambda,
            n_add: self.n_add,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSettings {
    pub max_iter: usize,
    /// Stop when the relative cost decrease falls below this.
    pub cost_rtol: f64,
    pub cond_limit: f64,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings {
            max_iter: 200,
            cost_rtol: 1e-15,
            cond_limit: 1e8,
        }
    }
}

struct Problem {
    s_in: Vec<f64>,
    s_f: Vec<f64>,
    y: Vec<f64>,
}

impl Problem {
    // p = (ln G, λ, N_add); residuals are relative to the data
    fn residuals(&self, p: &Vector3<f64>) -> DVector<f64> {
        let g = p[0].exp();
        DVector::from_iterator(
            self.y.len(),
            (0..self.y.len()).map(|i| g * (p[1] * self.s_in[i] + (1.0 - p[1]) * self.s_f[i] + p[2]) / self.y[i] - 1.0),
        )
    }

    fn jacobian(&self, p: &Vector3<f64>) -> DMatrix<f64> {
        let g = p[0].exp();
        DMatrix::from_fn(self.y.len(), 3, |i, j| {
            let m = p[1] * self.s_in[i] + (1.0 - p[1]) * self.s_f[i] + p[2];
            g * match j {
                0 => m,
                1 => self.s_in[i] - self.s_f[i],
                _ => 1.0,
            } / self.y[i]
        })
    }

    /// Linear least squares for (Gλ, G(1−λ), G·N_add) mapped back to the
    /// model parameters and clamped into bounds.
    fn linear_guess(&self) -> Result<Vector3<f64>> {
        let a = DMatrix::from_fn(self.y.len(), 3, |i, j| {
            [self.s_in[i], self.s_f[i], 1.0][j] / self.y[i]
        });
        let b = DVector::from_element(self.y.len(), 1.0);
        let x = a
            .svd(true, true)
            .solve(&b, 1e-12)
            .map_err(|e| Error::numerical(format!("initial linear solve failed: {e}"), f64::NAN))?;
        let g = x[0] + x[1];
        if !(g > 0.0) {
            return Err(Error::numerical("initial guess has non-positive chain gain", g));
        }
        Ok(Vector3::new(g.ln(), (x[0] / g).clamp(0.0, 1.0), (x[2] / g).max(0.0)))
    }
}

fn project(p: &mut Vector3<f64>) {
    p[1] = p[1].clamp(0.0, 1.0);
    p[2] = p[2].max(0.0);
}

/// Fits the chain noise model by damped Gauss–Newton with λ ∈ [0, 1] and
/// N_add ≥ 0 enforced by projection.
pub fn fit_added_noise(
    data: &[NoiseSample],
    omega: f64,
    init_guess: Option<NoiseModel>,
    settings: &FitSettings,
) -> Result<FitResult> {
    let mut combos: Vec<(u64, u64)> = data
        .iter()
        .map(|s| (s.t_vts.to_bits(), s.t_fridge.to_bits()))
        .collect();
    combos.sort_unstable();
    combos.dedup();
    if combos.len() < 3 {
        return Err(Error::domain("fit needs at least three distinct temperature pairs"));
    }
    let mut prob = Problem {
        s_in: Vec::with_capacity(data.len()),
        s_f: Vec::with_capacity(data.len()),
        y: Vec::with_capacity(data.len()),
    };
    for s in data {
        let s = NoiseSample::new(s.t_vts, s.t_fridge, s.psd_out)?;
        prob.s_in.push(thermal_occupancy(s.t_vts, omega)?);
        prob.s_f.push(thermal_occupancy(s.t_fridge, omega)?);
        prob.y.push(s.psd_out);
    }

    let mut p = match init_guess {
        Some(m) => {
            m.validate()?;
            Vector3::new(from_db(m.chain_gain_db).ln(), m.lambda, m.n_add)
        }
        None => prob.linear_guess()?,
    };
    let mut r = prob.residuals(&p);
    let mut cost = r.norm_squared();
    let mut mu = 1e-3;
    let mut iterations = 0;
    let mut converged = cost == 0.0;
    while !converged && iterations < settings.max_iter {
        iterations += 1;
        let j = prob.jacobian(&p);
        let jtj: Matrix3<f64> = (j.transpose() * &j).fixed_view::<3, 3>(0, 0).into();
        let grad: Vector3<f64> = (j.transpose() * &r).fixed_view::<3, 1>(0, 0).into();
        let mut accepted = false;
        for _ in 0..40 {
            let mut damped = jtj;
            for k in 0..3 {
                damped[(k, k)] += mu * jtj[(k, k)].max(1e-300);
            }
            let Some(step) = damped.lu().solve(&(-grad)) else {
                mu *= 10.0;
                continue;
            };
            let mut trial = p + step;
            project(&mut trial);
            let r_trial = prob.residuals(&trial);
            let c_trial = r_trial.norm_squared();
            if c_trial <= cost {
                let decrease = cost - c_trial;
                converged = decrease <= settings.cost_rtol * cost || (trial - p).norm() <= 1e-15 * p.norm();
                p = trial;
                r = r_trial;
                cost = c_trial;
                mu = (mu / 10.0).max(1e-12);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            // no downhill step at any damping: already at the minimum
            converged = true;
        }
    }
    if !converged {
        return Err(Error::numerical(
            format!("noise fit did not converge in {iterations} iterations (λ = {}, N_add = {})", p[1], p[2]),
            cost,
        ));
    }

    let m = prob.y.len();
    let j = prob.jacobian(&p);
    let scale: Vec<f64> = (0..3).map(|k| j.column(k).norm().max(1e-300)).collect();
    let js = DMatrix::from_fn(m, 3, |i, k| j[(i, k)] / scale[k]);
    let sv = js.singular_values();
    let condition_number = sv.max() / sv.min();
    let dof = m.saturating_sub(3).max(1) as f64;
    let s2 = cost / dof;
    let svd = js.svd(false, true);
    let v_t = svd.v_t.expect("v requested");
    let mut covariance = [[0.0; 3]; 3];
    for (a, row) in covariance.iter_mut().enumerate() {
        for (b, c) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..3 {
                let s = svd.singular_values[k];
                let w = if s > 0.0 { 1.0 / (s * s) } else { f64::INFINITY };
                acc += v_t[(k, a)] * v_t[(k, b)] * w;
            }
            *c = s2 * acc / (scale[a] * scale[b]);
        }
    }
    let sd = |k: usize| covariance[k][k].max(0.0).sqrt();
    Ok(FitResult {
        n_add: p[2],
        lambda: p[1],
        chain_gain_db: to_db(p[0].exp()),
        sigma_n_add: sd(2),
        sigma_lambda: sd(1),
        sigma_chain_gain_db: sd(0) * 10.0 / std::f64::consts::LN_10,
        covariance,
        residual_rms: (cost / m as f64).sqrt(),
        ill_conditioned: !(condition_number <= settings.cond_limit),
        condition_number,
        at_bound: p[1] == 0.0 || p[1] == 1.0 || p[2] == 0.0,
        iterations,
    })
}

/// Model values on every (T_vts, T_fridge) pair, with multiplicative
/// Gaussian noise of relative size `noise_frac`.
pub fn synth_noise_data(
    model: &NoiseModel,
    t_vts: &[f64],
    t_fridge: &[f64],
    omega: f64,
    seed: u64,
    noise_frac: f64,
) -> Result<Vec<NoiseSample>> {
    model.validate()?;
    if !(noise_frac >= 0.0) {
        return Err(Error::domain("noise fraction must be ≥ 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(t_vts.len() * t_fridge.len());
    for &tf in t_fridge {
        for &tv in t_vts {
            let z: f64 = StandardNormal.sample(&mut rng);
            let y = model.eval(tv, tf, omega)? * (1.0 + noise_frac * z);
            out.push(NoiseSample::new(tv, tf, y)?);
        }
    }
    Ok(out)
}

/// Fridge temperatures and VTS sweep used for the reference noise
/// calibration, K.
pub const REFERENCE_FRIDGE_TEMPS: [f64; 3] = [0.05, 0.3, 0.5];

pub fn reference_vts_grid() -> Vec<f64> {
    crate::gain::linspace(0.03, 1.0, 400)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const OMEGA: f64 = 2.0 * PI * 7.0e9;

    fn truth() -> NoiseModel {
        NoiseModel {
            chain_gain_db: 75.3,
            lambda: 0.79,
            n_add: 0.045,
        }
    }

    fn fit(data: &[NoiseSample]) -> FitResult {
        fit_added_noise(data, OMEGA, None, &FitSettings::default()).unwrap()
    }

    #[test]
    fn noiseless_recovery() {
        let d = synth_noise_data(&truth(), &reference_vts_grid(), &REFERENCE_FRIDGE_TEMPS, OMEGA, 1, 0.0).unwrap();
        let f = fit(&d);
        assert!((f.n_add / 0.045 - 1.0).abs() < 1e-3, "{f:?}");
        assert!((f.lambda / 0.79 - 1.0).abs() < 1e-3);
        assert!(!f.ill_conditioned);
        // round trip through the fitted model
        let again = synth_noise_data(&f.model(), &reference_vts_grid(), &REFERENCE_FRIDGE_TEMPS, OMEGA, 1, 0.0).unwrap();
        for (a, b) in d.iter().zip(&again) {
            assert!((a.psd_out / b.psd_out - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_parameters_are_reachable() {
        let m = NoiseModel {
            chain_gain_db: 70.0,
            lambda: 1.0,
            n_add: 0.0,
        };
        let d = synth_noise_data(&m, &reference_vts_grid(), &REFERENCE_FRIDGE_TEMPS, OMEGA, 1, 0.0).unwrap();
        let f = fit(&d);
        assert!((f.lambda - 1.0).abs() < 1e-9 && f.n_add.abs() < 1e-9, "{f:?}");
        assert!(f.at_bound);
    }

    #[test]
    fn single_fridge_temperature_is_degenerate() {
        let d = synth_noise_data(&truth(), &reference_vts_grid(), &[0.05], OMEGA, 3, 0.005).unwrap();
        let f = fit_added_noise(&d, OMEGA, Some(truth()), &FitSettings::default()).unwrap();
        assert!(f.ill_conditioned, "{}", f.condition_number);
        let three = fit(&synth_noise_data(&truth(), &reference_vts_grid(), &REFERENCE_FRIDGE_TEMPS, OMEGA, 3, 0.005).unwrap());
        assert!(f.sigma_lambda > 100.0 * three.sigma_lambda);
    }

    #[test]
    fn model_increases_with_vts_temperature() {
        let m = truth();
        let mut last = 0.0;
        for &t in &reference_vts_grid() {
            let v = m.eval(t, 0.3, OMEGA).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn curves_are_ordered_by_fridge_temperature() {
        let d = synth_noise_data(&truth(), &[0.03], &REFERENCE_FRIDGE_TEMPS, OMEGA, 0, 0.0).unwrap();
        assert!(d[0].psd_out < d[1].psd_out && d[1].psd_out < d[2].psd_out);
    }

    #[test]
    fn synthesis_is_deterministic() {
        let a = synth_noise_data(&truth(), &reference_vts_grid(), &REFERENCE_FRIDGE_TEMPS, OMEGA, 9, 0.005).unwrap();
        let b = synth_noise_data(&truth(), &reference_vts_grid(), &REFERENCE_FRIDGE_TEMPS, OMEGA, 9, 0.005).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_few_points() {
        let d = synth_noise_data(&truth(), &[0.1, 0.2], &[0.05], OMEGA, 0, 0.0).unwrap();
        assert!(fit_added_noise(&d, OMEGA, None, &FitSettings::default()).is_err());
    }
}
