use std::f64::consts::{LN_10, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::amp::{amp_readout, AmpModel};
use super::channel::{apply_loss, LossChannel, Squeezer};
use super::ensemble::{vacuum_ensemble, PhasorEnsemble};
use crate::error::{Error, Result};
use crate::gain::{theta_grid, OperatingPoint};
use crate::model::DeviceParams;

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_N_THETA: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub n_samples: usize,
    pub n_theta: usize,
    pub seed: u64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        MonteCarlo {
            n_samples: DEFAULT_SAMPLES,
            n_theta: DEFAULT_N_THETA,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezeResult {
    pub thetas: Vec<f64>,
    /// σ²_on/σ²_off per θ, dB.
    pub s_db: Vec<f64>,
    pub stderr_db: Vec<f64>,
    pub min_s_db: f64,
    pub min_theta: f64,
    /// Standard error of `min_s_db`.
    pub min_stderr_db: f64,
    pub loss_floor_db: f64,
    pub sq_op: Option<OperatingPoint>,
}

fn centered(x: &[f64]) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let d: Vec<f64> = x.iter().map(|v| v - m).collect();
    let var = d.iter().map(|v| v * v).sum::<f64>() / n;
    (d, var)
}

/// Variance ratio in dB with its delta-method standard error, accounting
/// for the correlation of paired samples.
pub(crate) fn variance_ratio_db(on: &[f64], off: &[f64]) -> Result<(f64, f64)> {
    let (d_on, v_on) = centered(on);
    let (d_off, v_off) = centered(off);
    if !(v_on > 0.0 && v_off > 0.0) {
        return Err(Error::numerical("zero readout variance", 0.0));
    }
    let n = on.len() as f64;
    let u: Vec<f64> = d_on
        .iter()
        .zip(&d_off)
        .map(|(a, b)| a * a / v_on - b * b / v_off)
        .collect();
    let (_, var_u) = centered(&u);
    let scale = 10.0 / LN_10;
    Ok((scale * (v_on / v_off).ln(), scale * (var_u / n).sqrt()))
}

struct Pipeline<'a> {
    loss: &'a LossChannel,
    amp: AmpModel,
    seed: u64,
}

impl Pipeline<'_> {
    fn readouts(&self, squeezed: &PhasorEnsemble, thetas: &[f64]) -> Result<Vec<Vec<f64>>> {
        let lossy = apply_loss(squeezed, self.loss, self.seed);
        thetas
            .par_iter()
            .map(|&th| amp_readout(&lossy, &self.amp, th))
            .collect()
    }
}

/// S(θ) for an arbitrary squeezer. The AMP phase offset is added to the
/// squeezer's amplified-axis angle, so with zero offset θ = 0 reads the
/// amplified quadrature and θ = π/2 the squeezed one.
pub fn squeezing_with(
    squeezer: &Squeezer,
    quanta_scale: f64,
    loss: &LossChannel,
    amp: &AmpModel,
    mc: &MonteCarlo,
) -> Result<SqueezeResult> {
    if mc.n_theta < 2 {
        return Err(Error::domain("need at least two θ points"));
    }
    let vac = vacuum_ensemble(mc.n_samples, mc.seed, quanta_scale)?;
    let thetas = theta_grid(mc.n_theta);
    let pipe = Pipeline {
        loss,
        amp: amp.with_offset(amp.pump_phase_offset + squeezer.amplified_angle()?),
        seed: mc.seed,
    };
    let on = pipe.readouts(&squeezer.apply(&vac)?, &thetas)?;
    let off = pipe.readouts(&vac, &thetas)?;
    let ratios = on
        .iter()
        .zip(&off)
        .map(|(a, b)| variance_ratio_db(a, b))
        .collect::<Result<Vec<_>>>()?;
    let (s_db, stderr_db): (Vec<f64>, Vec<f64>) = ratios.into_iter().unzip();
    let i_min = s_db
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("n_theta ≥ 2");
    Ok(SqueezeResult {
        min_s_db: s_db[i_min],
        min_theta: thetas[i_min],
        min_stderr_db: stderr_db[i_min],
        thetas,
        s_db,
        stderr_db,
        loss_floor_db: loss.floor_db(),
        sq_op: squeezer.operating_point(),
    })
}

/// Quanta scale of the typical half-photon convention: one photon over the
/// bandwidth B = γ/π.
pub fn default_quanta_scale(device: &DeviceParams) -> f64 {
    device.gamma() / PI
}

pub fn squeezing_vs_theta(
    sq_op: &OperatingPoint,
    device: &DeviceParams,
    loss: &LossChannel,
    amp: &AmpModel,
    mc: &MonteCarlo,
) -> Result<SqueezeResult> {
    let sq = Squeezer::Jpa {
        op: *sq_op,
        device: *device,
    };
    squeezing_with(&sq, default_quanta_scale(device), loss, amp, mc)
}

/// One S(θ) curve per operating point, in the given order. All points share
/// the vacuum draws of `mc.seed`.
pub fn squeezing_vs_operating_point(
    ops: &[OperatingPoint],
    device: &DeviceParams,
    loss: &LossChannel,
    amp: &AmpModel,
    mc: &MonteCarlo,
) -> Result<Vec<SqueezeResult>> {
    ops.iter()
        .map(|op| squeezing_vs_theta(op, device, loss, amp, mc))
        .collect()
}

/// Operating points at fixed pump frequency and the given powers relative
/// to the critical power.
pub fn power_cut(device: &DeviceParams, f_ratio: f64, p_dbs: &[f64]) -> Vec<OperatingPoint> {
    p_dbs
        .iter()
        .map(|&p| OperatingPoint::from_normalized(device, f_ratio, p))
        .collect()
}

/// Readout values at one θ binned on a shared grid, squeezer on and off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureHistogram {
    pub theta: f64,
    pub edges: Vec<f64>,
    pub counts_on: Vec<u64>,
    pub counts_off: Vec<u64>,
}

fn bin(x: &[f64], edges: &[f64]) -> Vec<u64> {
    let n_bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[n_bins]);
    let w = (hi - lo) / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for &v in x {
        if v >= lo && v <= hi {
            counts[(((v - lo) / w) as usize).min(n_bins - 1)] += 1;
        }
    }
    counts
}

/// Histograms of the readout at each of `thetas`, with edges spanning ±`span`
/// off-state standard deviations.
pub fn readout_histograms(
    squeezer: &Squeezer,
    quanta_scale: f64,
    loss: &LossChannel,
    amp: &AmpModel,
    mc: &MonteCarlo,
    thetas: &[f64],
    n_bins: usize,
    span: f64,
) -> Result<Vec<QuadratureHistogram>> {
    if n_bins == 0 || !(span > 0.0) {
        return Err(Error::domain("histogram needs bins and a positive span"));
    }
    let vac = vacuum_ensemble(mc.n_samples, mc.seed, quanta_scale)?;
    let pipe = Pipeline {
        loss,
        amp: amp.with_offset(amp.pump_phase_offset + squeezer.amplified_angle()?),
        seed: mc.seed,
    };
    let on = pipe.readouts(&squeezer.apply(&vac)?, thetas)?;
    let off = pipe.readouts(&vac, thetas)?;
    Ok(thetas
        .iter()
        .zip(on.iter().zip(&off))
        .map(|(&theta, (a, b))| {
            let half = span * centered(b).1.sqrt();
            let edges: Vec<f64> = (0..=n_bins)
                .map(|k| -half + 2.0 * half * k as f64 / n_bins as f64)
                .collect();
            QuadratureHistogram {
                theta,
                counts_on: bin(a, &edges),
                counts_off: bin(b, &edges),
                edges,
            }
        })
        .collect())
}
