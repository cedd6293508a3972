use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::axes::{linearized_axes, principal_axes, projected_variance, QuadratureFrame};
use super::sweep::{phasor_sweep, PhasorSweep};
use crate::error::{Error, Result};
use crate::gain::{iso_gain_contour, Contour, OperatingPoint, SearchSettings, Side};
use crate::model::{linear_response, DeviceParams, Phasor};
use crate::search::golden_max;
use crate::units::to_db;

/// Which deamplified axis the output variance is projected on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisChoice {
    /// Principal axes of the simulated output cloud.
    #[default]
    OutputCloud,
    /// Singular vectors of the small-signal Jacobian at the pump.
    Linearized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeampResult {
    /// 10·log10(σ²_out/σ²_in)
    pub ratio_db: f64,
    pub op: OperatingPoint,
    /// Direct gain from the same sweep, dB.
    pub gain_db: f64,
    pub sigma2_out: f64,
    pub sigma2_in: f64,
    pub frame: QuadratureFrame,
}

fn sweep_gain(sweep: &PhasorSweep, probe_amp: f64) -> f64 {
    let p_in = probe_amp * probe_amp;
    let mean = sweep.outputs.iter().map(|o| o.norm_sqr() / p_in).sum::<f64>()
        / sweep.outputs.len() as f64;
    to_db((mean + 1.0) / 2.0)
}

pub fn deamp_ratio_with(
    op: &OperatingPoint,
    device: &DeviceParams,
    probe_amp: f64,
    n_theta: usize,
    axis: AxisChoice,
) -> Result<DeampResult> {
    if !(probe_amp > 0.0) {
        return Err(Error::domain("probe amplitude must be positive"));
    }
    if n_theta < 3 {
        return Err(Error::domain("n_theta must be at least 3"));
    }
    let sweep = phasor_sweep(op, device, probe_amp, n_theta)?;
    let frame = match axis {
        AxisChoice::OutputCloud => principal_axes(&sweep.outputs)?,
        AxisChoice::Linearized => {
            let j = linear_response(Phasor::new(op.pump_amp, 0.0), op.detuning(device), device)?;
            linearized_axes(&j, probe_amp)
        }
    };
    let minor = frame.minor_axis();
    let sigma2_out = projected_variance(&sweep.outputs, minor);
    let sigma2_in = projected_variance(&sweep.inputs, minor);
    Ok(DeampResult {
        ratio_db: to_db(sigma2_out / sigma2_in),
        op: *op,
        gain_db: sweep_gain(&sweep, probe_amp),
        sigma2_out,
        sigma2_in,
        frame,
    })
}

/// Deamplification ratio σ²_out/σ²_in on the output cloud's own axes.
pub fn deamp_ratio(
    op: &OperatingPoint,
    device: &DeviceParams,
    probe_amp: f64,
    n_theta: usize,
) -> Result<DeampResult> {
    deamp_ratio_with(op, device, probe_amp, n_theta, AxisChoice::OutputCloud)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourDeamp {
    /// Index of the point in the contour.
    pub index: usize,
    pub side: Side,
    pub result: DeampResult,
}

/// Deamplification at every contour point, in contour order.
pub fn scan_deamp_along_contour(
    contour: &Contour,
    device: &DeviceParams,
    probe_amp: f64,
    n_theta: usize,
) -> Result<Vec<ContourDeamp>> {
    contour
        .points
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            Ok(ContourDeamp {
                index,
                side: p.side,
                result: deamp_ratio(&p.op, device, probe_amp, n_theta)?,
            })
        })
        .collect()
}

/// Best deamplification found over a family of iso-gain contours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalPoint {
    pub target_gain_db: f64,
    pub side: Side,
    pub result: DeampResult,
    /// Every contour scanned, with its deamplification series.
    pub scans: Vec<(Contour, Vec<ContourDeamp>)>,
}

/// Minimizes the deamplification ratio over the union of iso-gain contours:
/// a scan over the contour points followed by a golden-section refinement
/// in pump frequency along the winning branch.
pub fn optimal_point(
    device: &DeviceParams,
    gain_targets: &[f64],
    f_ratios: &[f64],
    probe_amp: f64,
    n_theta: usize,
    search: &SearchSettings,
) -> Result<OptimalPoint> {
    let mut scans = Vec::with_capacity(gain_targets.len());
    for &target in gain_targets {
        let contour = iso_gain_contour(device, target, f_ratios, search)?;
        let deamp = scan_deamp_along_contour(&contour, device, probe_amp, n_theta)?;
        scans.push((contour, deamp));
    }

    let mut best: Option<(usize, usize)> = None;
    for (ci, (_, deamp)) in scans.iter().enumerate() {
        for (pi, d) in deamp.iter().enumerate() {
            let better = match best {
                None => true,
                Some((bc, bp)) => d.result.ratio_db < scans[bc].1[bp].result.ratio_db,
            };
            if better {
                best = Some((ci, pi));
            }
        }
    }
    let (ci, pi) = best.ok_or_else(|| {
        Error::Infeasible("no contour point reachable for the requested gains".into())
    })?;
    let (contour, deamp) = &scans[ci];
    let target = contour.target_gain_db;
    let side = deamp[pi].side;
    let mut result = deamp[pi].result;

    // neighbours on the same branch bracket the refinement
    let branch: Vec<f64> = contour
        .points
        .iter()
        .filter(|p| p.side == side)
        .map(|p| p.op.normalized.f_ratio)
        .collect();
    let f_best = result.op.normalized.f_ratio;
    if side != Side::OnLmg && branch.len() >= 3 {
        let pos = branch.iter().position(|&f| f == f_best).unwrap_or(0);
        let lo = branch[pos.saturating_sub(1)];
        let hi = branch[(pos + 1).min(branch.len() - 1)];
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let eval = |f: f64| -> Result<Option<DeampResult>> {
            let c = iso_gain_contour(device, target, &[f], search)?;
            match c.points.iter().find(|p| p.side == side) {
                Some(p) => Ok(Some(deamp_ratio(&p.op, device, probe_amp, n_theta)?)),
                None => Ok(None),
            }
        };
        if hi > lo {
            let (f_ref, _) = golden_max(
                |f| Ok(eval(f)?.map_or(f64::NEG_INFINITY, |r| -r.ratio_db)),
                lo,
                hi,
                1e-7,
            )?;
            if let Some(r) = eval(f_ref)? {
                if r.ratio_db < result.ratio_db {
                    result = r;
                }
            }
        }
    }
    Ok(OptimalPoint {
        target_gain_db: target,
        side,
        result,
        scans,
    })
}
