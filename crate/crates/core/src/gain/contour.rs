use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lmg::{lmg_point, LmgPoint, SearchSettings};
use super::operating::OperatingPoint;
use crate::error::{Error, Result};
use crate::model::DeviceParams;
use crate::search::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    BelowLmg,
    OnLmg,
    AboveLmg,
}

impl Side {
    pub fn label(&self) -> &'static str {
        match self {
            Side::BelowLmg => "below_lmg",
            Side::OnLmg => "on_lmg",
            Side::AboveLmg => "above_lmg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub op: OperatingPoint,
    pub side: Side,
    /// Gain recomputed at the returned point, dB.
    pub gain_db: f64,
}

/// Level set of direct gain. Points run along the below-LMG branch with
/// increasing frequency, then back along the above-LMG branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub target_gain_db: f64,
    pub points: Vec<ContourPoint>,
    /// Frequencies (f_p/f_c) where the target exceeds the attainable gain.
    pub omitted_f_ratios: Vec<f64>,
}

impl Contour {
    pub fn branch(&self, side: Side) -> impl Iterator<Item = &ContourPoint> {
        self.points.iter().filter(move |p| p.side == side)
    }

    /// (below, above) pairs sharing a pump frequency.
    pub fn pairs(&self) -> Vec<(&ContourPoint, &ContourPoint)> {
        self.branch(Side::BelowLmg)
            .filter_map(|b| {
                self.branch(Side::AboveLmg)
                    .find(|a| a.op.f_p == b.op.f_p)
                    .map(|a| (b, a))
            })
            .collect()
    }
}

/// Tolerance within which the LMG maximum counts as touching the target.
const TOUCH_DB: f64 = 0.05;

enum Crossing {
    Missing,
    Touch(ContourPoint),
    Pair(ContourPoint, ContourPoint),
}

fn crossings_at(
    device: &DeviceParams,
    target: f64,
    f_ratio: f64,
    s: &SearchSettings,
) -> Result<Crossing> {
    let peak: LmgPoint = lmg_point(device, f_ratio, s)?;
    if peak.gain_db < target - TOUCH_DB || !peak.gain_db.is_finite() {
        return Ok(Crossing::Missing);
    }
    if peak.gain_db <= target + TOUCH_DB {
        return Ok(Crossing::Touch(ContourPoint {
            op: peak.op,
            side: Side::OnLmg,
            gain_db: peak.gain_db,
        }));
    }
    let p_peak = peak.op.normalized.p_db;
    let level = |p: f64| Ok(s.gain_at(device, f_ratio, p)? - target);

    let p_low = p_peak - 40.0;
    let below = bisect(level, p_low, p_peak, s.gain_tol_db, s.p_db_tol())?;

    let mut p_high = p_peak;
    loop {
        p_high += 3.0;
        if level(p_high)? < 0.0 {
            break;
        }
        if p_high > p_peak + 40.0 {
            return Err(Error::Infeasible(format!(
                "gain stays above {target} dB far above the LMG at f_p/f_c = {f_ratio}"
            )));
        }
    }
    let above = bisect(level, p_peak, p_high, s.gain_tol_db, s.p_db_tol())?;

    let point = |p: f64, side| -> Result<ContourPoint> {
        Ok(ContourPoint {
            op: OperatingPoint::from_normalized(device, f_ratio, p),
            side,
            gain_db: s.gain_at(device, f_ratio, p)?,
        })
    };
    Ok(Crossing::Pair(
        point(below, Side::BelowLmg)?,
        point(above, Side::AboveLmg)?,
    ))
}

/// Iso-gain contour through the given pump frequencies (as f_p/f_c).
/// Frequencies where the target is unreachable are skipped with a warning.
pub fn iso_gain_contour(
    device: &DeviceParams,
    target_gain_db: f64,
    f_ratios: &[f64],
    s: &SearchSettings,
) -> Result<Contour> {
    if !(target_gain_db > 0.0) {
        return Err(Error::domain("target gain must be positive"));
    }
    let mut sorted = f_ratios.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let found: Vec<Result<Crossing>> = sorted
        .par_iter()
        .map(|&f| crossings_at(device, target_gain_db, f, s))
        .collect();

    let mut below = Vec::new();
    let mut above = Vec::new();
    let mut omitted = Vec::new();
    for (c, &f) in found.into_iter().zip(&sorted) {
        match c? {
            Crossing::Missing => {
                warn!("{target_gain_db} dB is not reachable at f_p/f_c = {f}; omitted");
                omitted.push(f);
            }
            Crossing::Touch(p) => below.push(p),
            Crossing::Pair(b, a) => {
                below.push(b);
                above.push(a);
            }
        }
    }
    above.reverse();
    below.extend(above);
    Ok(Contour {
        target_gain_db,
        points: below,
        omitted_f_ratios: omitted,
    })
}

/// Fixed-frequency cut through the LMG, sampled where the gain on either
/// side equals each of `gains_db`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCut {
    pub f_ratio: f64,
    pub lmg: LmgPoint,
    /// Below-LMG crossings by increasing pump power.
    pub below: Vec<ContourPoint>,
    /// Above-LMG crossings by increasing pump power.
    pub above: Vec<ContourPoint>,
}

impl PowerCut {
    /// All points by increasing pump power, LMG included.
    pub fn points(&self) -> Vec<ContourPoint> {
        let mut out = self.below.clone();
        out.push(ContourPoint {
            op: self.lmg.op,
            side: Side::OnLmg,
            gain_db: self.lmg.gain_db,
        });
        out.extend(self.above.iter().copied());
        out
    }
}

pub fn power_cut_through_lmg(
    device: &DeviceParams,
    f_ratio: f64,
    gains_db: &[f64],
    s: &SearchSettings,
) -> Result<PowerCut> {
    let lmg = lmg_point(device, f_ratio, s)?;
    let mut gains = gains_db.to_vec();
    gains.sort_by(|a, b| a.total_cmp(b));
    let mut below = Vec::new();
    let mut above = Vec::new();
    for g in gains {
        match crossings_at(device, g, f_ratio, s)? {
            Crossing::Pair(b, a) => {
                below.push(b);
                above.push(a);
            }
            _ => {
                return Err(Error::Infeasible(format!(
                    "{g} dB is not reached on both sides of the LMG at f_p/f_c = {f_ratio}"
                )))
            }
        }
    }
    // higher gain sits closer to the LMG on both branches
    above.reverse();
    Ok(PowerCut {
        f_ratio,
        lmg,
        below,
        above,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gain::map::linspace;

    #[test]
    fn power_cut_is_ordered() {
        let dev = DeviceParams::typical();
        let s = SearchSettings {
            n_theta: 64,
            ..SearchSettings::default_for(&dev)
        };
        let cut = power_cut_through_lmg(&dev, 1.0015, &[12.0, 8.0], &s).unwrap();
        let pts = cut.points();
        assert_eq!(pts.len(), 5);
        for w in pts.windows(2) {
            assert!(w[1].op.pump_amp > w[0].op.pump_amp);
        }
        assert!(power_cut_through_lmg(&dev, 1.0015, &[30.0], &s).is_err());
    }

    #[test]
    fn eight_db_contour() {
        let dev = DeviceParams::typical();
        let s = SearchSettings {
            n_theta: 64,
            ..SearchSettings::default_for(&dev)
        };
        let f = linspace(1.0005, 1.004, 8);
        let c = iso_gain_contour(&dev, 8.0, &f, &s).unwrap();
        assert!(!c.points.is_empty());
        for p in &c.points {
            assert!((p.gain_db - 8.0).abs() < 0.05, "{p:?}");
            assert!(p.op.normalized.f_ratio > 1.0);
        }
        let pairs = c.pairs();
        assert!(!pairs.is_empty());
        for (b, a) in pairs {
            assert!(a.op.pump_amp > b.op.pump_amp);
        }
    }

    #[test]
    fn unreachable_frequencies_are_omitted() {
        let dev = DeviceParams::typical();
        let s = SearchSettings {
            n_theta: 32,
            ..SearchSettings::default_for(&dev)
        };
        let c = iso_gain_contour(&dev, 30.0, &[1.004], &s).unwrap();
        assert!(c.points.is_empty());
        assert_eq!(c.omitted_f_ratios, vec![1.004]);
    }

    #[test]
    fn branches_close_towards_the_turning_frequency() {
        let dev = DeviceParams::typical();
        let s = SearchSettings {
            n_theta: 32,
            ..SearchSettings::default_for(&dev)
        };
        let f = linspace(1.004, 1.006, 12);
        let c = iso_gain_contour(&dev, 10.0, &f, &s).unwrap();
        assert!(!c.omitted_f_ratios.is_empty());
        let gaps: Vec<f64> = c
            .pairs()
            .iter()
            .map(|(b, a)| a.op.normalized.p_db - b.op.normalized.p_db)
            .collect();
        assert!(gaps.len() >= 3, "{gaps:?}");
        // pairs are ordered by increasing frequency, moving away from f_c
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "{gaps:?}");
        }
    }
}
