use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Jacobian, Phasor};

/// Principal axes of a 2-D point cloud. `angle` is the orientation of the
/// deamplified (minor) axis in [0, π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureFrame {
    pub angle: f64,
    pub sigma_maj: f64,
    pub sigma_min: f64,
    /// Both eigenvalues agree to rounding; `angle` is then arbitrary.
    pub isotropic: bool,
}

impl QuadratureFrame {
    /// Unit vector along the deamplified axis.
    pub fn minor_axis(&self) -> Phasor {
        Phasor::from_polar(1.0, self.angle)
    }

    /// Unit vector along the amplified axis.
    pub fn major_axis(&self) -> Phasor {
        Phasor::from_polar(1.0, self.angle - PI / 2.0)
    }
}

pub(crate) fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Population mean and covariance (xx, yy, xy).
pub fn covariance(points: &[Phasor]) -> (Phasor, f64, f64, f64) {
    let n = points.len() as f64;
    let mean = points.iter().sum::<Phasor>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = p - mean;
        sxx += d.re * d.re;
        syy += d.im * d.im;
        sxy += d.re * d.im;
    }
    (mean, sxx / n, syy / n, sxy / n)
}

/// Eigen-decomposition of the covariance of `points` about their mean.
pub fn principal_axes(points: &[Phasor]) -> Result<QuadratureFrame> {
    if points.len() < 3 {
        return Err(Error::domain("principal axes need at least 3 points"));
    }
    let (_, sxx, syy, sxy) = covariance(points);
    let half_tr = 0.5 * (sxx + syy);
    let half_diff = 0.5 * (sxx - syy);
    let rad = half_diff.hypot(sxy);
    let l_max = half_tr + rad;
    let l_min = (half_tr - rad).max(0.0);
    if !(l_max > 0.0) {
        return Err(Error::domain("degenerate point cloud: all points coincide"));
    }
    let isotropic = rad <= 1e-12 * l_max;
    let major = 0.5 * sxy.atan2(half_diff);
    Ok(QuadratureFrame {
        angle: normalize_angle(major + PI / 2.0),
        sigma_maj: l_max.sqrt(),
        sigma_min: l_min.sqrt(),
        isotropic,
    })
}

/// Axes of the ellipse J·(unit circle) scaled by `radius`, from the SVD of
/// the Jacobian.
pub fn linearized_axes(j: &Jacobian, radius: f64) -> QuadratureFrame {
    let svd = j.svd(true, false);
    let u = svd.u.expect("u requested");
    let (imax, imin) = if svd.singular_values[0] >= svd.singular_values[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let minor = u.column(imin);
    let s = radius / 2f64.sqrt();
    QuadratureFrame {
        angle: normalize_angle(minor[1].atan2(minor[0])),
        sigma_maj: svd.singular_values[imax] * s,
        sigma_min: svd.singular_values[imin] * s,
        isotropic: (svd.singular_values[0] - svd.singular_values[1]).abs()
            <= 1e-12 * svd.singular_values[imax],
    }
}

/// Population variance of the points projected on the unit direction `axis`.
pub fn projected_variance(points: &[Phasor], axis: Phasor) -> f64 {
    let n = points.len() as f64;
    let proj: Vec<f64> = points
        .iter()
        .map(|p| p.re * axis.re + p.im * axis.im)
        .collect();
    let mean = proj.iter().sum::<f64>() / n;
    proj.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gain::theta_grid;

    #[test]
    fn circle_is_isotropic() {
        let pts: Vec<Phasor> = theta_grid(360)
            .into_iter()
            .map(|t| Phasor::from_polar(1.0, t))
            .collect();
        let f = principal_axes(&pts).unwrap();
        assert!(f.isotropic);
        assert!((f.sigma_maj - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((f.sigma_min - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn line_at_thirty_degrees() {
        let dir = Phasor::from_polar(1.0, PI / 6.0);
        let pts: Vec<Phasor> = (0..11).map(|k| dir * (k as f64 - 5.0)).collect();
        let f = principal_axes(&pts).unwrap();
        assert!(f.sigma_min < 1e-7);
        assert!((f.angle - 2.0 * PI / 3.0).abs() < 1e-12, "{}", f.angle);
        assert!(!f.isotropic);
    }

    #[test]
    fn degenerate_clouds_are_rejected() {
        assert!(principal_axes(&[Phasor::new(1.0, 1.0); 5]).is_err());
        assert!(principal_axes(&[Phasor::new(1.0, 1.0), Phasor::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn projected_variance_of_discrete_circle() {
        let pts: Vec<Phasor> = theta_grid(7)
            .into_iter()
            .map(|t| Phasor::from_polar(3.0, t))
            .collect();
        for a in [0.0, 0.3, 1.1] {
            let v = projected_variance(&pts, Phasor::from_polar(1.0, a));
            assert!((v - 4.5).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipse_axes_agree_with_jacobian_svd() {
        let j = Jacobian::new(2.0, 0.7, -0.4, 0.9);
        let pts: Vec<Phasor> = theta_grid(360)
            .into_iter()
            .map(|t| {
                let v = nalgebra::Vector2::new(t.cos(), t.sin());
                let w = j * v;
                Phasor::new(w[0], w[1])
            })
            .collect();
        let cloud = principal_axes(&pts).unwrap();
        let lin = linearized_axes(&j, 1.0);
        let da = (cloud.angle - lin.angle).abs();
        assert!(da.min(PI - da) < 1e-9);
        assert!((cloud.sigma_min - lin.sigma_min).abs() < 1e-12);
        assert!((cloud.sigma_maj - lin.sigma_maj).abs() < 1e-12);
    }
}
