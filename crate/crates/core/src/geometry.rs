//! Geometric quantities of an axisymmetric surface `X = (r(z) e^{i theta}, z)`
//! whose generating curve is a graph over the rotation axis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::anisotropy::AnisotropyModel;
use crate::error::{FlowError, Result};
use crate::numerics::{CompensatedSum, QuadratureRule};
use crate::spline::ClampedSpline;

/// A point of the generating curve with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub z: f64,
    pub r: f64,
    pub r_z: f64,
    pub r_zz: f64,
}

impl ProfilePoint {
    pub fn new(z: f64, r: f64, r_z: f64, r_zz: f64) -> Self {
        Self { z, r, r_z, r_zz }
    }

    /// Vertical component of the outward unit normal.
    pub fn nu3(&self) -> f64 {
        -self.r_z / omega(self)
    }
}

/// `sqrt(1 + r_z^2)`, the arc-length element per unit height.
pub fn omega(p: &ProfilePoint) -> f64 {
    p.r_z.hypot(1.0)
}

/// Anisotropic mean curvature of the surface of revolution at `p`:
///
/// ```text
/// Lambda = r_zz / (mu1 w^3) - 1 / (mu2 r w),   w = sqrt(1 + r_z^2)
/// ```
pub fn lambda_pointwise(model: &AnisotropyModel, p: &ProfilePoint) -> Result<f64> {
    if !(p.r > 0.0) {
        return Err(FlowError::DegenerateProfile { z: p.z, r: p.r });
    }
    let w = omega(p);
    let nu3 = -p.r_z / w;
    let mu1 = model.mu1(nu3)?;
    let mu2 = model.mu2(nu3)?;
    Ok(p.r_zz / (mu1 * w * w * w) - 1.0 / (mu2 * p.r * w))
}

/// Integral diagnostics of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    /// `2 pi int r gamma(nu3) w dz`
    pub energy: f64,
    /// `pi int r^2 dz`
    pub volume: f64,
    /// Area-weighted average of the anisotropic mean curvature.
    pub lambda_bar: f64,
    /// `2 pi int (Lambda - lambda_bar)^2 r w dz`
    pub l2_residual: f64,
    /// Surface area `2 pi int r w dz`.
    pub area: f64,
    /// Smallest radius over nodes and quadrature points.
    pub min_radius: f64,
    /// Largest `|r_z|` over nodes and quadrature points.
    pub max_slope: f64,
    /// `sqrt(1 + max_slope^2)`
    pub max_omega: f64,
}

/// Energy, volume, mean anisotropic curvature and its L2 deviation, all from
/// the same composite rule on the spline's intervals.
pub fn integrals(
    model: &AnisotropyModel,
    spline: &ClampedSpline,
    quad: &QuadratureRule,
) -> Result<IntegralReport> {
    let nodes = spline.nodes();
    let points = spline.intervals() * quad.points_per_interval();
    // (weight, Lambda, r w)
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(points);
    let mut energy = CompensatedSum::default();
    let mut volume = CompensatedSum::default();
    let mut area = CompensatedSum::default();
    let mut lambda_area = CompensatedSum::default();

    let (_, mut min_radius) = spline.min_value();
    let mut max_slope = spline.slopes().iter().fold(0.0f64, |m, d| m.max(d.abs()));

    for seg in 0..spline.intervals() {
        let (a, b) = (nodes[seg], nodes[seg + 1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (&x, &wq) in quad.nodes().iter().zip(quad.weights()) {
            let z = mid + half * x;
            let w = half * wq;
            let (r, r_z, r_zz) = spline.eval_segment(seg, z);
            if !(r > 0.0) {
                return Err(FlowError::Pinch { z, r });
            }
            let p = ProfilePoint { z, r, r_z, r_zz };
            let om = omega(&p);
            let lam = lambda_pointwise(model, &p)?;
            let gamma = model.gamma(p.nu3())?;
            let rw = r * om;
            energy.add(w * gamma * rw);
            volume.add(w * r * r);
            area.add(w * rw);
            lambda_area.add(w * lam * rw);
            samples.push((w, lam, rw));
            min_radius = min_radius.min(r);
            max_slope = max_slope.max(r_z.abs());
        }
    }
    if !(min_radius > 0.0) {
        let (i, r) = spline.min_value();
        return Err(FlowError::Pinch { z: nodes[i], r });
    }

    let lambda_bar = lambda_area.value() / area.value();
    let mut l2 = CompensatedSum::default();
    for &(w, lam, rw) in &samples {
        let dev = lam - lambda_bar;
        l2.add(w * dev * dev * rw);
    }

    Ok(IntegralReport {
        energy: 2.0 * PI * energy.value(),
        volume: PI * volume.value(),
        lambda_bar,
        l2_residual: 2.0 * PI * l2.value(),
        area: 2.0 * PI * area.value(),
        min_radius,
        max_slope,
        max_omega: max_slope.hypot(1.0),
    })
}

/// Lower radius bound guaranteed along the flow when the initial surface has
/// `F < gamma(e3) V / d`: returns `c0` with `pi c0^2 = gamma(e3) V / d - F`,
/// or `None` when the inequality fails and no bound is guaranteed.
pub fn pinching_bound(
    model: &AnisotropyModel,
    energy0: f64,
    volume0: f64,
    plate_distance: f64,
) -> Option<f64> {
    let gamma_top = model.gamma(1.0).ok()?;
    let gap = gamma_top * volume0 / plate_distance - energy0;
    (gap >= 0.0).then(|| (gap / PI).sqrt())
}

/// Critical cylinder radius between plates at distance `h`, in the closed
/// form `(h / pi) sqrt(1 + 2 eps)` for the Rapini-Papoular family, i.e.
/// `(h / pi) sqrt(mu2(0) / mu1(0))`.
///
/// See [`linear_stability_radius`] for the radius at which the discrete flow's
/// linearisation about a cylinder actually changes sign.
pub fn stability_threshold(model: &AnisotropyModel, h: f64) -> Result<f64> {
    let ratio = model.inv_mu1(0.0)? / model.inv_mu2(0.0)?;
    Ok(h / PI * ratio.sqrt())
}

/// Radius below which the lowest admissible mode `cos(pi z / h)` grows under
/// the flow linearised about a cylinder: `(h / pi) sqrt(mu1(0) / mu2(0))`.
///
/// The growth rate of that mode is `1 / (mu2(0) R^2) - pi^2 / (mu1(0) h^2)`.
pub fn linear_stability_radius(model: &AnisotropyModel, h: f64) -> Result<f64> {
    let ratio = model.mu1(0.0)? / model.mu2(0.0)?;
    Ok(h / PI * ratio.sqrt())
}

/// Radius of the cylinder of height `h` enclosing `volume`.
pub fn cylinder_radius(volume: f64, h: f64) -> f64 {
    (volume / (PI * h)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::uniform_nodes;

    fn rp(eps: f64) -> AnisotropyModel {
        AnisotropyModel::rapini_papoular(eps).unwrap()
    }

    #[test]
    fn omega_values() {
        let p = |r_z| ProfilePoint::new(0.0, 1.0, r_z, 0.0);
        assert_eq!(omega(&p(0.0)), 1.0);
        assert!((omega(&p(1.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert!((omega(&p(-2.0)) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lambda_examples() {
        let cyl = ProfilePoint::new(0.3, 0.5, 0.0, 0.0);
        assert!((lambda_pointwise(&rp(0.2), &cyl).unwrap() + 2.0).abs() < 1e-15);
        let tilted = ProfilePoint::new(0.3, 1.0, 1.0, 0.0);
        let lam = lambda_pointwise(&AnisotropyModel::isotropic(), &tilted).unwrap();
        assert!((lam + 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let bad = ProfilePoint::new(0.1, 0.0, 0.0, 0.0);
        assert!(matches!(
            lambda_pointwise(&rp(0.2), &bad),
            Err(FlowError::DegenerateProfile { .. })
        ));
    }

    #[test]
    fn sphere_has_constant_lambda() {
        let iso = AnisotropyModel::isotropic();
        for zh in [-0.5, 0.0, 0.5] {
            let r = (1.0f64 - zh * zh).sqrt();
            let p = ProfilePoint::new(zh, r, -zh / r, -1.0 / (r * r * r));
            assert!((lambda_pointwise(&iso, &p).unwrap() + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cylinder_integrals() {
        let nodes = uniform_nodes(20);
        let s = ClampedSpline::interpolate(&nodes, |_| 0.5, 0.0, 0.0).unwrap();
        let quad = QuadratureRule::gauss_legendre(4).unwrap();
        let rep = integrals(&rp(0.2), &s, &quad).unwrap();
        assert!((rep.energy - PI).abs() < 1e-13);
        assert!((rep.volume - PI / 4.0).abs() < 1e-13);
        assert!((rep.lambda_bar + 2.0).abs() < 1e-13);
        assert!(rep.l2_residual < 1e-24);
        assert_eq!(rep.min_radius, 0.5);
        assert_eq!(rep.max_omega, 1.0);
    }

    #[test]
    fn pinch_inside_interval_is_reported() {
        let s = ClampedSpline::fit_clamped(&[0.0, 0.5, 1.0], &[0.1, 0.01, 0.1], 0.0, 0.0).unwrap();
        let mut s2 = s.clone();
        // Force a negative dip between nodes through a steep slope.
        s2 = ClampedSpline::from_parts(s2.nodes().to_vec(), s2.values().to_vec(), vec![0.0, -1.0, 0.0]).unwrap();
        let quad = QuadratureRule::gauss_legendre(4).unwrap();
        assert!(integrals(&rp(0.2), &s, &quad).is_ok());
        assert!(matches!(integrals(&rp(0.2), &s2, &quad), Err(FlowError::Pinch { .. })));
    }

    #[test]
    fn pinching_bound_cases() {
        let m = rp(0.2);
        let c0 = pinching_bound(&m, 4.0 * PI, 4.0 * PI, 1.0).unwrap();
        assert!((c0 - 0.8f64.sqrt()).abs() < 1e-14);
        assert_eq!(pinching_bound(&m, 1.2 * 2.0, 2.0, 1.0), Some(0.0));
        assert_eq!(pinching_bound(&m, 3.5, 0.9847, 1.0), None);
    }

    #[test]
    fn thresholds() {
        assert!((stability_threshold(&rp(0.2), 1.0).unwrap() - 0.3766).abs() < 1e-4);
        assert!((stability_threshold(&rp(0.0), 1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((stability_threshold(&rp(0.4), 1.0).unwrap() - 1.8f64.sqrt() / PI).abs() < 1e-15);
        let lin = linear_stability_radius(&rp(0.2), 1.0).unwrap();
        assert!((lin - 1.0 / (PI * 1.4f64.sqrt())).abs() < 1e-15);
    }
}
