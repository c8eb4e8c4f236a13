//! Rotationally symmetric surface energy densities and their Wulff shapes.
//!
//! The energy density depends on the normal only through its vertical
//! component `nu3`. For the Rapini-Papoular family
//!
//! ```text
//! gamma(nu3) = 1 + eps * nu3^2
//! ```
//!
//! the principal curvatures of the Wulff shape (inward normal) follow from
//!
//! ```text
//! 1/mu2 = gamma - nu3 * gamma'
//! 1/mu1 = (1 - nu3^2) * gamma'' + 1/mu2
//! ```
//!
//! `mu1` weights the meridian curvature of an evolving surface and `mu2` the
//! parallel (azimuthal) curvature.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

/// Lower end of the open interval of `eps` giving a uniformly convex Wulff shape.
pub const CONVEX_EPSILON_MIN: f64 = -0.5;
/// Upper end of the open interval of `eps` giving a uniformly convex Wulff shape.
pub const CONVEX_EPSILON_MAX: f64 = 1.0;

const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnisotropyKind {
    /// `gamma = 1 + epsilon * nu3^2`.
    RapiniPapoular { epsilon: f64 },
    /// `gamma = 1`; identical to `RapiniPapoular { epsilon: 0 }`.
    Isotropic,
}

/// Surface energy density `gamma(nu3)` together with its Wulff-shape curvatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyModel {
    kind: AnisotropyKind,
    #[serde(skip)]
    convex: Option<bool>,
}

impl AnisotropyModel {
    /// Rapini-Papoular density, rejecting any `epsilon` whose Wulff shape is not
    /// uniformly convex.
    pub fn rapini_papoular(epsilon: f64) -> Result<Self> {
        let model = Self::from_kind_unchecked(AnisotropyKind::RapiniPapoular { epsilon });
        if !epsilon.is_finite() || !model.check_convexity() {
            return Err(FlowError::InvalidModel { epsilon });
        }
        Ok(model)
    }

    pub fn isotropic() -> Self {
        Self::from_kind_unchecked(AnisotropyKind::Isotropic)
    }

    /// Builds a model without the convexity check. Useful for probing the
    /// structural conditions; the curvature accessors still refuse to evaluate
    /// on a non-convex model.
    pub fn from_kind_unchecked(kind: AnisotropyKind) -> Self {
        let mut model = Self { kind, convex: None };
        model.convex = Some(model.scan_convexity());
        model
    }

    pub fn kind(&self) -> AnisotropyKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        match self.kind {
            AnisotropyKind::RapiniPapoular { epsilon } => epsilon,
            AnisotropyKind::Isotropic => 0.0,
        }
    }

    /// Energy density `gamma(nu3)`.
    pub fn gamma(&self, nu3: f64) -> Result<f64> {
        check_nu3(nu3)?;
        Ok(1.0 + self.epsilon() * nu3 * nu3)
    }

    /// `d gamma / d nu3`.
    pub fn gamma_d1(&self, nu3: f64) -> Result<f64> {
        check_nu3(nu3)?;
        Ok(2.0 * self.epsilon() * nu3)
    }

    /// `d^2 gamma / d nu3^2`.
    pub fn gamma_d2(&self, nu3: f64) -> Result<f64> {
        check_nu3(nu3)?;
        Ok(2.0 * self.epsilon())
    }

    /// `1/mu2 = gamma - nu3 gamma'`, without the convexity check.
    pub fn inv_mu2(&self, nu3: f64) -> Result<f64> {
        Ok(self.gamma(nu3)? - nu3 * self.gamma_d1(nu3)?)
    }

    /// `1/mu1 = (1 - nu3^2) gamma'' + 1/mu2`, without the convexity check.
    pub fn inv_mu1(&self, nu3: f64) -> Result<f64> {
        Ok((1.0 - nu3 * nu3) * self.gamma_d2(nu3)? + self.inv_mu2(nu3)?)
    }

    /// Wulff-shape curvature weighting the meridian curvature.
    pub fn mu1(&self, nu3: f64) -> Result<f64> {
        self.require_convex()?;
        Ok(1.0 / self.inv_mu1(nu3)?)
    }

    /// Wulff-shape curvature weighting the parallel curvature.
    pub fn mu2(&self, nu3: f64) -> Result<f64> {
        self.require_convex()?;
        Ok(1.0 / self.inv_mu2(nu3)?)
    }

    /// `d mu1 / d nu3 = 6 eps nu3 mu1^2` for the Rapini-Papoular family.
    pub fn mu1_d1(&self, nu3: f64) -> Result<f64> {
        let mu1 = self.mu1(nu3)?;
        Ok(6.0 * self.epsilon() * nu3 * mu1 * mu1)
    }

    /// Uniform convexity of the Wulff shape: both `1/mu1` and `1/mu2` strictly
    /// positive on `[-1, 1]`.
    ///
    /// Both reciprocals are affine in `nu3^2`, so their minima sit at
    /// `nu3 = 0` or `|nu3| = 1`.
    pub fn check_convexity(&self) -> bool {
        self.convex.unwrap_or_else(|| self.scan_convexity())
    }

    fn scan_convexity(&self) -> bool {
        let eps = self.epsilon();
        if !eps.is_finite() {
            return false;
        }
        [0.0, 1.0].iter().all(|&nu3| {
            matches!(self.inv_mu1(nu3), Ok(v) if v > 0.0)
                && matches!(self.inv_mu2(nu3), Ok(v) if v > 0.0)
        })
    }

    /// Curvature condition `nu3 * d mu1/d nu3 >= 0` for all `nu3`; the
    /// generating curve of the Wulff shape has non-decreasing curvature
    /// moving upwards. For Rapini-Papoular this reduces to `eps >= 0`.
    pub fn check_curvature_condition(&self) -> bool {
        // nu3 * mu1' = 6 eps nu3^2 mu1^2 and mu1^2 > 0 on a convex model.
        self.check_convexity() && self.epsilon() >= 0.0
    }

    /// Cahn-Hoffman map `xi1(nu) = nu / mu2 + gamma'(nu3) E3`.
    pub fn cahn_hoffman(&self, nu: [f64; 3]) -> Result<[f64; 3]> {
        let norm = nu.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
            return Err(FlowError::Domain(format!(
                "Cahn-Hoffman map needs a unit normal, got |nu| = {norm}"
            )));
        }
        let nu3 = nu[2].clamp(-1.0, 1.0);
        let inv_mu2 = self.inv_mu2(nu3)?;
        let g1 = self.gamma_d1(nu3)?;
        Ok([inv_mu2 * nu[0], inv_mu2 * nu[1], inv_mu2 * nu[2] + g1])
    }

    fn require_convex(&self) -> Result<()> {
        if self.check_convexity() {
            Ok(())
        } else {
            Err(FlowError::InvalidModel {
                epsilon: self.epsilon(),
            })
        }
    }
}

fn check_nu3(nu3: f64) -> Result<()> {
    if nu3.abs() <= 1.0 {
        Ok(())
    } else {
        Err(FlowError::Domain(format!("nu3 = {nu3} outside [-1, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(eps: f64) -> AnisotropyModel {
        AnisotropyModel::rapini_papoular(eps).unwrap()
    }

    #[test]
    fn gamma_values() {
        assert_eq!(rp(0.2).gamma(0.0).unwrap(), 1.0);
        assert!((rp(0.2).gamma(1.0).unwrap() - 1.2).abs() < 1e-15);
        assert!((rp(-0.2).gamma(0.5).unwrap() - 0.95).abs() < 1e-15);
    }

    #[test]
    fn gamma_derivatives() {
        assert_eq!(rp(0.2).gamma_d1(0.0).unwrap(), 0.0);
        assert!((rp(0.2).gamma_d1(1.0).unwrap() - 0.4).abs() < 1e-15);
        for nu3 in [-1.0, -0.3, 0.0, 0.7] {
            assert!((rp(-0.2).gamma_d2(nu3).unwrap() + 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_nu3_is_rejected() {
        let m = rp(0.2);
        assert!(matches!(m.gamma(1.5), Err(FlowError::Domain(_))));
        assert!(m.gamma_d1(-1.0001).is_err());
        assert!(m.mu1(f64::NAN).is_err());
    }

    #[test]
    fn wulff_curvatures() {
        let iso = AnisotropyModel::isotropic();
        for nu3 in [-1.0, 0.0, 0.4] {
            assert_eq!(iso.mu1(nu3).unwrap(), 1.0);
            assert_eq!(iso.mu2(nu3).unwrap(), 1.0);
        }
        let m = rp(0.2);
        assert!((m.mu2(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((m.mu1(0.0).unwrap() - 1.0 / 1.4).abs() < 1e-15);
        assert!((m.mu1(1.0).unwrap() - 1.25).abs() < 1e-14);
        assert!((m.mu2(1.0).unwrap() - 1.25).abs() < 1e-14);
    }

    #[test]
    fn convexity_window() {
        assert!(rp(0.2).check_convexity());
        assert!(rp(0.6).check_convexity());
        let edge = AnisotropyModel::from_kind_unchecked(AnisotropyKind::RapiniPapoular {
            epsilon: -0.5,
        });
        assert!(!edge.check_convexity());
        assert!(matches!(
            AnisotropyModel::rapini_papoular(-0.5),
            Err(FlowError::InvalidModel { .. })
        ));
        assert!(AnisotropyModel::rapini_papoular(1.0).is_err());
        assert!(AnisotropyModel::rapini_papoular(f64::NAN).is_err());
        assert!(matches!(edge.mu1(0.0), Err(FlowError::InvalidModel { .. })));
    }

    #[test]
    fn curvature_condition_sign() {
        assert!(AnisotropyModel::isotropic().check_curvature_condition());
        assert!(rp(0.0).check_curvature_condition());
        assert!(rp(0.2).check_curvature_condition());
        assert!(!rp(-0.2).check_curvature_condition());
    }

    #[test]
    fn cahn_hoffman_values() {
        let iso = AnisotropyModel::isotropic();
        assert_eq!(iso.cahn_hoffman([1.0, 0.0, 0.0]).unwrap(), [1.0, 0.0, 0.0]);
        let m = rp(0.2);
        let top = m.cahn_hoffman([0.0, 0.0, 1.0]).unwrap();
        assert!(top[0].abs() < 1e-15 && top[1].abs() < 1e-15);
        assert!((top[2] - 1.2).abs() < 1e-14);
        assert_eq!(m.cahn_hoffman([1.0, 0.0, 0.0]).unwrap(), [1.0, 0.0, 0.0]);
        assert!(m.cahn_hoffman([1.0, 1.0, 0.0]).is_err());
    }
}
