//! Fast self-checks run by `wulff-flow check`.

use std::f64::consts::PI;

use crate::anisotropy::AnisotropyModel;
use crate::error::Result;
use crate::geometry::{integrals, lambda_pointwise, stability_threshold, ProfilePoint};
use crate::numerics::QuadratureRule;
use crate::spline::{uniform_nodes, ClampedSpline};
use crate::stepper::{step, FlowState};

use super::config::hermite_initial;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = (&'static str, fn() -> Result<(bool, String)>);

const CHECKS: [Check; 7] = [
    ("quadrature exactness (n = 2..5)", quadrature_exactness),
    ("spline cubic reproduction and C2 continuity", spline_cubic),
    ("cylinder fixed point", cylinder_fixed_point),
    ("isotropic sphere curvature", sphere_lambda),
    ("Hermite initial volumes", hermite_volumes),
    ("stability threshold number", threshold_number),
    ("Wulff curvatures positive on convex range", convex_range),
];

pub fn run_checks() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => CheckResult { name, passed, detail },
            Err(e) => CheckResult {
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}

fn quadrature_exactness() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 2..=5usize {
        let rule = QuadratureRule::gauss_legendre(n)?;
        for deg in 0..2 * n as i32 {
            let got = rule.integrate(|z| z.powi(deg), &[0.0, 0.5, 1.0])?;
            worst = worst.max((got - 1.0 / (deg as f64 + 1.0)).abs());
        }
    }
    Ok((worst < 1e-14, format!("max error {worst:.2e}")))
}

fn spline_cubic() -> Result<(bool, String)> {
    let p = |z: f64| 0.3 - z + 2.0 * z * z - 0.7 * z * z * z;
    let dp = |z: f64| -1.0 + 4.0 * z - 2.1 * z * z;
    let s = ClampedSpline::interpolate(&uniform_nodes(17), p, dp(0.0), dp(1.0))?;
    let mut err: f64 = 0.0;
    for i in 0..=200 {
        let z = i as f64 / 200.0;
        err = err.max((s.eval(z)? - p(z)).abs());
    }
    let jump = s.max_curvature_jump();
    Ok((err < 1e-10 && jump < 1e-10, format!("value error {err:.2e}, S'' jump {jump:.2e}")))
}

fn cylinder_fixed_point() -> Result<(bool, String)> {
    let quad = QuadratureRule::gauss_legendre(4)?;
    let mut worst: f64 = 0.0;
    for eps in [-0.2, 0.0, 0.2, 0.4] {
        let model = AnisotropyModel::rapini_papoular(eps)?;
        for radius in [0.3, 0.5, 1.0] {
            let state = FlowState::initial(ClampedSpline::interpolate(&uniform_nodes(40), |_| radius, 0.0, 0.0)?)?;
            for tau in [1e-3, 1e-4] {
                let next = step(&model, &state, tau, &quad, 0.0, 0.0)?;
                for v in next.spline.values() {
                    worst = worst.max((v - radius).abs());
                }
            }
        }
    }
    Ok((worst <= 1e-11, format!("max nodal change {worst:.2e}")))
}

fn sphere_lambda() -> Result<(bool, String)> {
    let iso = AnisotropyModel::isotropic();
    let mut worst: f64 = 0.0;
    for zh in [-0.5, 0.0, 0.5] {
        let r = (1.0f64 - zh * zh).sqrt();
        let p = ProfilePoint::new(zh, r, -zh / r, -1.0 / (r * r * r));
        worst = worst.max((lambda_pointwise(&iso, &p)? + 2.0).abs());
    }
    Ok((worst <= 1e-12, format!("max |Lambda + 2| {worst:.2e}")))
}

fn hermite_volumes() -> Result<(bool, String)> {
    let model = AnisotropyModel::rapini_papoular(0.2)?;
    let quad = QuadratureRule::gauss_legendre(4)?;
    let v1 = integrals(&model, &hermite_initial(0.7, 0.4)?.to_spline(500)?, &quad)?.volume;
    let v2 = integrals(&model, &hermite_initial(0.4, 0.2)?.to_spline(500)?, &quad)?.volume;
    let ok = (v1 - 0.9847).abs() < 5e-5 && (v2 - 0.2980).abs() < 5e-5;
    Ok((ok, format!("V = {v1:.5}, {v2:.5}")))
}

fn threshold_number() -> Result<(bool, String)> {
    let r = stability_threshold(&AnisotropyModel::rapini_papoular(0.2)?, 1.0)?;
    Ok(((r - 0.3766).abs() <= 1e-4, format!("r* = {r:.6} (1/pi = {:.6})", 1.0 / PI)))
}

fn convex_range() -> Result<(bool, String)> {
    let mut ok = true;
    for i in 0..=100 {
        let eps = -0.49 + 1.48 * i as f64 / 100.0;
        let m = AnisotropyModel::rapini_papoular(eps)?;
        for j in 0..=50 {
            let nu3 = -1.0 + 2.0 * j as f64 / 50.0;
            ok &= m.mu1(nu3)? > 0.0 && m.mu2(nu3)? > 0.0;
        }
    }
    Ok((ok, "eps in [-0.49, 0.99]".into()))
}
