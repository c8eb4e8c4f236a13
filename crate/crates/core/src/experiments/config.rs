use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::anisotropy::AnisotropyModel;
use crate::error::{FlowError, Result};
use crate::spline::{uniform_nodes, ClampedSpline};
use crate::stepper::{FlowState, DEFAULT_PINCH_TOLERANCE};

/// Default bound on `max |r^{k+1} - r^k| / tau` for a state to count as steady.
pub const DEFAULT_STEADY_TOLERANCE: f64 = 1e-6;
/// A profile whose slope exceeds this is treated as a (slope) singularity.
pub const DEFAULT_SLOPE_LIMIT: f64 = 1e3;
/// Upper bound on the number of diagnostic samples per run.
pub const MAX_RECORDS: usize = 1000;

/// Initial generating curve with `r_z = 0` at both plates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialProfile {
    /// Cubic Hermite blend `r0 + (r1 - r0)(3 z^2 - 2 z^3)`.
    Hermite { r0: f64, r1: f64 },
    /// `mean + amplitude cos(wavenumber pi z)`.
    Cosine {
        mean: f64,
        amplitude: f64,
        wavenumber: u32,
    },
}

/// Cubic Hermite profile from `r(0) = r0` to `r(1) = r1` with flat ends.
pub fn hermite_initial(r0: f64, r1: f64) -> Result<InitialProfile> {
    let p = InitialProfile::Hermite { r0, r1 };
    p.validate()?;
    Ok(p)
}

/// Cosine profile `mean + amplitude cos(wavenumber pi z)`; flat at both ends
/// for every integer wavenumber.
pub fn cosine_initial(mean: f64, amplitude: f64, wavenumber: u32) -> Result<InitialProfile> {
    let p = InitialProfile::Cosine {
        mean,
        amplitude,
        wavenumber,
    };
    p.validate()?;
    Ok(p)
}

impl InitialProfile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialProfile::Hermite { r0, r1 } => {
                if !(r0 > 0.0 && r1 > 0.0) || !r0.is_finite() || !r1.is_finite() {
                    return Err(FlowError::Domain(format!(
                        "Hermite radii must be positive, got ({r0}, {r1})"
                    )));
                }
            }
            InitialProfile::Cosine {
                mean, amplitude, ..
            } => {
                if !(amplitude >= 0.0 && mean > amplitude) || !mean.is_finite() {
                    return Err(FlowError::Domain(format!(
                        "cosine profile needs mean > amplitude >= 0, got mean {mean}, amplitude {amplitude}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            InitialProfile::Hermite { r0, r1 } => r0 + (r1 - r0) * z * z * (3.0 - 2.0 * z),
            InitialProfile::Cosine {
                mean,
                amplitude,
                wavenumber,
            } => mean + amplitude * (wavenumber as f64 * PI * z).cos(),
        }
    }

    pub fn eval_d(&self, z: f64) -> f64 {
        match *self {
            InitialProfile::Hermite { r0, r1 } => (r1 - r0) * 6.0 * z * (1.0 - z),
            InitialProfile::Cosine {
                amplitude,
                wavenumber,
                ..
            } => {
                let k = wavenumber as f64 * PI;
                -amplitude * k * (k * z).sin()
            }
        }
    }

    /// Samples the profile on `intervals + 1` uniform nodes and fits a
    /// clamped spline with zero end slopes.
    pub fn to_spline(&self, intervals: usize) -> Result<ClampedSpline> {
        self.validate()?;
        ClampedSpline::interpolate(&uniform_nodes(intervals), |z| self.eval(z), 0.0, 0.0)
    }

    pub fn to_state(&self, intervals: usize) -> Result<FlowState> {
        FlowState::initial(self.to_spline(intervals)?)
    }
}

/// Parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub name: Option<String>,
    pub epsilon: f64,
    /// Number of spline intervals `N`.
    pub intervals: usize,
    pub tau: f64,
    pub horizon: f64,
    pub initial: InitialProfile,
    pub snapshot_times: Vec<f64>,
    pub pinch_tolerance: f64,
    pub steady_tolerance: f64,
    pub slope_limit: f64,
    /// Diagnostics every this many steps; `None` keeps at most
    /// [`MAX_RECORDS`] samples.
    pub record_every: Option<usize>,
    pub quadrature_points: usize,
    /// Set when the horizon, grid or step was chosen freely rather than taken
    /// from one of the reference experiments.
    pub assumed_parameters: bool,
}

impl FlowConfig {
    pub fn new(epsilon: f64, intervals: usize, tau: f64, horizon: f64, initial: InitialProfile) -> Self {
        Self {
            name: None,
            epsilon,
            intervals,
            tau,
            horizon,
            initial,
            snapshot_times: default_snapshot_times(horizon),
            pinch_tolerance: DEFAULT_PINCH_TOLERANCE,
            steady_tolerance: DEFAULT_STEADY_TOLERANCE,
            slope_limit: DEFAULT_SLOPE_LIMIT,
            record_every: None,
            quadrature_points: 4,
            assumed_parameters: false,
        }
    }

    pub fn model(&self) -> Result<AnisotropyModel> {
        AnisotropyModel::rapini_papoular(self.epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        self.model()?;
        if self.intervals < 4 {
            return Err(FlowError::Config(format!("N = {} < 4", self.intervals)));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(FlowError::Config(format!("tau = {} must be positive", self.tau)));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(FlowError::Config(format!("T = {} must be non-negative", self.horizon)));
        }
        if !(self.pinch_tolerance >= 0.0) || !(self.steady_tolerance >= 0.0) || !(self.slope_limit > 0.0) {
            return Err(FlowError::Config("tolerances must be non-negative".into()));
        }
        if self.record_every == Some(0) {
            return Err(FlowError::Config("record interval must be at least one step".into()));
        }
        self.initial.validate()
    }

    /// Number of time steps `K = ceil(T / tau)`.
    pub fn steps(&self) -> usize {
        let k = self.horizon / self.tau;
        (k - 1e-9 * k.max(1.0)).ceil().max(0.0) as usize
    }

    pub fn record_interval(&self) -> usize {
        self.record_every
            .unwrap_or_else(|| self.steps().div_ceil(MAX_RECORDS))
            .max(1)
    }
}

/// `0, T/16, T/8, T/4, T/2, T`.
pub fn default_snapshot_times(horizon: f64) -> Vec<f64> {
    [0.0, 1.0 / 16.0, 0.125, 0.25, 0.5, 1.0]
        .iter()
        .map(|f| f * horizon)
        .collect()
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 7] = ["exp1", "exp2", "exp3", "exp4", "exp5", "exp6", "exp7"];

/// Parameter sets of the seven reference experiments.
pub fn preset(name: &str) -> Result<FlowConfig> {
    let hermite = |r0, r1| InitialProfile::Hermite { r0, r1 };
    let (eps, horizon, n, tau, init, assumed) = match name {
        "exp1" => (0.2, 3.0, 500, 1e-4, hermite(0.7, 0.4), false),
        "exp2" => (0.2, 3.0, 500, 1e-5, hermite(0.4, 0.2), false),
        "exp3" => (0.2, 3.0, 500, 1e-5, hermite(0.3, 0.2), false),
        "exp4" => (0.2, 4.0, 1000, 1e-6, hermite(0.9, 0.1), false),
        "exp5" => (0.4, 4.0, 500, 1e-5, hermite(0.3, 0.2), false),
        "exp6" => (-0.2, 2.0, 500, 1e-4, hermite(0.8, 0.3), false),
        // Horizon, grid and step are not published for this case.
        "exp7" => (
            0.2,
            3.0,
            500,
            1e-4,
            InitialProfile::Cosine {
                mean: 1.0,
                amplitude: 0.25,
                wavenumber: 8,
            },
            true,
        ),
        other => {
            return Err(FlowError::Config(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let mut cfg = FlowConfig::new(eps, n, tau, horizon, init);
    cfg.name = Some(name.to_string());
    cfg.assumed_parameters = assumed;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_profile() {
        let p = hermite_initial(0.7, 0.4).unwrap();
        assert_eq!(p.eval(0.0), 0.7);
        assert!((p.eval(1.0) - 0.4).abs() < 1e-15);
        assert!((p.eval(0.5) - 0.55).abs() < 1e-15);
        assert_eq!(p.eval_d(0.0), 0.0);
        assert_eq!(p.eval_d(1.0), 0.0);
        let c = hermite_initial(0.3, 0.3).unwrap();
        for z in [0.0, 0.2, 0.77, 1.0] {
            assert!((c.eval(z) - 0.3).abs() < 1e-16);
        }
        assert!(hermite_initial(0.0, 0.3).is_err());
    }

    #[test]
    fn cosine_profile() {
        let p = cosine_initial(1.0, 0.25, 8).unwrap();
        assert_eq!(p.eval(0.0), 1.25);
        assert!((p.eval(1.0 / 16.0) - 1.0).abs() < 1e-15);
        assert!((p.eval(1.0 / 32.0) - (1.0 + 0.25 * (PI / 4.0).cos())).abs() < 1e-15);
        assert_eq!(p.eval_d(0.0), 0.0);
        assert!(p.eval_d(1.0).abs() < 1e-13);
        let flat = cosine_initial(1.0, 0.0, 8).unwrap();
        assert_eq!(flat.eval(0.3), 1.0);
        assert!(cosine_initial(0.2, 0.2, 2).is_err());
        assert!(cosine_initial(1.0, -0.1, 2).is_err());
    }

    #[test]
    fn presets_match_published_parameters() {
        let e1 = preset("exp1").unwrap();
        assert_eq!((e1.epsilon, e1.horizon, e1.intervals, e1.tau), (0.2, 3.0, 500, 1e-4));
        assert_eq!(e1.initial, InitialProfile::Hermite { r0: 0.7, r1: 0.4 });
        assert_eq!(preset("exp5").unwrap().epsilon, 0.4);
        assert_eq!(preset("exp6").unwrap().epsilon, -0.2);
        let e4 = preset("exp4").unwrap();
        assert_eq!((e4.intervals, e4.tau, e4.horizon), (1000, 1e-6, 4.0));
        assert!(preset("exp7").unwrap().assumed_parameters);
        assert!(preset("exp8").is_err());
        for name in PRESET_NAMES {
            preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn step_count_and_recording() {
        let e1 = preset("exp1").unwrap();
        assert_eq!(e1.steps(), 30_000);
        assert_eq!(e1.record_interval(), 30);
        assert_eq!(preset("exp4").unwrap().steps(), 4_000_000);
        let mut tiny = e1.clone();
        tiny.horizon = 0.0;
        assert_eq!(tiny.steps(), 0);
        assert_eq!(tiny.record_interval(), 1);
    }

    #[test]
    fn invalid_configs() {
        let mut c = preset("exp1").unwrap();
        c.epsilon = -0.6;
        assert!(c.validate().is_err());
        let mut c = preset("exp1").unwrap();
        c.intervals = 3;
        assert!(c.validate().is_err());
        let mut c = preset("exp1").unwrap();
        c.tau = 0.0;
        assert!(c.validate().is_err());
    }
}
