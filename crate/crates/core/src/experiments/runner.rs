use serde::{Deserialize, Serialize};

use super::config::FlowConfig;
use crate::error::{FlowError, Result};
use crate::geometry::{integrals, IntegralReport};
use crate::numerics::QuadratureRule;
use crate::stepper::{FlowState, Stepper};

/// Largest `max |r_z|` a final state may have to count as a cylinder.
pub const CYLINDER_SLOPE_TOLERANCE: f64 = 1e-4;
/// Largest `l2_residual / energy` a final state may have to count as a cylinder.
pub const CYLINDER_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Outcome {
    /// Converged to a cylinder; radius is the mean nodal radius.
    SteadyCylinder { radius: f64 },
    /// Radius fell below the pinch tolerance (or the slope blew up).
    Pinched { time: f64, z: f64 },
    HorizonReached,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::SteadyCylinder { .. } => "SteadyCylinder",
            Outcome::Pinched { .. } => "Pinched",
            Outcome::HorizonReached => "HorizonReached",
        }
    }
}

/// Nodal profile at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub r_z: Vec<f64>,
}

impl Snapshot {
    fn of(state: &FlowState) -> Self {
        Self {
            time: state.time,
            z: state.spline.nodes().to_vec(),
            r: state.spline.values().to_vec(),
            r_z: state.spline.slopes().to_vec(),
        }
    }
}

/// Diagnostic time series of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub volume: Vec<f64>,
    pub lambda_bar: Vec<f64>,
    pub l2_residual: Vec<f64>,
    pub min_radius: Vec<f64>,
    pub max_slope: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub outcome: Outcome,
    pub steps_taken: usize,
    /// Final state (the last state before a pinch).
    pub final_state: Option<FlowState>,
}

impl RunHistory {
    pub fn empty() -> Self {
        Self {
            times: Vec::new(),
            energy: Vec::new(),
            volume: Vec::new(),
            lambda_bar: Vec::new(),
            l2_residual: Vec::new(),
            min_radius: Vec::new(),
            max_slope: Vec::new(),
            snapshots: Vec::new(),
            outcome: Outcome::HorizonReached,
            steps_taken: 0,
            final_state: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, time: f64, rep: &IntegralReport) {
        if self.times.last() == Some(&time) {
            return;
        }
        self.times.push(time);
        self.energy.push(rep.energy);
        self.volume.push(rep.volume);
        self.lambda_bar.push(rep.lambda_bar);
        self.l2_residual.push(rep.l2_residual);
        self.min_radius.push(rep.min_radius);
        self.max_slope.push(rep.max_slope);
    }

    pub fn initial_volume(&self) -> Option<f64> {
        self.volume.first().copied()
    }

    pub fn final_volume(&self) -> Option<f64> {
        self.volume.last().copied()
    }

    pub fn final_energy(&self) -> Option<f64> {
        self.energy.last().copied()
    }

    /// Largest `|V(t) - V(0)| / V(0)` over the recorded samples, in percent.
    pub fn volume_drift_percent(&self) -> Option<f64> {
        let v0 = self.initial_volume()?;
        Some(
            self.volume
                .iter()
                .map(|v| (v - v0).abs() / v0)
                .fold(0.0, f64::max)
                * 100.0,
        )
    }

    /// Whether the recorded energy never increases by more than
    /// `rel_slack * |E|` between consecutive samples.
    pub fn energy_non_increasing(&self, rel_slack: f64) -> bool {
        self.energy
            .windows(2)
            .all(|w| w[1] <= w[0] + rel_slack * w[0].abs())
    }
}

/// Raised when a step fails for a reason other than pinch-off; carries the
/// state that could not be advanced.
#[derive(Debug, thiserror::Error)]
#[error("step {step} (t = {time}) failed: {source}")]
pub struct RunFailure {
    pub step: usize,
    pub time: f64,
    pub state: Box<FlowState>,
    #[source]
    pub source: FlowError,
}

/// Integrates the flow described by `config`.
///
/// Stops at the horizon, at a pinch, or as soon as the profile is a steady
/// cylinder (nodal rate below `steady_tolerance` and the final state passes
/// [`is_cylinder`]).
pub fn run(config: &FlowConfig) -> std::result::Result<RunHistory, RunFailure> {
    let fail = |state: &FlowState, source: FlowError| RunFailure {
        step: state.step_index,
        time: state.time,
        state: Box::new(state.clone()),
        source,
    };
    let setup = || -> Result<(Stepper, FlowState)> {
        config.validate()?;
        let quad = QuadratureRule::gauss_legendre(config.quadrature_points)?;
        let mut stepper = Stepper::new(config.model()?, quad, config.tau);
        stepper.pinch_tolerance = config.pinch_tolerance;
        Ok((stepper, config.initial.to_state(config.intervals)?))
    };
    let (stepper, mut state) = setup().map_err(|e| RunFailure {
        step: 0,
        time: 0.0,
        state: Box::new(placeholder_state()),
        source: e,
    })?;

    let steps = config.steps();
    let every = config.record_interval();
    let mut history = RunHistory::empty();
    let mut snapshot_times: Vec<f64> = config.snapshot_times.clone();
    snapshot_times.sort_by(f64::total_cmp);
    let mut next_snapshot = 0;
    let half_step = 0.5 * config.tau;
    let mut take_snapshots = |history: &mut RunHistory, state: &FlowState| {
        while next_snapshot < snapshot_times.len() && state.time >= snapshot_times[next_snapshot] - half_step {
            if history.snapshots.last().map(|s| s.time) != Some(state.time) {
                history.snapshots.push(Snapshot::of(state));
            }
            next_snapshot += 1;
        }
    };

    let outcome = loop {
        let k = state.step_index;
        take_snapshots(&mut history, &state);
        if k >= steps {
            let rep = integrals(&stepper.model, &state.spline, &stepper.quad).map_err(|e| fail(&state, e))?;
            history.push(state.time, &rep);
            break if is_cylinder(&rep) {
                Outcome::SteadyCylinder {
                    radius: mean(state.spline.values()),
                }
            } else {
                Outcome::HorizonReached
            };
        }
        let record = match stepper.step_detailed(&state) {
            Ok(record) => record,
            Err(FlowError::Pinch { z, .. }) => {
                if let Ok(rep) = integrals(&stepper.model, &state.spline, &stepper.quad) {
                    history.push(state.time, &rep);
                }
                break Outcome::Pinched {
                    time: (k + 1) as f64 * config.tau,
                    z,
                };
            }
            Err(e) => return Err(fail(&state, e)),
        };
        let rep = record.coefficients.report;
        if k % every == 0 {
            history.push(state.time, &rep);
        }

        let mut next = record.state;
        next.time = next.step_index as f64 * config.tau;
        let (max_slope_at, max_slope) = next
            .spline
            .slopes()
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, d)| if d.abs() > acc.1 { (i, d.abs()) } else { acc });
        if max_slope > config.slope_limit {
            history.push(state.time, &rep);
            let z = next.spline.nodes()[max_slope_at];
            state = next;
            break Outcome::Pinched { time: state.time, z };
        }

        let rate = state
            .spline
            .values()
            .iter()
            .zip(next.spline.values())
            .map(|(a, b)| (b - a).abs())
            .fold(0.0, f64::max)
            / config.tau;
        state = next;
        if rate <= config.steady_tolerance {
            let rep = integrals(&stepper.model, &state.spline, &stepper.quad).map_err(|e| fail(&state, e))?;
            if is_cylinder(&rep) {
                history.push(state.time, &rep);
                break Outcome::SteadyCylinder {
                    radius: mean(state.spline.values()),
                };
            }
        }
    };
    if history.snapshots.last().map(|s| s.time) != Some(state.time) {
        history.snapshots.push(Snapshot::of(&state));
    }
    history.outcome = outcome;
    history.steps_taken = state.step_index;
    history.final_state = Some(state);
    Ok(history)
}

/// Cylinder test on a profile's diagnostics: `max |r_z|` and the relative L2
/// deviation of the anisotropic mean curvature from its average both small.
pub fn is_cylinder(rep: &IntegralReport) -> bool {
    rep.max_slope <= CYLINDER_SLOPE_TOLERANCE
        && rep.l2_residual <= CYLINDER_RESIDUAL_TOLERANCE * rep.energy.abs()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn placeholder_state() -> FlowState {
    let spline = crate::spline::ClampedSpline::fit_clamped(&[0.0, 1.0], &[1.0, 1.0], 0.0, 0.0)
        .expect("two-node spline");
    FlowState {
        time: 0.0,
        step_index: 0,
        spline,
    }
}
