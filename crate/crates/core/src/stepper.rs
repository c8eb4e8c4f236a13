//! Semi-implicit backward Euler stepping of
//!
//! ```text
//! r_t = (Lambda - lambda_bar) sqrt(1 + r_z^2)
//!     = r_zz / (mu1 Q) - 1 / (mu2 r) - lambda_bar sqrt(Q),   Q = 1 + r_z^2
//! ```
//!
//! The second-derivative term is taken at the new time level through the
//! spline representation; `mu1`, `mu2`, `Q` and `lambda_bar` are lagged.
//! With `xi_n = tau / (mu1 Q)` and `eta_n = -(1 / (mu2 r) + lambda_bar sqrt(Q)) tau`
//! every node gives
//!
//! ```text
//! r_n^{k+1} = xi_n S''(z_n) + eta_n + r_n^k
//! ```
//!
//! which, together with the C2 continuity conditions of the new spline, is a
//! square linear system in `(r_0..r_N; d_1..d_{N-1})`.

use serde::{Deserialize, Serialize};

use crate::anisotropy::AnisotropyModel;
use crate::error::{FlowError, Result};
use crate::geometry::{integrals, lambda_pointwise, IntegralReport, ProfilePoint};
use crate::numerics::{QuadratureRule, SparseSystem};
use crate::spline::ClampedSpline;

/// Smallest nodal radius a step may produce before the run is declared pinched.
pub const DEFAULT_PINCH_TOLERANCE: f64 = 1e-3;

/// Profile at time `t_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub time: f64,
    pub step_index: usize,
    pub spline: ClampedSpline,
}

impl FlowState {
    pub fn initial(spline: ClampedSpline) -> Result<Self> {
        let (i, r) = spline.min_value();
        if !(r > 0.0) {
            return Err(FlowError::DegenerateProfile {
                z: spline.nodes()[i],
                r,
            });
        }
        Ok(Self {
            time: 0.0,
            step_index: 0,
            spline,
        })
    }

    pub fn intervals(&self) -> usize {
        self.spline.intervals()
    }
}

/// Lagged per-node coefficients of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCoefficients {
    /// `1 + (r_z)_n^2`
    pub q: Vec<f64>,
    /// `tau / (mu1 Q)`
    pub xi: Vec<f64>,
    /// `-(1 / (mu2 r) + lambda_bar sqrt(Q)) tau`
    pub eta: Vec<f64>,
    pub lambda_bar: f64,
    /// Integral diagnostics of the state the coefficients were taken from.
    pub report: IntegralReport,
}

/// Everything produced while advancing one step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub state: FlowState,
    pub coefficients: StepCoefficients,
    pub system: SparseSystem,
    /// Solution vector in `(r; d)` ordering.
    pub solution: Vec<f64>,
}

/// Fixed parameters of the time integrator.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub model: AnisotropyModel,
    pub quad: QuadratureRule,
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    pub pinch_tolerance: f64,
}

impl Stepper {
    /// Right-angle contact at both plates and the default pinch tolerance.
    pub fn new(model: AnisotropyModel, quad: QuadratureRule, tau: f64) -> Self {
        Self {
            model,
            quad,
            tau,
            alpha: 0.0,
            beta: 0.0,
            pinch_tolerance: DEFAULT_PINCH_TOLERANCE,
        }
    }

    pub fn coefficients(&self, state: &FlowState) -> Result<StepCoefficients> {
        compute_coefficients(&self.model, state, self.tau, &self.quad)
    }

    pub fn step(&self, state: &FlowState) -> Result<FlowState> {
        Ok(self.step_detailed(state)?.state)
    }

    /// Advances one step and keeps the assembled system and its solution.
    pub fn step_detailed(&self, state: &FlowState) -> Result<StepRecord> {
        let coefficients = self.coefficients(state)?;
        let system = assemble(state, &coefficients, self.alpha, self.beta)?;
        let solution = system.solve()?;
        let spline = spline_from_solution(state.spline.nodes(), &solution, self.alpha, self.beta)?;
        check_pinch(&spline, self.pinch_tolerance)?;
        Ok(StepRecord {
            state: FlowState {
                time: state.time + self.tau,
                step_index: state.step_index + 1,
                spline,
            },
            coefficients,
            system,
            solution,
        })
    }
}

/// Lagged coefficients `Q`, `xi`, `eta` at every node and the surface average
/// of the anisotropic mean curvature of the current profile.
pub fn compute_coefficients(
    model: &AnisotropyModel,
    state: &FlowState,
    tau: f64,
    quad: &QuadratureRule,
) -> Result<StepCoefficients> {
    if !(tau >= 0.0) {
        return Err(FlowError::Domain(format!("time step must be non-negative, got {tau}")));
    }
    let spline = &state.spline;
    let report = integrals(model, spline, quad)?;
    let lambda_bar = report.lambda_bar;
    let len = spline.nodes().len();
    let mut q = Vec::with_capacity(len);
    let mut xi = Vec::with_capacity(len);
    let mut eta = Vec::with_capacity(len);
    for ((&z, &r), &d) in spline.nodes().iter().zip(spline.values()).zip(spline.slopes()) {
        if !(r > 0.0) {
            return Err(FlowError::Pinch { z, r });
        }
        let qn = 1.0 + d * d;
        let sq = qn.sqrt();
        let nu3 = -d / sq;
        let mu1 = model.mu1(nu3)?;
        let mu2 = model.mu2(nu3)?;
        q.push(qn);
        xi.push(tau / (mu1 * qn));
        eta.push(-(1.0 / (mu2 * r) + lambda_bar * sq) * tau);
    }
    Ok(StepCoefficients {
        q,
        xi,
        eta,
        lambda_bar,
        report,
    })
}

/// Column of `r_n` (0-based node `n`) in the `(r; d)` unknown vector.
#[inline]
pub fn r_index(n: usize) -> usize {
    n
}

/// Column of the interior slope `d_n`, `1 <= n <= N - 1`, in the `(r; d)` vector.
#[inline]
pub fn d_index(intervals: usize, n: usize) -> usize {
    intervals + n
}

/// Builds the `2N x 2N` system for the next state.
///
/// Rows `0..N-1` are the C2 continuity conditions at the interior nodes, rows
/// `N-1..2N` the nodal evolution equations multiplied by the local interval
/// width. The end slopes `alpha`, `beta` are known and moved to the right-hand
/// side. The system carries an interleaved elimination order that keeps its
/// bandwidth independent of `N`.
pub fn assemble(
    state: &FlowState,
    coeffs: &StepCoefficients,
    alpha: f64,
    beta: f64,
) -> Result<SparseSystem> {
    let spline = &state.spline;
    let n_int = spline.intervals();
    if n_int < 2 {
        return Err(FlowError::Domain("stepping needs at least two intervals".into()));
    }
    if coeffs.xi.len() != n_int + 1 || coeffs.eta.len() != n_int + 1 {
        return Err(FlowError::Domain("coefficients do not match the state".into()));
    }
    let z = spline.nodes();
    let r_old = spline.values();
    let h = |j: usize| z[j + 1] - z[j];
    let dim = 2 * n_int;
    let mut sys = SparseSystem::new(dim);

    // Slope term: known ends go to the right-hand side.
    let add_slope = |sys: &mut SparseSystem, row: usize, node: usize, coef: f64, rhs: &mut f64| {
        if node == 0 {
            *rhs -= coef * alpha;
        } else if node == n_int {
            *rhs -= coef * beta;
        } else {
            sys.add(row, d_index(n_int, node), coef);
        }
    };

    for i in 1..n_int {
        let row = i - 1;
        let (hl, hr) = (h(i - 1), h(i));
        let mut rhs = 0.0;
        sys.add(row, r_index(i - 1), 3.0 * hr / hl);
        sys.add(row, r_index(i), 3.0 * hl / hr - 3.0 * hr / hl);
        sys.add(row, r_index(i + 1), -3.0 * hl / hr);
        add_slope(&mut sys, row, i - 1, hr, &mut rhs);
        add_slope(&mut sys, row, i, 2.0 * (hl + hr), &mut rhs);
        add_slope(&mut sys, row, i + 1, hl, &mut rhs);
        sys.set_rhs(row, rhs);
    }

    for n in 0..=n_int {
        let row = n_int - 1 + n;
        let xi = coeffs.xi[n];
        let mut rhs;
        if n < n_int {
            let hn = h(n);
            rhs = hn * (coeffs.eta[n] + r_old[n]);
            sys.add(row, r_index(n), hn + 6.0 * xi / hn);
            sys.add(row, r_index(n + 1), -6.0 * xi / hn);
            add_slope(&mut sys, row, n, 4.0 * xi, &mut rhs);
            add_slope(&mut sys, row, n + 1, 2.0 * xi, &mut rhs);
        } else {
            let hn = h(n_int - 1);
            rhs = hn * (coeffs.eta[n] + r_old[n]);
            sys.add(row, r_index(n - 1), -6.0 * xi / hn);
            sys.add(row, r_index(n), hn + 6.0 * xi / hn);
            add_slope(&mut sys, row, n - 1, -2.0 * xi, &mut rhs);
            add_slope(&mut sys, row, n, -4.0 * xi, &mut rhs);
        }
        sys.set_rhs(row, rhs);
    }

    // Elimination order: node by node, (evolution, r) for the ends and
    // (continuity, d) then (evolution, r) for interior nodes.
    let mut rows = Vec::with_capacity(dim);
    let mut cols = Vec::with_capacity(dim);
    rows.push(n_int - 1);
    cols.push(r_index(0));
    for i in 1..n_int {
        rows.push(i - 1);
        cols.push(d_index(n_int, i));
        rows.push(n_int - 1 + i);
        cols.push(r_index(i));
    }
    rows.push(2 * n_int - 1);
    cols.push(r_index(n_int));
    sys.with_ordering(rows, cols)
}

/// Unpacks `(r; d)` into a spline with clamped end slopes.
pub fn spline_from_solution(
    nodes: &[f64],
    solution: &[f64],
    alpha: f64,
    beta: f64,
) -> Result<ClampedSpline> {
    let n_int = nodes.len() - 1;
    if solution.len() != 2 * n_int {
        return Err(FlowError::Domain(format!(
            "solution of length {} for {} intervals",
            solution.len(),
            n_int
        )));
    }
    let values = solution[..=n_int].to_vec();
    let mut slopes = Vec::with_capacity(n_int + 1);
    slopes.push(alpha);
    slopes.extend_from_slice(&solution[n_int + 1..]);
    slopes.push(beta);
    ClampedSpline::from_parts(nodes.to_vec(), values, slopes)
}

fn check_pinch(spline: &ClampedSpline, tolerance: f64) -> Result<()> {
    let (i, r) = spline.min_value();
    if !(r > tolerance) || spline.values().iter().chain(spline.slopes()).any(|v| !v.is_finite()) {
        return Err(FlowError::Pinch {
            z: spline.nodes()[i],
            r,
        });
    }
    Ok(())
}

/// One semi-implicit step with the default pinch tolerance.
pub fn step(
    model: &AnisotropyModel,
    state: &FlowState,
    tau: f64,
    quad: &QuadratureRule,
    alpha: f64,
    beta: f64,
) -> Result<FlowState> {
    let stepper = Stepper {
        model: *model,
        quad: quad.clone(),
        tau,
        alpha,
        beta,
        pinch_tolerance: DEFAULT_PINCH_TOLERANCE,
    };
    stepper.step(state)
}

/// Forward Euler step `r_n + tau (Lambda_n - lambda_bar) sqrt(Q_n)` with every
/// quantity taken from the current spline, followed by a clamped refit that
/// keeps the current end slopes. Only stable for `tau = O(h^2)`.
pub fn reference_explicit_step(
    model: &AnisotropyModel,
    state: &FlowState,
    tau: f64,
    quad: &QuadratureRule,
) -> Result<FlowState> {
    let spline = &state.spline;
    let lambda_bar = integrals(model, spline, quad)?.lambda_bar;
    let mut next = Vec::with_capacity(spline.nodes().len());
    for (n, ((&z, &r), &d)) in spline
        .nodes()
        .iter()
        .zip(spline.values())
        .zip(spline.slopes())
        .enumerate()
    {
        let p = ProfilePoint::new(z, r, d, spline.node_curvature(n));
        let lam = lambda_pointwise(model, &p).map_err(|_| FlowError::Pinch { z, r })?;
        next.push(r + tau * (lam - lambda_bar) * (1.0 + d * d).sqrt());
    }
    let slopes = spline.slopes();
    let spline = ClampedSpline::fit_clamped(spline.nodes(), &next, slopes[0], slopes[slopes.len() - 1])?;
    check_pinch(&spline, 0.0)?;
    Ok(FlowState {
        time: state.time + tau,
        step_index: state.step_index + 1,
        spline,
    })
}
