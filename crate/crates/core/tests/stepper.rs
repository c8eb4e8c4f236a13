use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use wulff_flow::experiments::preset;
use wulff_flow::geometry::integrals;
use wulff_flow::numerics::QuadratureRule;
use wulff_flow::spline::ClampedSpline;
use wulff_flow::stepper::{assemble, compute_coefficients, d_index, r_index, FlowState, Stepper};
use wulff_flow::AnisotropyModel;

fn gauss4() -> QuadratureRule {
    QuadratureRule::gauss_legendre(4).unwrap()
}

fn exp1_state(n: usize) -> (AnisotropyModel, FlowState) {
    let cfg = preset("exp1").unwrap();
    (cfg.model().unwrap(), cfg.initial.to_state(n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The assembled rows reproduce the raw continuity and evolution
    /// equations for an arbitrary candidate solution.
    #[test]
    fn assembled_rows_match_raw_equations(
        gaps in prop::array::uniform4(0.5f64..2.0),
        old in prop::array::uniform5(0.3f64..1.2),
        cand in prop::array::uniform8(-1.0f64..1.0),
        alpha in -0.5f64..0.5,
        beta in -0.5f64..0.5,
        tau in 1e-4f64..1e-2,
    ) {
        let total: f64 = gaps.iter().sum();
        let mut z = vec![0.0];
        for g in gaps {
            z.push(z.last().unwrap() + g / total);
        }
        *z.last_mut().unwrap() = 1.0;
        let spline = ClampedSpline::fit_clamped(&z, &old, 0.0, 0.0).unwrap();
        let state = FlowState::initial(spline).unwrap();
        let m = AnisotropyModel::rapini_papoular(0.2).unwrap();
        let c = compute_coefficients(&m, &state, tau, &gauss4()).unwrap();
        let sys = assemble(&state, &c, alpha, beta).unwrap();
        let n_int = 4;
        prop_assert_eq!(sys.dim(), 2 * n_int);

        let r: Vec<f64> = (0..=n_int).map(|n| cand[r_index(n)]).collect();
        let mut d = vec![alpha];
        d.extend((1..n_int).map(|n| cand[d_index(n_int, n)]));
        d.push(beta);
        let ax = sys.apply(&cand);
        let h = |j: usize| z[j + 1] - z[j];

        for i in 1..n_int {
            let raw = h(i) * d[i - 1] + 2.0 * (h(i - 1) + h(i)) * d[i] + h(i - 1) * d[i + 1]
                - 3.0 * (h(i) * (r[i] - r[i - 1]) / h(i - 1) + h(i - 1) * (r[i + 1] - r[i]) / h(i));
            let row = i - 1;
            prop_assert!((ax[row] - sys.rhs()[row] - raw).abs() < 1e-10);
        }
        for n in 0..=n_int {
            let (hn, dd) = if n < n_int {
                let hn = h(n);
                (hn, (6.0 * (r[n + 1] - r[n]) / hn - 4.0 * d[n] - 2.0 * d[n + 1]) / hn)
            } else {
                let hn = h(n - 1);
                (hn, (-6.0 * (r[n] - r[n - 1]) / hn + 2.0 * d[n - 1] + 4.0 * d[n]) / hn)
            };
            let raw = r[n] - c.xi[n] * dd - c.eta[n] - old[n];
            let row = n_int - 1 + n;
            prop_assert!((ax[row] - sys.rhs()[row] - hn * raw).abs() < 1e-10);
        }
    }
}

#[test]
fn banded_solve_matches_dense_lu() {
    let (m, state) = exp1_state(60);
    let c = compute_coefficients(&m, &state, 1e-3, &gauss4()).unwrap();
    let sys = assemble(&state, &c, 0.0, 0.0).unwrap();
    let dense = sys.to_dense();
    let dim = sys.dim();
    let a = DMatrix::from_fn(dim, dim, |i, j| dense[i][j]);
    let b = DVector::from_column_slice(sys.rhs());
    let reference = a.lu().solve(&b).unwrap();
    let x = sys.solve().unwrap();
    for (u, v) in x.iter().zip(reference.iter()) {
        assert!((u - v).abs() < 1e-12);
    }
    assert!(sys.relative_residual(&x) < 1e-13);
}

#[test]
fn full_scale_system_shape() {
    let (m, state) = exp1_state(500);
    let c = compute_coefficients(&m, &state, 1e-4, &gauss4()).unwrap();
    let sys = assemble(&state, &c, 0.0, 0.0).unwrap();
    assert_eq!(sys.dim(), 1000);
    let (kl, ku) = sys.bandwidth();
    assert!(kl + ku + 1 <= 6);
}

#[test]
fn one_step_lowers_energy_and_keeps_volume() {
    let (m, state) = exp1_state(500);
    let stepper = Stepper::new(m, gauss4(), 1e-4);
    let rec = stepper.step_detailed(&state).unwrap();
    let before = rec.coefficients.report;
    let after = integrals(&m, &rec.state.spline, &gauss4()).unwrap();
    assert!(after.energy < before.energy);
    assert!((after.volume - before.volume).abs() / before.volume < 1e-6);
    assert_eq!(rec.state.step_index, 1);
    assert_eq!(rec.state.spline.slopes()[0], 0.0);
    assert_eq!(*rec.state.spline.slopes().last().unwrap(), 0.0);
}

#[test]
fn zero_step_is_identity() {
    let (m, state) = exp1_state(80);
    let stepper = Stepper::new(m, gauss4(), 0.0);
    let next = stepper.step(&state).unwrap();
    for (a, b) in state.spline.values().iter().zip(next.spline.values()) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn nonzero_contact_slopes_are_kept() {
    let (m, state) = exp1_state(50);
    let mut stepper = Stepper::new(m, gauss4(), 1e-4);
    stepper.alpha = 0.1;
    stepper.beta = -0.05;
    let next = stepper.step(&state).unwrap();
    assert_eq!(next.spline.slopes()[0], 0.1);
    assert_eq!(next.spline.slopes()[50], -0.05);
    assert!(next.spline.max_curvature_jump() < 1e-9);
}
