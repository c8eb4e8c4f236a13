use wulff_flow::experiments::{
    classification_is_monotone, cosine_initial, preset, run, stability_rank, sweep, write_outputs,
    FlowConfig, Outcome, SweepSpec, HISTORY_HEADER, PROFILE_HEADER,
};

fn perturbed_cylinder(radius: f64, wavenumber: u32, horizon: f64) -> FlowConfig {
    FlowConfig::new(0.2, 60, 1e-4, horizon, cosine_initial(radius, 0.01, wavenumber).unwrap())
}

#[test]
fn runs_are_deterministic() {
    let mut cfg = preset("exp1").unwrap();
    cfg.intervals = 60;
    cfg.horizon = 0.2;
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.energy, b.energy);
    assert_eq!(a.volume, b.volume);
    assert_eq!(a.final_state, b.final_state);
}

#[test]
fn wide_cylinder_recovers_from_perturbation() {
    let h = run(&perturbed_cylinder(0.5, 2, 1.0)).unwrap();
    match h.outcome {
        Outcome::SteadyCylinder { radius } => {
            let expected = (h.initial_volume().unwrap() / std::f64::consts::PI).sqrt();
            assert!((radius - expected).abs() < 1e-3, "{radius} vs {expected}");
        }
        other => panic!("expected a cylinder, got {other:?}"),
    }
    assert!(h.energy_non_increasing(1e-12));
}

#[test]
fn thin_cylinder_pinches() {
    let h = run(&perturbed_cylinder(0.2, 1, 2.0)).unwrap();
    assert!(matches!(h.outcome, Outcome::Pinched { .. }), "{:?}", h.outcome);
}

#[test]
fn sweep_is_monotone_in_radius() {
    let spec = SweepSpec {
        epsilon: 0.2,
        radii: vec![0.2, 0.35, 0.5],
        amplitude: 0.01,
        wavenumber: 1,
        intervals: 40,
        tau: 1e-4,
        horizon: 2.0,
    };
    let cells = sweep(&spec).unwrap();
    assert_eq!(cells.len(), 3);
    assert!(cells.windows(2).all(|w| w[0].radius < w[1].radius));
    assert!(classification_is_monotone(&cells));
    assert!(stability_rank(&cells[0].history.outcome) < stability_rank(&cells[2].history.outcome));
}

#[test]
fn volume_drift_settles() {
    let mut cfg = preset("exp1").unwrap();
    cfg.intervals = 100;
    let h = run(&cfg).unwrap();
    let v = &h.volume;
    let k = v.len() / 4;
    let early = (v[k] - v[0]).abs();
    let late = (v[v.len() - 1] - v[v.len() - 1 - k]).abs();
    assert!(late < early, "early {early:e}, late {late:e}");
}

#[test]
fn outputs_are_written() {
    let mut cfg = preset("exp1").unwrap();
    cfg.intervals = 80;
    let h = run(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = write_outputs(&h, &cfg, dir.path()).unwrap();

    let history = std::fs::read_to_string(&files.history).unwrap();
    let mut lines = history.lines();
    assert_eq!(lines.next(), Some(HISTORY_HEADER));
    assert_eq!(lines.count(), h.len());

    assert!(!files.snapshots.is_empty());
    for snap in &files.snapshots {
        let text = std::fs::read_to_string(snap).unwrap();
        assert_eq!(text.lines().next(), Some(PROFILE_HEADER));
        assert_eq!(text.lines().count(), 82);
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&files.manifest).unwrap()).unwrap();
    assert_eq!(manifest["outcome_label"], "SteadyCylinder");
    assert_eq!(manifest["assumed_parameters"], false);
    assert!((manifest["threshold_radius"].as_f64().unwrap() - 0.3766).abs() < 1e-4);
    assert!((manifest["initial_volume"].as_f64().unwrap() - 0.9847).abs() < 5e-5);
}
