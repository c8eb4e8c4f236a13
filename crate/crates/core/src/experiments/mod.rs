//! Experiment presets, run orchestration, stability scans and file output.

mod check;
mod config;
mod output;
mod runner;
mod sweep;

pub use check::{run_checks, CheckResult};
pub use config::{
    cosine_initial, default_snapshot_times, hermite_initial, preset, FlowConfig, InitialProfile,
    DEFAULT_SLOPE_LIMIT, DEFAULT_STEADY_TOLERANCE, MAX_RECORDS, PRESET_NAMES,
};
pub use output::{fmt_f64, write_outputs, Manifest, OutputFiles, HISTORY_HEADER, PROFILE_HEADER};
pub use runner::{
    is_cylinder, run, Outcome, RunFailure, RunHistory, Snapshot, CYLINDER_RESIDUAL_TOLERANCE,
    CYLINDER_SLOPE_TOLERANCE,
};
pub use sweep::{
    classification_is_monotone, parse_range, stability_rank, sweep, write_sweep, SweepCell,
    SweepSpec,
};
