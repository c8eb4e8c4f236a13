//! Stability scans over perturbed cylinders.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::config::{FlowConfig, InitialProfile};
use super::output::{fmt_f64, write_outputs};
use super::runner::{run, Outcome, RunFailure, RunHistory};
use crate::error::{FlowError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub epsilon: f64,
    pub radii: Vec<f64>,
    pub amplitude: f64,
    pub wavenumber: u32,
    pub intervals: usize,
    pub tau: f64,
    pub horizon: f64,
}

impl SweepSpec {
    pub fn config_for(&self, radius: f64) -> FlowConfig {
        let mut cfg = FlowConfig::new(
            self.epsilon,
            self.intervals,
            self.tau,
            self.horizon,
            InitialProfile::Cosine {
                mean: radius,
                amplitude: self.amplitude,
                wavenumber: self.wavenumber,
            },
        );
        cfg.name = Some(format!("sweep_r{radius:.4}"));
        cfg.assumed_parameters = true;
        cfg
    }
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub radius: f64,
    pub config: FlowConfig,
    pub history: RunHistory,
}

/// Parses `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: std::result::Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let bad = || FlowError::Config(format!("expected start:stop:step, got {spec:?}"));
    let nums = nums.map_err(|_| bad())?;
    let [start, stop, step] = nums[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !(stop >= start) {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// Runs every radius of the scan on its own thread.
pub fn sweep(spec: &SweepSpec) -> std::result::Result<Vec<SweepCell>, RunFailure> {
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = spec
            .radii
            .iter()
            .map(|&radius| {
                scope.spawn(move || {
                    let config = spec.config_for(radius);
                    run(&config).map(|history| SweepCell {
                        radius,
                        config,
                        history,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut cells = results.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
    cells.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    Ok(cells)
}

/// Orders outcomes from least to most stable.
pub fn stability_rank(outcome: &Outcome) -> u8 {
    match outcome {
        Outcome::Pinched { .. } => 0,
        Outcome::HorizonReached => 1,
        Outcome::SteadyCylinder { .. } => 2,
    }
}

/// True when stability never decreases as the radius grows.
pub fn classification_is_monotone(cells: &[SweepCell]) -> bool {
    let mut sorted: Vec<&SweepCell> = cells.iter().collect();
    sorted.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    sorted
        .windows(2)
        .all(|w| stability_rank(&w[0].history.outcome) <= stability_rank(&w[1].history.outcome))
}

/// Writes `sweep.csv` plus the full outputs of each cell under `r_<radius>/`.
pub fn write_sweep(cells: &[SweepCell], out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| FlowError::io(out_dir, e))?;
    let path = out_dir.join("sweep.csv");
    let mut text = String::from("radius,outcome,end_time,final_min_radius,final_max_slope,final_volume\n");
    for cell in cells {
        let h = &cell.history;
        let end_time = match h.outcome {
            Outcome::Pinched { time, .. } => time,
            _ => h.times.last().copied().unwrap_or(0.0),
        };
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(cell.radius),
            h.outcome.label(),
            fmt_f64(end_time),
            fmt_f64(h.min_radius.last().copied().unwrap_or(f64::NAN)),
            fmt_f64(h.max_slope.last().copied().unwrap_or(f64::NAN)),
            fmt_f64(h.final_volume().unwrap_or(f64::NAN)),
        ));
        write_outputs(h, &cell.config, &out_dir.join(format!("r_{:.4}", cell.radius)))?;
    }
    let mut f = fs::File::create(&path).map_err(|e| FlowError::io(&path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| FlowError::io(&path, e))
}
