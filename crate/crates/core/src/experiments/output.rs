use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::FlowConfig;
use super::runner::{Outcome, RunHistory};
use crate::error::{FlowError, Result};
use crate::geometry::{linear_stability_radius, stability_threshold};

pub const HISTORY_HEADER: &str = "time,energy,volume,lambda_bar,l2_residual,min_radius,max_slope";
pub const PROFILE_HEADER: &str = "z,r,r_z";

/// Summary written next to the CSV files.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub config: &'a FlowConfig,
    pub code_version: &'static str,
    pub outcome: Outcome,
    pub outcome_label: &'static str,
    pub steps_taken: usize,
    pub final_time: f64,
    pub final_energy: Option<f64>,
    pub final_volume: Option<f64>,
    pub initial_volume: Option<f64>,
    pub volume_drift_percent: Option<f64>,
    pub threshold_radius: Option<f64>,
    pub linear_stability_radius: Option<f64>,
    pub assumed_parameters: bool,
}

/// Files produced by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub history: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_outputs(history: &RunHistory, config: &FlowConfig, out_dir: &Path) -> Result<OutputFiles> {
    let snap_dir = out_dir.join("snapshots");
    fs::create_dir_all(&snap_dir).map_err(|e| FlowError::io(&snap_dir, e))?;

    let history_path = out_dir.join("history.csv");
    write_file(&history_path, |w| {
        writeln!(w, "{HISTORY_HEADER}")?;
        for i in 0..history.len() {
            let row = [
                history.times[i],
                history.energy[i],
                history.volume[i],
                history.lambda_bar[i],
                history.l2_residual[i],
                history.min_radius[i],
                history.max_slope[i],
            ];
            writeln!(w, "{}", row.map(fmt_f64).join(","))?;
        }
        Ok(())
    })?;

    let mut snapshots = Vec::with_capacity(history.snapshots.len());
    for snap in &history.snapshots {
        let path = snap_dir.join(format!("profile_{:.6}.csv", snap.time));
        write_file(&path, |w| {
            writeln!(w, "{PROFILE_HEADER}")?;
            for ((z, r), d) in snap.z.iter().zip(&snap.r).zip(&snap.r_z) {
                writeln!(w, "{},{},{}", fmt_f64(*z), fmt_f64(*r), fmt_f64(*d))?;
            }
            Ok(())
        })?;
        snapshots.push(path);
    }

    let model = config.model().ok();
    let manifest = Manifest {
        config,
        code_version: env!("CARGO_PKG_VERSION"),
        outcome: history.outcome,
        outcome_label: history.outcome.label(),
        steps_taken: history.steps_taken,
        final_time: history.times.last().copied().unwrap_or(0.0),
        final_energy: history.final_energy(),
        final_volume: history.final_volume(),
        initial_volume: history.initial_volume(),
        volume_drift_percent: history.volume_drift_percent(),
        threshold_radius: model.and_then(|m| stability_threshold(&m, 1.0).ok()),
        linear_stability_radius: model.and_then(|m| linear_stability_radius(&m, 1.0).ok()),
        assumed_parameters: config.assumed_parameters,
    };
    let manifest_path = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(&manifest_path, json + "\n").map_err(|e| FlowError::io(&manifest_path, e))?;

    Ok(OutputFiles {
        history: history_path,
        snapshots,
        manifest: manifest_path,
    })
}

fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
{
    let file = fs::File::create(path).map_err(|e| FlowError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| FlowError::io(path, e))
}
