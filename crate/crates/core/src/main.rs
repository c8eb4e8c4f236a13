use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wulff_flow::experiments::{
    classification_is_monotone, parse_range, preset, run, run_checks, sweep, write_outputs,
    write_sweep, FlowConfig, InitialProfile, Outcome, RunFailure, SweepSpec,
};
use wulff_flow::geometry::{linear_stability_radius, stability_threshold};
use wulff_flow::FlowError;

#[derive(Parser)]
#[command(name = "wulff-flow", version, about = "Anisotropic volume-preserving curvature flow of a drop between plates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write history, snapshots and manifest.
    Run(RunArgs),
    /// Scan perturbed cylinders over a range of radii.
    Sweep(SweepArgs),
    /// Run the built-in invariant checks.
    Check,
}

#[derive(Args)]
struct RunArgs {
    /// One of exp1..exp7; explicit flags override its values.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Number of spline intervals.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// `hermite:R0,R1` or `cosine:MEAN,AMPLITUDE,WAVENUMBER`.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    steady_tol: Option<f64>,
    #[arg(long)]
    pinch_tol: Option<f64>,
    #[arg(long)]
    record_every: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.2)]
    epsilon: f64,
    /// `start:stop:step`
    #[arg(long)]
    radii: String,
    #[arg(long, default_value_t = 0.01)]
    perturb: f64,
    /// Perturbation `cos(wavenumber pi z)`.
    #[arg(long, default_value_t = 1)]
    wavenumber: u32,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1e-4)]
    tau: f64,
    #[arg(long, default_value_t = 3.0)]
    horizon: f64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Check => cmd_check(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_init(spec: &str) -> Result<InitialProfile, FlowError> {
    let bad = || FlowError::Config(format!("cannot parse initial profile {spec:?}"));
    let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
    let nums: Vec<&str> = rest.split(',').map(str::trim).collect();
    let f = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let profile = match (kind, nums.as_slice()) {
        ("hermite", [r0, r1]) => InitialProfile::Hermite { r0: f(r0)?, r1: f(r1)? },
        ("cosine", [mean, amp, k]) => InitialProfile::Cosine {
            mean: f(mean)?,
            amplitude: f(amp)?,
            wavenumber: k.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    };
    profile.validate()?;
    Ok(profile)
}

fn build_config(args: &RunArgs) -> Result<FlowConfig, FlowError> {
    let mut cfg = match &args.preset {
        Some(name) => preset(name)?,
        None => {
            let missing = |what: &str| FlowError::Config(format!("--{what} is required without --preset"));
            let init = parse_init(args.init.as_deref().ok_or_else(|| missing("init"))?)?;
            let mut cfg = FlowConfig::new(
                args.epsilon.ok_or_else(|| missing("epsilon"))?,
                args.n.ok_or_else(|| missing("n"))?,
                args.tau.ok_or_else(|| missing("tau"))?,
                args.horizon.ok_or_else(|| missing("horizon"))?,
                init,
            );
            cfg.assumed_parameters = true;
            return Ok(apply_tolerances(cfg, args));
        }
    };
    if let Some(eps) = args.epsilon {
        cfg.epsilon = eps;
    }
    if let Some(n) = args.n {
        cfg.intervals = n;
    }
    if let Some(tau) = args.tau {
        cfg.tau = tau;
    }
    if let Some(t) = args.horizon {
        cfg.horizon = t;
        cfg.snapshot_times = wulff_flow::experiments::default_snapshot_times(t);
    }
    if let Some(init) = &args.init {
        cfg.initial = parse_init(init)?;
    }
    Ok(apply_tolerances(cfg, args))
}

fn apply_tolerances(mut cfg: FlowConfig, args: &RunArgs) -> FlowConfig {
    if let Some(t) = args.steady_tol {
        cfg.steady_tolerance = t;
    }
    if let Some(t) = args.pinch_tol {
        cfg.pinch_tolerance = t;
    }
    if args.record_every.is_some() {
        cfg.record_every = args.record_every;
    }
    cfg
}

fn dump_failure(out: &Path, failure: &RunFailure) {
    let path = out.join("failure_state.json");
    let dumped = std::fs::create_dir_all(out)
        .ok()
        .and_then(|_| serde_json::to_string_pretty(&*failure.state).ok())
        .and_then(|json| std::fs::write(&path, json).ok());
    if dumped.is_some() {
        eprintln!("state dumped to {}", path.display());
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, FlowError> {
    let cfg = build_config(&args)?;
    cfg.validate()?;
    let history = match run(&cfg) {
        Ok(h) => h,
        Err(failure) => {
            dump_failure(&args.out, &failure);
            eprintln!("error: {failure}");
            return Ok(ExitCode::from(1));
        }
    };
    write_outputs(&history, &cfg, &args.out)?;
    let model = cfg.model()?;
    println!("outcome: {:?}", history.outcome);
    println!("steps: {}", history.steps_taken);
    if let (Some(v0), Some(v1)) = (history.initial_volume(), history.final_volume()) {
        println!("volume: {v0:.6} -> {v1:.6} (max drift {:.3e} %)", history.volume_drift_percent().unwrap_or(0.0));
    }
    if let Some(e) = history.final_energy() {
        println!("final energy: {e:.8}");
    }
    println!(
        "threshold radius: {:.4} (linearised: {:.4})",
        stability_threshold(&model, 1.0)?,
        linear_stability_radius(&model, 1.0)?
    );
    println!("output: {}", args.out.display());
    Ok(match history.outcome {
        Outcome::Pinched { .. } => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    })
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, FlowError> {
    let spec = SweepSpec {
        epsilon: args.epsilon,
        radii: parse_range(&args.radii)?,
        amplitude: args.perturb,
        wavenumber: args.wavenumber,
        intervals: args.n,
        tau: args.tau,
        horizon: args.horizon,
    };
    let cells = match sweep(&spec) {
        Ok(c) => c,
        Err(failure) => {
            dump_failure(&args.out, &failure);
            eprintln!("error: {failure}");
            return Ok(ExitCode::from(1));
        }
    };
    write_sweep(&cells, &args.out)?;
    for cell in &cells {
        println!("r = {:.4}: {:?}", cell.radius, cell.history.outcome);
    }
    println!("monotone classification: {}", classification_is_monotone(&cells));
    Ok(ExitCode::SUCCESS)
}

fn cmd_check() -> Result<ExitCode, FlowError> {
    let mut all = true;
    for c in run_checks() {
        println!("[{}] {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        all &= c.passed;
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
