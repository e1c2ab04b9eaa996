//! `twistmodel` command-line front end. [`run`] does all the work and
//! reports an outcome instead of exiting, so tests can drive it in-process.

pub mod svg;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand};
use twistmodel_core::actuator::{motion_mode, predict_twist_curve, ModelError, TwistCurve};
use twistmodel_core::config::ActuatorConfig;
use twistmodel_core::mocap::{
    best_frame, experimental_twist_radius, load_trajectories, load_trials, repeatability_stats, sweep_volume,
    sweep_volumes_by_config, MarkerSet,
};

pub const DEFAULT_CONFIG: &str = "actuator.ini";

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;

pub const TWIST_HEADER: [&str; 4] = ["pressure_kpa", "twist_radius_mm", "residual", "pre_loop"];
pub const CIRCLE_HEADER: [&str; 6] = ["frame", "radius_mm", "center_x_mm", "center_y_mm", "rms_mm", "markers_used"];
pub const VOLUME_HEADER: [&str; 2] = ["config", "volume_mm3"];
pub const REPEATABILITY_HEADER: [&str; 3] = ["mode", "trials", "mean_deviation_mm"];

#[derive(Debug, Parser)]
#[command(name = "twistmodel", version, about = "Twist model and motion-capture analyses for a soft pneumatic finger")]
struct Cli {
    /// Actuator config; missing keys (or a missing default file) fall back to the reference actuator
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Predicted twist radius over a pressure sweep
    PredictTwist(PredictArgs),
    /// Circle fit through the top-view marker positions of one frame
    FitCircle(FitArgs),
    /// Convex-hull volume swept by the markers
    SweepVolume(SweepArgs),
    /// Mean endpoint deviation per motion mode
    Repeatability(RepeatabilityArgs),
    /// Motion mode selected by the two Humofit temperatures
    Mode(ModeArgs),
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long, default_value_t = 18.0)]
    pmin: f64,
    #[arg(long, default_value_t = 30.0)]
    pmax: f64,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value = "twist_curve.csv")]
    out: PathBuf,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("which").required(true)))]
struct FitArgs {
    markers: PathBuf,
    #[arg(long, group = "which")]
    frame: Option<u64>,
    /// Use the frame with the most visible non-reference markers
    #[arg(long, group = "which")]
    best_frame: bool,
    /// Marker ids to leave out of the fit, comma separated
    #[arg(long, value_delimiter = ',')]
    reference: Vec<String>,
    #[arg(long, default_value = "circle_fit.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    markers: PathBuf,
    #[arg(long)]
    first_frame: Option<u64>,
    #[arg(long)]
    last_frame: Option<u64>,
    #[arg(long, default_value = "sweep_volume.csv")]
    out: PathBuf,
    /// Cumulative swept volume against frame
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RepeatabilityArgs {
    trials: PathBuf,
    #[arg(long, default_value = "repeatability.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ModeArgs {
    #[arg(long, allow_negative_numbers = true)]
    humofit1: f64,
    #[arg(long, allow_negative_numbers = true)]
    humofit2: f64,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommandOutcome {
    /// 0 success, 1 usage or config error, 2 data or solver error.
    pub exit_code: u8,
    /// Files written, in the order they were written.
    pub artifacts: Vec<PathBuf>,
    pub summary: Vec<String>,
}

impl CommandOutcome {
    fn fail(exit_code: u8, message: impl Into<String>) -> Self {
        Self { exit_code, artifacts: Vec::new(), summary: vec![message.into()] }
    }
}

struct Failure(u8, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

fn data(msg: impl ToString) -> Failure {
    Failure(EXIT_DATA, msg.to_string())
}

pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return CommandOutcome::fail(code, e.render().to_string().trim_end());
        }
    };
    let result = load_config(cli.config.as_deref()).and_then(|config| match cli.command {
        Command::PredictTwist(a) => predict_twist(&config, &a),
        Command::FitCircle(a) => fit_circle(&a),
        Command::SweepVolume(a) => sweep(&a),
        Command::Repeatability(a) => repeatability(&a),
        Command::Mode(a) => mode(&a),
    });
    result.unwrap_or_else(|Failure(code, msg)| CommandOutcome::fail(code, msg))
}

fn load_config(path: Option<&Path>) -> Result<ActuatorConfig, Failure> {
    let path = match path {
        Some(p) => p,
        None if Path::new(DEFAULT_CONFIG).exists() => Path::new(DEFAULT_CONFIG),
        None => return Ok(ActuatorConfig::default()),
    };
    ActuatorConfig::load(path).map_err(|e| usage(format!("config {}: {e}", path.display())))
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| usage(format!("cannot open {}: {e}", path.display())))
}

fn read_markers(path: &Path) -> Result<MarkerSet, Failure> {
    load_trajectories(open(path)?).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut put = |rec: &[String]| w.write_record(rec).map_err(|e| usage(e.to_string()));
    put(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>())?;
    for row in rows {
        put(row)?;
    }
    let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
    write_file(path, &bytes)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn pressure_grid(a: &PredictArgs) -> Result<Vec<f64>, Failure> {
    if !(a.pmin >= 0.0 && a.pmin.is_finite() && a.pmax.is_finite()) {
        return Err(usage("pressures must be finite and non-negative"));
    }
    if a.pmax < a.pmin {
        return Err(usage("--pmax must not be below --pmin"));
    }
    if !(a.step > 0.0 && a.step.is_finite()) {
        return Err(usage("--step must be positive"));
    }
    let count = ((a.pmax - a.pmin) / a.step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| a.pmin + i as f64 * a.step).collect())
}

fn twist_rows(curve: &TwistCurve) -> Vec<Vec<String>> {
    curve
        .samples
        .iter()
        .map(|s| {
            let (radius, residual) = match &s.outcome {
                Ok(p) if p.twist_radius_mm.is_infinite() => ("inf".to_string(), format!("{:e}", p.gradient_residual)),
                Ok(p) => (p.twist_radius_mm.to_string(), format!("{:e}", p.gradient_residual)),
                Err(ModelError::SolverFailure { residual, .. }) => (String::new(), format!("{residual:e}")),
                Err(_) => (String::new(), String::new()),
            };
            vec![s.pressure_kpa.to_string(), radius, residual, s.pre_loop.to_string()]
        })
        .collect()
}

fn predict_twist(config: &ActuatorConfig, a: &PredictArgs) -> Result<CommandOutcome, Failure> {
    let pressures = pressure_grid(a)?;
    let curve = predict_twist_curve(&config.geometry, &config.material, &pressures).map_err(usage)?;
    write_csv(&a.out, &TWIST_HEADER, &twist_rows(&curve))?;
    let mut artifacts = vec![a.out.clone()];
    if let Some(plot) = &a.plot {
        let points: Vec<(f64, f64)> = curve
            .samples
            .iter()
            .filter_map(|s| s.twist_radius_mm().map(|r| (s.pressure_kpa, r)))
            .collect();
        write_file(plot, svg::line_chart("Predicted twist radius", "pressure (kPa)", "twist radius (mm)", &points).as_bytes())?;
        artifacts.push(plot.clone());
    }

    let mut summary = vec![format!("{} samples written to {}", curve.samples.len(), a.out.display())];
    let pre = curve.samples.iter().filter(|s| s.pre_loop).count();
    if pre > 0 {
        summary.push(format!("{pre} samples below the visible-loop onset are flagged pre_loop"));
    }
    match curve.is_monotone_decreasing() {
        Some(true) => summary.push("radius decreases monotonically with pressure".into()),
        Some(false) => summary.push("radius is not monotone in pressure".into()),
        None => {}
    }
    let mut exit_code = EXIT_OK;
    for s in &curve.samples {
        if let Err(e) = &s.outcome {
            exit_code = EXIT_DATA;
            summary.push(format!("{} kPa: {e}", s.pressure_kpa));
        }
    }
    Ok(CommandOutcome { exit_code, artifacts, summary })
}

fn fit_circle(a: &FitArgs) -> Result<CommandOutcome, Failure> {
    let markers = read_markers(&a.markers)?;
    let refs: BTreeSet<String> = a.reference.iter().cloned().collect();
    let mut summary = Vec::new();
    let frame = match a.frame {
        Some(f) => f,
        None => {
            let f = best_frame(&markers, &refs).ok_or_else(|| data("no marker samples"))?;
            summary.push(format!("frame {f} has the most visible markers"));
            f
        }
    };
    let fit = experimental_twist_radius(&markers, frame, &refs).map_err(data)?;
    let c = &fit.circle;
    let row = vec![
        frame.to_string(),
        c.radius.to_string(),
        c.center[0].to_string(),
        c.center[1].to_string(),
        c.rms_residual.to_string(),
        fit.markers_used.join(";"),
    ];
    write_csv(&a.out, &CIRCLE_HEADER, &[row])?;
    summary.push(format!(
        "frame {frame}: radius {:.4} mm from {} markers (rms {:.3e} mm)",
        c.radius,
        fit.markers_used.len(),
        c.rms_residual
    ));
    Ok(CommandOutcome { exit_code: EXIT_OK, artifacts: vec![a.out.clone()], summary })
}

fn sweep(a: &SweepArgs) -> Result<CommandOutcome, Failure> {
    let markers = read_markers(&a.markers)?;
    let first = a.first_frame.unwrap_or(0);
    let last = a.last_frame.unwrap_or(u64::MAX);
    if last < first {
        return Err(usage("--last-frame must not be below --first-frame"));
    }
    let total = sweep_volume(&markers, first..=last).map_err(data)?;
    let mut rows = vec![vec!["all".to_string(), total.to_string()]];
    let mut summary = vec![format!("swept volume {total:.1} mm^3")];
    if a.first_frame.is_none() && a.last_frame.is_none() {
        for (config, v) in sweep_volumes_by_config(&markers).map_err(data)? {
            summary.push(format!("{config}: {v:.1} mm^3"));
            rows.push(vec![config, v.to_string()]);
        }
    }
    write_csv(&a.out, &VOLUME_HEADER, &rows)?;
    let mut artifacts = vec![a.out.clone()];
    if let Some(plot) = &a.plot {
        // frames whose prefix is still flat have no volume yet and are skipped
        let points: Vec<(f64, f64)> = markers
            .frames()
            .into_iter()
            .filter(|f| (first..=last).contains(f))
            .filter_map(|f| sweep_volume(&markers, first..=f).ok().map(|v| (f as f64, v)))
            .collect();
        write_file(plot, svg::line_chart("Cumulative swept volume", "frame", "volume (mm^3)", &points).as_bytes())?;
        artifacts.push(plot.clone());
    }
    Ok(CommandOutcome { exit_code: EXIT_OK, artifacts, summary })
}

fn repeatability(a: &RepeatabilityArgs) -> Result<CommandOutcome, Failure> {
    let sets = load_trials(open(&a.trials)?).map_err(|e| data(format!("{}: {e}", a.trials.display())))?;
    let report = repeatability_stats(&sets).map_err(data)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for m in &report.modes {
        rows.push(vec![m.mode.to_string(), m.deviations_mm.len().to_string(), m.mean_deviation_mm.to_string()]);
        summary.push(format!("{}: {:.4} mm over {} trials", m.mode, m.mean_deviation_mm, m.deviations_mm.len()));
    }
    let total: usize = report.modes.iter().map(|m| m.deviations_mm.len()).sum();
    rows.push(vec!["overall".into(), total.to_string(), report.overall_mean_deviation_mm.to_string()]);
    summary.push(format!("overall: {:.4} mm", report.overall_mean_deviation_mm));
    write_csv(&a.out, &REPEATABILITY_HEADER, &rows)?;
    Ok(CommandOutcome { exit_code: EXIT_OK, artifacts: vec![a.out.clone()], summary })
}

fn mode(a: &ModeArgs) -> Result<CommandOutcome, Failure> {
    if !(a.humofit1.is_finite() && a.humofit2.is_finite()) {
        return Err(usage("temperatures must be finite"));
    }
    let m = motion_mode(a.humofit1, a.humofit2).map_err(data)?;
    Ok(CommandOutcome { exit_code: EXIT_OK, artifacts: Vec::new(), summary: vec![m.to_string()] })
}
