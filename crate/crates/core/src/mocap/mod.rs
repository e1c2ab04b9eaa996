//! Motion-capture analyses: marker CSV ingest, top-view circle fits for the
//! experimental twist radius, convex-hull sweep volumes and endpoint
//! repeatability.

mod repeatability;
mod sweep;
mod trajectory;
mod twist;

pub use repeatability::{
    load_trials, mode_endpoint, repeatability_stats, tip_endpoint, write_trials, ModeRepeatability,
    RepeatabilityReport, TrialSet, TIP_MARKER_ID, TRIAL_HEADER,
};
pub use sweep::{sweep_hull, sweep_volume, sweep_volumes_by_config};
pub use trajectory::{load_trajectories, write_trajectories, MarkerSample, MarkerSet, MARKER_HEADER};
pub use twist::{best_frame, experimental_twist_radius, MarkerCircle};

use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MocapError {
    #[error("csv error: {0}")]
    Csv(String),
    #[error("unexpected header {found:?}, expected {expected:?}")]
    Header { expected: String, found: String },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: duplicate sample for marker {marker_id:?} at frame {frame}")]
    DuplicateSample { line: u64, frame: u64, marker_id: String },
    #[error("line {line}: time goes backwards for marker {marker_id:?}")]
    NonMonotonicTime { line: u64, marker_id: String },
    #[error("line {line}: duplicate trial {trial} for mode {mode}")]
    DuplicateTrial { line: u64, trial: u64, mode: String },
    #[error("frame {frame}: only {available} usable markers, missing {missing:?}")]
    InsufficientMarkers {
        frame: u64,
        available: usize,
        missing: Vec<String>,
    },
    #[error("{mode}: need at least 2 trials, got {trials}")]
    InsufficientData { mode: String, trials: usize },
    #[error("no endpoint marker: {0}")]
    NoEndpointMarker(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl From<csv::Error> for MocapError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line());
        match line {
            Some(line) => MocapError::Parse { line, message: e.to_string() },
            None => MocapError::Csv(e.to_string()),
        }
    }
}
