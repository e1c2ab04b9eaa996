use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};

use super::{MarkerSample, MarkerSet, MocapError};
use crate::actuator::MotionMode;

pub const TRIAL_HEADER: &str = "trial,mode,x_mm,y_mm,z_mm";

/// Marker id that carries the actuator tip in multi-marker recordings.
pub const TIP_MARKER_ID: &str = "tip";

/// Endpoints of repeated actuations in one motion mode, one per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSet {
    pub mode: MotionMode,
    pub endpoints: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeRepeatability {
    pub mode: MotionMode,
    pub mean_endpoint: [f64; 3],
    /// Distance of each trial's endpoint from `mean_endpoint`, mm.
    pub deviations_mm: Vec<f64>,
    pub mean_deviation_mm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatabilityReport {
    pub modes: Vec<ModeRepeatability>,
    /// Mean of the per-mode mean deviations, mm.
    pub overall_mean_deviation_mm: f64,
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn mode_stats(set: &TrialSet) -> Result<ModeRepeatability, MocapError> {
    let n = set.endpoints.len();
    if n < 2 {
        return Err(MocapError::InsufficientData { mode: set.mode.to_string(), trials: n });
    }
    let nf = n as f64;
    // offsets from the first endpoint keep identical trials exactly at zero
    let o = set.endpoints[0];
    let shift = set.endpoints.iter().fold([0.0; 3], |acc, p| {
        [acc[0] + (p[0] - o[0]), acc[1] + (p[1] - o[1]), acc[2] + (p[2] - o[2])]
    });
    let mean = [o[0] + shift[0] / nf, o[1] + shift[1] / nf, o[2] + shift[2] / nf];
    let deviations_mm: Vec<f64> = set.endpoints.iter().map(|p| distance(*p, mean)).collect();
    let mean_deviation_mm = deviations_mm.iter().sum::<f64>() / nf;
    Ok(ModeRepeatability { mode: set.mode, mean_endpoint: mean, deviations_mm, mean_deviation_mm })
}

/// Mean Euclidean deviation of the trial endpoints from their mean, per
/// mode, and the average of those per-mode values.
pub fn repeatability_stats(sets: &[TrialSet]) -> Result<RepeatabilityReport, MocapError> {
    if sets.is_empty() {
        return Err(MocapError::InsufficientData { mode: "any".into(), trials: 0 });
    }
    let modes = sets.iter().map(mode_stats).collect::<Result<Vec<_>, _>>()?;
    let overall = modes.iter().map(|m| m.mean_deviation_mm).sum::<f64>() / modes.len() as f64;
    Ok(RepeatabilityReport { modes, overall_mean_deviation_mm: overall })
}

/// Sample of maximum displacement from the first sample of a track; the
/// earliest such sample on ties.
pub fn tip_endpoint(track: &[MarkerSample]) -> Option<&MarkerSample> {
    let first = track.first()?.position;
    track.iter().fold(None, |best: Option<(&MarkerSample, f64)>, s| {
        let d = distance(s.position, first);
        match best {
            Some((_, bd)) if d <= bd => best,
            _ => Some((s, d)),
        }
    })
    .map(|(s, _)| s)
}

/// Endpoint of one actuation recording: the `tip` marker, or the only
/// marker, at its maximally displaced frame.
pub fn mode_endpoint(markers: &MarkerSet) -> Result<[f64; 3], MocapError> {
    let track = match markers.tracks.get(TIP_MARKER_ID) {
        Some(t) => t,
        None if markers.tracks.len() == 1 => markers.tracks.values().next().unwrap(),
        None => {
            return Err(MocapError::NoEndpointMarker(format!(
                "expected a {TIP_MARKER_ID:?} marker or a single marker, found {}",
                markers.tracks.len()
            )))
        }
    };
    tip_endpoint(track)
        .map(|s| s.position)
        .ok_or_else(|| MocapError::NoEndpointMarker("empty track".into()))
}

/// Reads a trial CSV into one set per mode, in bending, twisting,
/// extension order. Modes absent from the file are omitted.
pub fn load_trials<R: Read>(source: R) -> Result<Vec<TrialSet>, MocapError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        None => return Ok(Vec::new()),
        Some(h) => h?,
    };
    let found = header.iter().collect::<Vec<_>>().join(",");
    if found != TRIAL_HEADER {
        return Err(MocapError::Header { expected: TRIAL_HEADER.into(), found });
    }
    let mut grouped: BTreeMap<MotionMode, Vec<[f64; 3]>> = BTreeMap::new();
    let mut seen = HashSet::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 5 {
            return Err(MocapError::Parse { line, message: format!("expected 5 fields, found {}", rec.len()) });
        }
        let trial: u64 = rec[0].parse().map_err(|_| MocapError::Parse {
            line,
            message: format!("cannot parse trial from {:?}", &rec[0]),
        })?;
        let mode: MotionMode = rec[1].parse().map_err(|m| MocapError::Parse { line, message: m })?;
        let mut p = [0.0; 3];
        for (k, name) in ["x_mm", "y_mm", "z_mm"].iter().enumerate() {
            p[k] = rec[2 + k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| MocapError::Parse {
                    line,
                    message: format!("cannot parse {name} from {:?}", &rec[2 + k]),
                })?;
        }
        if !seen.insert((mode, trial)) {
            return Err(MocapError::DuplicateTrial { line, trial, mode: mode.to_string() });
        }
        grouped.entry(mode).or_default().push(p);
    }
    Ok(grouped.into_iter().map(|(mode, endpoints)| TrialSet { mode, endpoints }).collect())
}

pub fn write_trials<W: Write>(sets: &[TrialSet], sink: W) -> Result<(), MocapError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record(TRIAL_HEADER.split(','))?;
    for set in sets {
        for (i, p) in set.endpoints.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                set.mode.to_string(),
                p[0].to_string(),
                p[1].to_string(),
                p[2].to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| MocapError::Csv(e.to_string()))?;
    Ok(())
}
