use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};

use super::MocapError;

/// Required first line of a marker file. A trailing `config` column may
/// follow to label frames by actuation configuration.
pub const MARKER_HEADER: &str = "frame,time_s,marker_id,x_mm,y_mm,z_mm";
const CONFIG_COLUMN: &str = "config";

#[derive(Debug, Clone, PartialEq)]
pub struct MarkerSample {
    pub frame: u64,
    pub time_s: f64,
    pub marker_id: String,
    pub position: [f64; 3],
    pub config: Option<String>,
}

/// Marker tracks keyed by id, each sorted by frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MarkerSet {
    pub tracks: BTreeMap<String, Vec<MarkerSample>>,
    pub has_config: bool,
}

impl MarkerSet {
    pub fn from_samples(samples: Vec<MarkerSample>) -> Self {
        let has_config = samples.iter().any(|s| s.config.is_some());
        let mut tracks: BTreeMap<String, Vec<MarkerSample>> = BTreeMap::new();
        for s in samples {
            tracks.entry(s.marker_id.clone()).or_default().push(s);
        }
        for t in tracks.values_mut() {
            t.sort_by_key(|s| s.frame);
        }
        Self { tracks, has_config }
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn marker_ids(&self) -> impl Iterator<Item = &str> {
        self.tracks.keys().map(String::as_str)
    }

    pub fn samples(&self) -> impl Iterator<Item = &MarkerSample> {
        self.tracks.values().flatten()
    }

    pub fn frames(&self) -> BTreeSet<u64> {
        self.samples().map(|s| s.frame).collect()
    }

    /// Markers visible at `frame`, in id order.
    pub fn at_frame(&self, frame: u64) -> Vec<&MarkerSample> {
        self.tracks
            .values()
            .filter_map(|t| t.binary_search_by_key(&frame, |s| s.frame).ok().map(|i| &t[i]))
            .collect()
    }
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<T, MocapError> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse::<T>().map_err(|_| MocapError::Parse {
        line,
        message: format!("cannot parse {name} from {raw:?}"),
    })
}

fn parse_coord(rec: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<f64, MocapError> {
    let v: f64 = parse_field(rec, idx, name, line)?;
    if !v.is_finite() {
        return Err(MocapError::Parse { line, message: format!("{name} is not finite") });
    }
    Ok(v)
}

/// Reads a marker CSV. Rows may come in any order; tracks come back sorted
/// by frame.
pub fn load_trajectories<R: Read>(source: R) -> Result<MarkerSet, MocapError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        None => return Ok(MarkerSet::default()),
        Some(h) => h?,
    };
    let header_line = header.iter().collect::<Vec<_>>().join(",");
    let with_config = format!("{MARKER_HEADER},{CONFIG_COLUMN}");
    let has_config = if header_line == MARKER_HEADER {
        false
    } else if header_line == with_config {
        true
    } else {
        return Err(MocapError::Header {
            expected: MARKER_HEADER.to_string(),
            found: header_line,
        });
    };
    let width = if has_config { 7 } else { 6 };

    let mut seen: HashMap<(u64, String), u64> = HashMap::new();
    let mut samples = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(MocapError::Parse {
                line,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        let frame: u64 = parse_field(&rec, 0, "frame", line)?;
        let time_s = parse_coord(&rec, 1, "time_s", line)?;
        let marker_id = rec[2].to_string();
        if marker_id.is_empty() {
            return Err(MocapError::Parse { line, message: "empty marker_id".into() });
        }
        let position = [
            parse_coord(&rec, 3, "x_mm", line)?,
            parse_coord(&rec, 4, "y_mm", line)?,
            parse_coord(&rec, 5, "z_mm", line)?,
        ];
        if seen.insert((frame, marker_id.clone()), line).is_some() {
            return Err(MocapError::DuplicateSample { line, frame, marker_id });
        }
        let config = has_config.then(|| rec[6].to_string());
        samples.push((line, MarkerSample { frame, time_s, marker_id, position, config }));
    }

    let mut set = MarkerSet::from_samples(Vec::new());
    set.has_config = has_config;
    let mut by_marker: BTreeMap<String, Vec<(u64, MarkerSample)>> = BTreeMap::new();
    for (line, s) in samples {
        by_marker.entry(s.marker_id.clone()).or_default().push((line, s));
    }
    for (id, mut track) in by_marker {
        track.sort_by_key(|(_, s)| s.frame);
        if let Some(w) = track.windows(2).find(|w| w[1].1.time_s < w[0].1.time_s) {
            let line = w[0].0.max(w[1].0);
            return Err(MocapError::NonMonotonicTime { line, marker_id: id });
        }
        set.tracks.insert(id, track.into_iter().map(|(_, s)| s).collect());
    }
    Ok(set)
}

/// Writes the set in canonical order: by frame, then marker id. Numbers use
/// the shortest representation that parses back to the same value.
pub fn write_trajectories<W: Write>(set: &MarkerSet, sink: W) -> Result<(), MocapError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    let mut header: Vec<&str> = MARKER_HEADER.split(',').collect();
    if set.has_config {
        header.push(CONFIG_COLUMN);
    }
    w.write_record(&header)?;
    let mut rows: Vec<&MarkerSample> = set.samples().collect();
    rows.sort_by(|a, b| (a.frame, &a.marker_id).cmp(&(b.frame, &b.marker_id)));
    for s in rows {
        let mut rec = vec![
            s.frame.to_string(),
            s.time_s.to_string(),
            s.marker_id.clone(),
            s.position[0].to_string(),
            s.position[1].to_string(),
            s.position[2].to_string(),
        ];
        if set.has_config {
            rec.push(s.config.clone().unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| MocapError::Csv(e.to_string()))?;
    Ok(())
}
