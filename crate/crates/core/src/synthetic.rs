//! Deterministic marker recordings with known answers, shared by tests,
//! the acceptance suite and the CLI demos.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::actuator::MotionMode;
use crate::mocap::{MarkerSample, MarkerSet, TrialSet};

const FRAME_PERIOD_S: f64 = 0.01;
const ACTUATOR_LENGTH_MM: f64 = 170.0;

/// Frame of `helix_markers` where every helix marker is visible.
pub const HELIX_FULL_FRAME: u64 = 3;
/// Frame of `helix_markers` where only two helix markers are visible.
pub const HELIX_SPARSE_FRAME: u64 = 2;
pub const REFERENCE_MARKER_ID: &str = "ref";
const HELIX_CENTER: [f64; 2] = [15.0, -8.0];
const HELIX_VISIBLE: [usize; 5] = [5, 6, 2, 7, 4];

/// Bending half-width whose sweep volume is 10035 mm^3 to four digits.
pub const BENDING_HALF_WIDTH_MM: f64 = 0.7437;
/// Extension stroke whose sweep volume is 5019 mm^3 to four digits.
pub const EXTENSION_STROKE_MM: f64 = 24.6456;

fn sample(frame: u64, id: String, position: [f64; 3], config: Option<&str>) -> MarkerSample {
    MarkerSample {
        frame,
        time_s: frame as f64 * FRAME_PERIOD_S,
        marker_id: id,
        position,
        config: config.map(str::to_string),
    }
}

/// Markers `m1..mN` on a helix of top-view radius `radius` over five
/// frames. Frame `k` shows the first `HELIX_VISIBLE[k]` markers (capped at
/// N). With `include_reference` a static `ref` marker off the helix is
/// visible in every frame.
pub fn helix_markers(radius: f64, n: usize, include_reference: bool) -> MarkerSet {
    let mut out = Vec::new();
    for (frame, &visible) in HELIX_VISIBLE.iter().enumerate() {
        let frame = frame as u64;
        let shown = if frame == HELIX_FULL_FRAME { n } else { visible.min(n) };
        for j in 0..shown {
            let u = 1.6 * PI * j as f64 / n as f64;
            let p = [
                HELIX_CENTER[0] + radius * u.cos(),
                HELIX_CENTER[1] + radius * u.sin(),
                20.0 * j as f64,
            ];
            out.push(sample(frame, format!("m{}", j + 1), p, None));
        }
        if include_reference {
            out.push(sample(frame, REFERENCE_MARKER_ID.into(), [0.0, 0.0, -30.0], None));
        }
    }
    MarkerSet::from_samples(out)
}

/// The eight corners of an axis-aligned cube in frame 0.
pub fn cube_markers(side: f64) -> MarkerSet {
    let out = (0..8)
        .map(|c| {
            let p = [
                side * (c & 1) as f64,
                side * ((c >> 1) & 1) as f64,
                side * ((c >> 2) & 1) as f64,
            ];
            sample(0, format!("c{c}"), p, None)
        })
        .collect();
    MarkerSet::from_samples(out)
}

/// Planar bend from straight to a quarter turn over 31 frames. Markers
/// sit in pairs at four arc positions, offset across the plane by
/// `half_width * s / L`. Labelled `bending`.
pub fn bending_sweep(half_width: f64) -> MarkerSet {
    let l = ACTUATOR_LENGTH_MM;
    let mut out = Vec::new();
    for f in 0..=30u64 {
        let k = PI / 2.0 * f as f64 / 30.0 / l;
        for i in 1..=4 {
            let s = i as f64 * l / 4.0;
            let (x, z) = if k == 0.0 { (s, 0.0) } else { ((k * s).sin() / k, (1.0 - (k * s).cos()) / k) };
            for (tag, sign) in [("p", 1.0), ("n", -1.0)] {
                let p = [x, sign * half_width * s / l, z];
                out.push(sample(f, format!("b{i}{tag}"), p, Some("bending")));
            }
        }
    }
    MarkerSet::from_samples(out)
}

/// Five markers on half of the tip rim translating axially by `stroke`
/// over 21 frames. Labelled `extension`.
pub fn extension_sweep(stroke: f64) -> MarkerSet {
    let mut out = Vec::new();
    for f in 0..=20u64 {
        let e = stroke * f as f64 / 20.0;
        for j in 0..5 {
            let a = PI * j as f64 / 4.0;
            let p = [ACTUATOR_LENGTH_MM + e, 12.0 * a.cos(), 12.0 * a.sin()];
            out.push(sample(f, format!("e{j}"), p, Some("extension")));
        }
    }
    MarkerSet::from_samples(out)
}

/// `count` endpoints in antipodal pairs about `center`, each exactly
/// `deviation` from it, so the mean deviation is `deviation`. Panics on an
/// odd count.
pub fn trials_with_mean_deviation(
    mode: MotionMode,
    center: [f64; 3],
    deviation: f64,
    count: usize,
    seed: u64,
) -> TrialSet {
    assert!(count.is_multiple_of(2), "trial count must be even");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut endpoints = Vec::with_capacity(count);
    for _ in 0..count / 2 {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let a: f64 = rng.gen_range(0.0..2.0 * PI);
        let rho = (1.0 - z * z).sqrt();
        let d = [rho * a.cos(), rho * a.sin(), z];
        for s in [1.0, -1.0] {
            endpoints.push([
                center[0] + s * deviation * d[0],
                center[1] + s * deviation * d[1],
                center[2] + s * deviation * d[2],
            ]);
        }
    }
    TrialSet { mode, endpoints }
}
