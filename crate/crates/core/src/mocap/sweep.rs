use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use super::{MarkerSet, MocapError};
use crate::numerics::{convex_hull_3d, hull_volume, Hull3D, Point3};

/// Convex hull of every marker position recorded in `frames`.
pub fn sweep_hull(markers: &MarkerSet, frames: RangeInclusive<u64>) -> Result<Hull3D, MocapError> {
    let points: Vec<Point3> = markers
        .samples()
        .filter(|s| frames.contains(&s.frame))
        .map(|s| s.position)
        .collect();
    Ok(convex_hull_3d(&points)?)
}

/// Volume swept by the markers over `frames`, mm^3.
pub fn sweep_volume(markers: &MarkerSet, frames: RangeInclusive<u64>) -> Result<f64, MocapError> {
    Ok(hull_volume(&sweep_hull(markers, frames)?))
}

/// Sweep volume of each labelled configuration, for files with a `config`
/// column. Unlabelled sets give an empty map.
pub fn sweep_volumes_by_config(markers: &MarkerSet) -> Result<BTreeMap<String, f64>, MocapError> {
    let mut groups: BTreeMap<String, Vec<Point3>> = BTreeMap::new();
    for s in markers.samples() {
        if let Some(c) = &s.config {
            groups.entry(c.clone()).or_default().push(s.position);
        }
    }
    groups
        .into_iter()
        .map(|(c, pts)| Ok((c, hull_volume(&convex_hull_3d(&pts)?))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn cube_corners() {
        let set = synthetic::cube_markers(10.0);
        assert!((sweep_volume(&set, 0..=u64::MAX).unwrap() - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn bending_fixture_volume() {
        let set = synthetic::bending_sweep(synthetic::BENDING_HALF_WIDTH_MM);
        let v = sweep_volume(&set, 0..=u64::MAX).unwrap();
        // scipy ConvexHull on the same point cloud
        assert!(((v - 10_035.129_233_902_502) / v).abs() < 1e-9, "{v}");
    }

    #[test]
    fn extension_fixture_volume() {
        let set = synthetic::extension_sweep(synthetic::EXTENSION_STROKE_MM);
        let v = sweep_volume(&set, 0..=u64::MAX).unwrap();
        assert!(((v - 5_018.996_415_286_42) / v).abs() < 1e-9, "{v}");
    }

    #[test]
    fn empty_range_is_degenerate() {
        let set = synthetic::cube_markers(10.0);
        assert!(sweep_volume(&set, 5..=6).is_err());
    }
}
