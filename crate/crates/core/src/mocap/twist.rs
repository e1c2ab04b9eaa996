use std::collections::BTreeSet;

use super::{MarkerSet, MocapError};
use crate::numerics::{fit_circle_2d, Circle2D};

/// Circle through the top-view projection of the markers at one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerCircle {
    pub frame: u64,
    pub circle: Circle2D,
    pub markers_used: Vec<String>,
}

impl MarkerCircle {
    /// Experimental twist radius, mm.
    pub fn radius_mm(&self) -> f64 {
        self.circle.radius
    }
}

/// Fits a circle to the x-y positions of every non-reference marker
/// visible at `frame`.
pub fn experimental_twist_radius(
    markers: &MarkerSet,
    frame: u64,
    reference_ids: &BTreeSet<String>,
) -> Result<MarkerCircle, MocapError> {
    let visible: Vec<_> = markers
        .at_frame(frame)
        .into_iter()
        .filter(|s| !reference_ids.contains(&s.marker_id))
        .collect();
    if visible.len() < 3 {
        let seen: BTreeSet<&str> = visible.iter().map(|s| s.marker_id.as_str()).collect();
        let missing = markers
            .marker_ids()
            .filter(|id| !reference_ids.contains(*id) && !seen.contains(id))
            .map(str::to_string)
            .collect();
        return Err(MocapError::InsufficientMarkers {
            frame,
            available: visible.len(),
            missing,
        });
    }
    let points: Vec<[f64; 2]> = visible.iter().map(|s| [s.position[0], s.position[1]]).collect();
    let circle = fit_circle_2d(&points)?;
    Ok(MarkerCircle {
        frame,
        circle,
        markers_used: visible.iter().map(|s| s.marker_id.clone()).collect(),
    })
}

/// Frame with the most visible non-reference markers; the earliest wins a
/// tie. `None` for an empty set.
pub fn best_frame(markers: &MarkerSet, reference_ids: &BTreeSet<String>) -> Option<u64> {
    markers
        .frames()
        .into_iter()
        .map(|f| {
            let n = markers
                .at_frame(f)
                .iter()
                .filter(|s| !reference_ids.contains(&s.marker_id))
                .count();
            (f, n)
        })
        .fold(None, |best: Option<(u64, usize)>, (f, n)| match best {
            Some((_, bn)) if n <= bn => best,
            _ => Some((f, n)),
        })
        .map(|(f, _)| f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn helix_radius_is_recovered() {
        let set = synthetic::helix_markers(40.0, 7, false);
        let fit = experimental_twist_radius(&set, synthetic::HELIX_FULL_FRAME, &BTreeSet::new()).unwrap();
        assert!((fit.radius_mm() - 40.0).abs() < 1e-6);
        assert_eq!(fit.markers_used.len(), 7);
    }

    #[test]
    fn reference_marker_is_excluded() {
        let set = synthetic::helix_markers(40.0, 7, true);
        let refs = BTreeSet::from([synthetic::REFERENCE_MARKER_ID.to_string()]);
        let fit = experimental_twist_radius(&set, synthetic::HELIX_FULL_FRAME, &refs).unwrap();
        assert!((fit.radius_mm() - 40.0).abs() < 1e-6);
        assert_eq!(fit.markers_used.len(), 7);
    }

    #[test]
    fn occluded_frame_names_missing_markers() {
        let set = synthetic::helix_markers(40.0, 7, false);
        match experimental_twist_radius(&set, synthetic::HELIX_SPARSE_FRAME, &BTreeSet::new()) {
            Err(MocapError::InsufficientMarkers { available, missing, .. }) => {
                assert_eq!(available, 2);
                assert_eq!(missing.len(), 5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn best_frame_has_all_markers() {
        let set = synthetic::helix_markers(40.0, 7, true);
        let refs = BTreeSet::from([synthetic::REFERENCE_MARKER_ID.to_string()]);
        assert_eq!(best_frame(&set, &refs), Some(synthetic::HELIX_FULL_FRAME));
        assert_eq!(best_frame(&MarkerSet::default(), &refs), None);
    }
}
