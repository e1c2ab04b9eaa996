//! Incremental (quickhull-style) 3D convex hull and its volume.

use std::collections::HashMap;

use super::NumericsError;

pub type Point3 = [f64; 3];

/// Minimum extent of the initial simplex along each new direction, in mm.
/// Thinner clouds are rejected instead of perturbed.
pub const MIN_THICKNESS: f64 = 1e-6;

/// Closed triangulated hull with outward-oriented facets.
#[derive(Debug, Clone, PartialEq)]
pub struct Hull3D {
    pub vertices: Vec<Point3>,
    /// Counter-clockwise when seen from outside.
    pub facets: Vec<[usize; 3]>,
}

impl Hull3D {
    /// Unnormalized outward normal of a facet (twice its area in length).
    pub fn facet_area_normal(&self, facet: usize) -> Point3 {
        let [a, b, c] = self.facets[facet].map(|i| self.vertices[i]);
        cross(sub(b, a), sub(c, a))
    }

    /// Largest signed distance of `p` above any facet plane; `<= 0` inside.
    pub fn max_plane_distance(&self, p: Point3) -> f64 {
        (0..self.facets.len())
            .map(|f| {
                let n = self.facet_area_normal(f);
                let len = norm(n);
                dot(n, sub(p, self.vertices[self.facets[f][0]])) / len
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: Point3, tol: f64) -> bool {
        self.max_plane_distance(p) <= tol
    }
}

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug)]
struct Face {
    v: [usize; 3],
    normal: Point3,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(points: &[Point3], v: [usize; 3]) -> Self {
        let [a, b, c] = v.map(|i| points[i]);
        let n = cross(sub(b, a), sub(c, a));
        let len = norm(n);
        let normal = [n[0] / len, n[1] / len, n[2] / len];
        Face {
            v,
            normal,
            offset: dot(normal, a),
            outside: Vec::new(),
            alive: true,
        }
    }

    fn distance(&self, p: Point3) -> f64 {
        dot(self.normal, p) - self.offset
    }

    fn edges(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.v;
        [(a, b), (b, c), (c, a)]
    }
}

/// Index of the maximum of `key`, first index on ties.
fn argmax<I: Iterator<Item = (usize, f64)>>(it: I) -> Option<(usize, f64)> {
    it.fold(None, |best, (i, k)| match best {
        Some((_, bk)) if k <= bk => best,
        _ => Some((i, k)),
    })
}

fn initial_simplex(points: &[Point3]) -> Result<[usize; 4], NumericsError> {
    let mut extremes = Vec::with_capacity(6);
    for axis in 0..3 {
        let lo = argmax(points.iter().enumerate().map(|(i, p)| (i, -p[axis]))).unwrap().0;
        let hi = argmax(points.iter().enumerate().map(|(i, p)| (i, p[axis]))).unwrap().0;
        extremes.push(lo);
        extremes.push(hi);
    }
    let mut best = (extremes[0], extremes[0], -1.0);
    for (k, &i) in extremes.iter().enumerate() {
        for &j in &extremes[k + 1..] {
            let d = norm(sub(points[i], points[j]));
            if d > best.2 {
                best = (i.min(j), i.max(j), d);
            }
        }
    }
    let (i0, i1, span) = best;
    if span < MIN_THICKNESS {
        return Err(NumericsError::Degenerate("all points coincide".into()));
    }
    let axis = sub(points[i1], points[i0]);
    let (i2, d2) = argmax(
        points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, norm(cross(axis, sub(*p, points[i0]))) / span)),
    )
    .unwrap();
    if d2 < MIN_THICKNESS {
        return Err(NumericsError::Degenerate("points are collinear".into()));
    }
    let n = cross(axis, sub(points[i2], points[i0]));
    let nl = norm(n);
    let (i3, d3) = argmax(
        points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, (dot(n, sub(*p, points[i0])) / nl).abs())),
    )
    .unwrap();
    if d3 < MIN_THICKNESS {
        return Err(NumericsError::Degenerate(format!(
            "points are coplanar (thickness {d3:e} mm)"
        )));
    }
    Ok([i0, i1, i2, i3])
}

/// Computes the convex hull of at least four affinely independent points.
///
/// The eye point of each expansion is the farthest outside point of the
/// lowest-indexed open facet, ties going to the lowest point index, so the
/// output is deterministic for a given input order.
pub fn convex_hull_3d(points: &[Point3]) -> Result<Hull3D, NumericsError> {
    if points.len() < 4 {
        return Err(NumericsError::Degenerate(format!(
            "convex hull needs at least 4 points, got {}",
            points.len()
        )));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite("convex hull input"));
    }
    let extent = (0..3)
        .map(|k| {
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
            hi - lo
        })
        .fold(0.0, f64::max);
    let tol = 1e-12 * extent.max(1.0);

    let simplex = initial_simplex(points)?;
    let interior = {
        let s = simplex.iter().fold([0.0; 3], |acc, &i| {
            [acc[0] + points[i][0], acc[1] + points[i][1], acc[2] + points[i][2]]
        });
        [s[0] / 4.0, s[1] / 4.0, s[2] / 4.0]
    };

    let mut faces: Vec<Face> = Vec::new();
    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();

    let [a, b, c, d] = simplex;
    for tri in [[a, b, c], [a, b, d], [a, c, d], [b, c, d]] {
        let mut face = Face::new(points, tri);
        if face.distance(interior) > 0.0 {
            face = Face::new(points, [tri[0], tri[2], tri[1]]);
        }
        let idx = faces.len();
        for e in face.edges() {
            edge_owner.insert(e, idx);
        }
        faces.push(face);
    }

    let in_simplex = |i: usize| simplex.contains(&i);
    assign_points(points, &mut faces, 0..4, (0..points.len()).filter(|&i| !in_simplex(i)), tol);

    let mut cursor = 0;
    while cursor < faces.len() {
        if !faces[cursor].alive || faces[cursor].outside.is_empty() {
            cursor += 1;
            continue;
        }
        let face = &faces[cursor];
        let (eye, _) = argmax(face.outside.iter().map(|&i| (i, face.distance(points[i])))).unwrap();
        let eye_pt = points[eye];

        // visible region by flood fill over facet adjacency
        let mut visible = vec![cursor];
        let mut is_visible: HashMap<usize, bool> = HashMap::from([(cursor, true)]);
        let mut k = 0;
        while k < visible.len() {
            let f = visible[k];
            k += 1;
            for (u, v) in faces[f].edges() {
                let nb = edge_owner[&(v, u)];
                if is_visible.contains_key(&nb) {
                    continue;
                }
                let vis = faces[nb].distance(eye_pt) > tol;
                is_visible.insert(nb, vis);
                if vis {
                    visible.push(nb);
                }
            }
        }

        let mut horizon = Vec::new();
        for &f in &visible {
            for (u, v) in faces[f].edges() {
                let nb = edge_owner[&(v, u)];
                if !is_visible[&nb] {
                    horizon.push((u, v));
                }
            }
        }

        let mut orphans = Vec::new();
        for &f in &visible {
            faces[f].alive = false;
            orphans.append(&mut faces[f].outside);
            for e in faces[f].edges() {
                if edge_owner.get(&e) == Some(&f) {
                    edge_owner.remove(&e);
                }
            }
        }
        orphans.retain(|&i| i != eye);
        orphans.sort_unstable();

        let first_new = faces.len();
        for (u, v) in horizon {
            let face = Face::new(points, [u, v, eye]);
            let idx = faces.len();
            for e in face.edges() {
                edge_owner.insert(e, idx);
            }
            faces.push(face);
        }
        let last = faces.len();
        // only the new facets can receive points, so earlier facets stay settled
        assign_points(points, &mut faces, first_new..last, orphans.into_iter(), tol);
    }

    let alive: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    let mut used: Vec<usize> = alive.iter().flat_map(|f| f.v).collect();
    used.sort_unstable();
    used.dedup();
    let remap: HashMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    Ok(Hull3D {
        vertices: used.iter().map(|&i| points[i]).collect(),
        facets: alive.iter().map(|f| f.v.map(|i| remap[&i])).collect(),
    })
}

fn assign_points(
    points: &[Point3],
    faces: &mut [Face],
    candidates: std::ops::Range<usize>,
    pts: impl Iterator<Item = usize>,
    tol: f64,
) {
    for i in pts {
        let best = argmax(
            candidates
                .clone()
                .map(|f| (f, faces[f].distance(points[i]))),
        );
        if let Some((f, dist)) = best {
            if dist > tol {
                faces[f].outside.push(i);
            }
        }
    }
}

/// Volume enclosed by the hull, summed as signed tetrahedra from the
/// vertex centroid to each facet.
pub fn hull_volume(hull: &Hull3D) -> f64 {
    let n = hull.vertices.len() as f64;
    let centroid = hull.vertices.iter().fold([0.0; 3], |acc, p| {
        [acc[0] + p[0] / n, acc[1] + p[1] / n, acc[2] + p[2] / n]
    });
    hull.facets
        .iter()
        .map(|f| {
            let [a, b, c] = f.map(|i| sub(hull.vertices[i], centroid));
            dot(a, cross(b, c))
        })
        .sum::<f64>()
        / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(side: f64) -> Vec<Point3> {
        let mut pts = Vec::new();
        for x in [0.0, side] {
            for y in [0.0, side] {
                for z in [0.0, side] {
                    pts.push([x, y, z]);
                }
            }
        }
        pts
    }

    #[test]
    fn cube_has_eight_vertices_and_twelve_facets() {
        let hull = convex_hull_3d(&cube(10.0)).unwrap();
        assert_eq!(hull.vertices.len(), 8);
        assert_eq!(hull.facets.len(), 12);
        assert_eq!(hull_volume(&hull), 1000.0);
    }

    #[test]
    fn interior_points_do_not_change_the_cube() {
        let mut pts = cube(10.0);
        pts.extend([[5.0, 5.0, 5.0], [1.0, 2.0, 3.0], [5.0, 5.0, 0.0], [9.9, 0.1, 5.0]]);
        let hull = convex_hull_3d(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 8);
        assert_eq!(hull.facets.len(), 12);
        assert!((hull_volume(&hull) - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn regular_tetrahedron_volume() {
        let s = 1.0 / (2.0 * 2f64.sqrt());
        let pts = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        let hull = convex_hull_3d(&pts).unwrap();
        assert_eq!(hull.facets.len(), 4);
        assert!((hull_volume(&hull) - 2f64.sqrt() / 12.0).abs() < 1e-12);
    }

    #[test]
    fn every_edge_is_shared_by_exactly_two_facets() {
        let pts: Vec<Point3> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.7;
                [t.cos() * 10.0, (1.3 * t).sin() * 7.0, (0.37 * t).sin() * 5.0 + t * 0.1]
            })
            .collect();
        let hull = convex_hull_3d(&pts).unwrap();
        let mut directed = HashMap::new();
        for f in &hull.facets {
            for (u, v) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                assert!(directed.insert((u, v), ()).is_none(), "duplicate directed edge");
            }
        }
        for &(u, v) in directed.keys() {
            assert!(directed.contains_key(&(v, u)), "unmatched edge");
        }
        // Euler characteristic of a sphere
        let v = hull.vertices.len() as i64;
        let f = hull.facets.len() as i64;
        let e = directed.len() as i64 / 2;
        assert_eq!(v - e + f, 2);
    }

    #[test]
    fn coplanar_input_is_rejected() {
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 5e-7]];
        assert!(matches!(convex_hull_3d(&pts), Err(NumericsError::Degenerate(_))));
    }

    #[test]
    fn too_few_points_are_rejected() {
        assert!(convex_hull_3d(&cube(1.0)[..3]).is_err());
    }
}
