//! Incremental 3D convex hull for the small point sets produced by box
//! intersections (at most a few dozen vertices after deduplication).

use crate::geometry::Vec3;
use thiserror::Error;

/// Coplanarity threshold, relative to the diagonal of the input's bounding box.
pub const HULL_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum HullError {
    /// Fewer than four affinely independent points: empty, a point, a
    /// segment or a planar set. Encloses no volume.
    #[error("degenerate point set: no three-dimensional hull")]
    Degenerate,
}

/// A closed convex polytope with outward-oriented triangular faces.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolytope {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    volume: f64,
}

impl ConvexPolytope {
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Enclosed volume, computed once at construction.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Sum of signed tetrahedron volumes of every face against `reference`.
    /// For a closed, consistently oriented surface the result does not depend
    /// on `reference`.
    pub fn signed_volume_about(&self, reference: &Vec3) -> f64 {
        self.faces
            .iter()
            .map(|&[a, b, c]| {
                signed_tetra_volume(
                    reference,
                    &self.vertices[a],
                    &self.vertices[b],
                    &self.vertices[c],
                )
            })
            .sum()
    }

    pub fn centroid_of_vertices(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }
}

/// Signed volume of the tetrahedron `(o, a, b, c)`; positive when `(a, b, c)`
/// is counter-clockwise seen from outside, with `o` behind the face.
pub fn signed_tetra_volume(o: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    (a - o).dot(&(b - o).cross(&(c - o))) / 6.0
}

/// Volume of a hull, i.e. the absolute signed-tetrahedra sum about the
/// vertex centroid.
pub fn polytope_volume(hull: &ConvexPolytope) -> f64 {
    hull.signed_volume_about(&hull.centroid_of_vertices()).abs()
}

struct Face {
    idx: [usize; 3],
    normal: Vec3,
    offset: f64,
}

impl Face {
    fn new(points: &[Vec3], idx: [usize; 3]) -> Self {
        let [a, b, c] = idx.map(|i| points[i]);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        let normal = if len > 0.0 { n / len } else { Vec3::zeros() };
        Face {
            idx,
            normal,
            offset: normal.dot(&a),
        }
    }

    fn distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Builds the convex hull of `points`.
///
/// Points within `HULL_EPS · diag` of the current hull are treated as lying
/// on it and are not inserted.
pub fn convex_hull(points: &[Vec3]) -> Result<ConvexPolytope, HullError> {
    if points.len() < 4 {
        return Err(HullError::Degenerate);
    }
    let (lo, hi) = points.iter().fold(
        (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let diag = (hi - lo).norm();
    let eps = HULL_EPS * diag;
    if diag.is_nan() || diag <= 0.0 {
        return Err(HullError::Degenerate);
    }

    let argmax = |f: &dyn Fn(&Vec3) -> f64| {
        points.iter().enumerate().map(|(i, p)| (i, f(p))).fold(
            (0, f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
    };

    // Initial tetrahedron from extreme points.
    let (i0, _) = argmax(&|p| -p.x);
    let p0 = points[i0];
    let (i1, d1) = argmax(&|p| (p - p0).norm());
    if d1 <= eps {
        return Err(HullError::Degenerate);
    }
    let axis = (points[i1] - p0) / d1;
    let (i2, d2) = argmax(&|p| (p - p0).cross(&axis).norm());
    if d2 <= eps {
        return Err(HullError::Degenerate);
    }
    let plane_n = (points[i1] - p0).cross(&(points[i2] - p0)).normalize();
    let (i3, d3) = argmax(&|p| plane_n.dot(&(p - p0)).abs());
    if d3 <= eps {
        return Err(HullError::Degenerate);
    }

    let seed = [i0, i1, i2, i3];
    let interior = seed.iter().map(|&i| points[i]).sum::<Vec3>() / 4.0;
    let mut faces: Vec<Face> = [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]]
        .into_iter()
        .map(|[a, b, c]| {
            let f = Face::new(points, [a, b, c]);
            if f.distance(&interior) > 0.0 {
                Face::new(points, [a, c, b])
            } else {
                f
            }
        })
        .collect();

    let mut horizon: Vec<[usize; 2]> = Vec::new();
    let mut visible_edges: Vec<[usize; 2]> = Vec::new();
    for (pi, p) in points.iter().enumerate() {
        if seed.contains(&pi) {
            continue;
        }
        let is_visible: Vec<bool> = faces.iter().map(|f| f.distance(p) > eps).collect();
        if !is_visible.iter().any(|&v| v) {
            continue;
        }
        visible_edges.clear();
        for (f, _) in faces.iter().zip(&is_visible).filter(|(_, &v)| v) {
            let [a, b, c] = f.idx;
            visible_edges.extend([[a, b], [b, c], [c, a]]);
        }
        // A directed edge of the visible region is on the horizon when its
        // twin belongs to a face that stays.
        horizon.clear();
        horizon.extend(
            visible_edges
                .iter()
                .filter(|&&[a, b]| !visible_edges.contains(&[b, a])),
        );
        let mut keep = is_visible.iter().map(|v| !v);
        faces.retain(|_| keep.next().unwrap());
        faces.extend(horizon.iter().map(|&[a, b]| Face::new(points, [a, b, pi])));
    }

    // Compact to the vertices actually referenced by faces.
    let mut remap = vec![usize::MAX; points.len()];
    let mut vertices = Vec::new();
    let faces: Vec<[usize; 3]> = faces
        .iter()
        .map(|f| {
            f.idx.map(|i| {
                if remap[i] == usize::MAX {
                    remap[i] = vertices.len();
                    vertices.push(points[i]);
                }
                remap[i]
            })
        })
        .collect();

    let mut hull = ConvexPolytope {
        vertices,
        faces,
        volume: 0.0,
    };
    hull.volume = polytope_volume(&hull);
    Ok(hull)
}
