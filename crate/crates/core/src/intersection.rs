//! Exact volumetric intersection of two oriented boxes.
//!
//! Every vertex of the intersection polytope is the meet of three face planes
//! drawn from the two boxes. That leaves four kinds of candidates: corners of
//! either box, and crossings of an edge of one box with a face plane of the
//! other. Candidates inside both boxes span the intersection, whose volume
//! comes from its convex hull.

use crate::geometry::{canonical_pair, OrientedBox, Vec3, DEFAULT_TOL};
use crate::hull::{convex_hull, ConvexPolytope, HullError};

/// Which feature pair produced a candidate point. Indices are zero-based
/// positions in the topology tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    CornerOfA(usize),
    CornerOfB(usize),
    EdgeAFaceB { edge: usize, face: usize },
    EdgeBFaceA { edge: usize, face: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidatePoint {
    pub position: Vec3,
    pub provenance: Provenance,
}

/// Relative threshold below which an edge/plane system counts as singular.
const SINGULAR_EPS: f64 = 1e-12;

/// Relative dedupe radius, scaled by the larger box diagonal.
const DEDUPE_EPS: f64 = 1e-9;

/// Candidate crossings of one box's edges with the other's face planes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeFaceCrossings {
    pub points: Vec<CandidatePoint>,
    /// Systems skipped because the edge is parallel to, or lies in, the plane.
    pub singular: usize,
}

/// Solves `start + t·m = origin + s·a + u·b` for the edge parameter `t`.
/// Returns `None` for singular systems.
fn edge_plane_param(start: &Vec3, m: &Vec3, origin: &Vec3, a: &Vec3, b: &Vec3) -> Option<f64> {
    // Cramer's rule on [m, -a, -b]·(t, s, u) = origin - start; only t is needed.
    let n = a.cross(b);
    let det = m.dot(&n);
    if det.abs() <= SINGULAR_EPS * m.norm() * n.norm() {
        return None;
    }
    Some((origin - start).dot(&n) / det)
}

fn crossings_into(
    edges_of: &OrientedBox,
    faces_of: &OrientedBox,
    tol: f64,
    tag: fn(usize, usize) -> Provenance,
    out: &mut EdgeFaceCrossings,
) {
    let faces: [_; 6] = std::array::from_fn(|f| faces_of.face(f));
    for e in 0..12 {
        let seg = edges_of.edge(e);
        let m = seg.slope();
        for (f, face) in faces.iter().enumerate() {
            match edge_plane_param(&seg.start, &m, &face.origin, &face.span_s, &face.span_t) {
                None => out.singular += 1,
                Some(t) if (-tol..=1.0 + tol).contains(&t) => out.points.push(CandidatePoint {
                    position: seg.at(t.clamp(0.0, 1.0)),
                    provenance: tag(e, f),
                }),
                Some(_) => {}
            }
        }
    }
}

/// All 144 edge/face-plane systems between the two boxes. Face parameter
/// bounds are not checked here; the dual containment filter covers them.
pub fn edge_face_intersections(a: &OrientedBox, b: &OrientedBox, tol: f64) -> EdgeFaceCrossings {
    let mut out = EdgeFaceCrossings::default();
    crossings_into(
        a,
        b,
        tol,
        |edge, face| Provenance::EdgeAFaceB { edge, face },
        &mut out,
    );
    crossings_into(
        b,
        a,
        tol,
        |edge, face| Provenance::EdgeBFaceA { edge, face },
        &mut out,
    );
    out
}

/// Corners of both boxes followed by every edge/face crossing, unfiltered.
pub fn candidate_points(a: &OrientedBox, b: &OrientedBox, tol: f64) -> Vec<CandidatePoint> {
    let corners_a = a
        .corners()
        .into_iter()
        .enumerate()
        .map(|(i, p)| CandidatePoint {
            position: p,
            provenance: Provenance::CornerOfA(i),
        });
    let corners_b = b
        .corners()
        .into_iter()
        .enumerate()
        .map(|(i, p)| CandidatePoint {
            position: p,
            provenance: Provenance::CornerOfB(i),
        });
    let mut out: Vec<CandidatePoint> = corners_a.chain(corners_b).collect();
    out.extend(edge_face_intersections(a, b, tol).points);
    out
}

/// Keeps candidates contained in both boxes and merges near-coincident ones.
pub fn filter_valid(
    points: &[CandidatePoint],
    a: &OrientedBox,
    b: &OrientedBox,
    tol: f64,
) -> Vec<Vec3> {
    let radius = DEDUPE_EPS * a.diagonal().max(b.diagonal());
    let radius_sq = radius * radius;
    let mut kept: Vec<Vec3> = Vec::with_capacity(points.len());
    for c in points {
        let p = c.position;
        if !(a.contains_point(&p, tol) && b.contains_point(&p, tol)) {
            continue;
        }
        if kept.iter().all(|q| (q - p).norm_squared() > radius_sq) {
            kept.push(p);
        }
    }
    kept
}

/// The intersection polytope of two boxes, or `Degenerate` when it encloses
/// no volume (disjoint, touching along a face, edge or corner).
pub fn intersection_polytope(
    a: &OrientedBox,
    b: &OrientedBox,
    tol: f64,
) -> Result<ConvexPolytope, HullError> {
    let (a, b, _) = canonical_pair(a, b);
    let candidates = candidate_points(a, b, tol);
    convex_hull(&filter_valid(&candidates, a, b, tol))
}

/// Volume of the intersection; zero for degenerate hulls.
pub fn intersection_volume(a: &OrientedBox, b: &OrientedBox, tol: f64) -> f64 {
    match intersection_polytope(a, b, tol) {
        Ok(hull) => hull.volume().min(a.volume()).min(b.volume()),
        Err(HullError::Degenerate) => 0.0,
    }
}

/// Volumetric intersection over union with an explicit tolerance.
pub fn iou_with_tol(a: &OrientedBox, b: &OrientedBox, tol: f64) -> f64 {
    let inter = intersection_volume(a, b, tol);
    let union = a.volume() + b.volume() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Volumetric intersection over union.
pub fn iou(a: &OrientedBox, b: &OrientedBox) -> f64 {
    iou_with_tol(a, b, DEFAULT_TOL)
}
