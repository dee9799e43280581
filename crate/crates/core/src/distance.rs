//! Volume-to-volume distance: the shortest distance between the surfaces of
//! two oriented boxes, zero whenever they overlap.
//!
//! The closest pair of two disjoint boxes is always realized by one of six
//! feature pairings: corner/face and corner/edge (each way), edge/edge, and
//! corner/corner. Each pairing has a closed-form projection; the distance is
//! the minimum over the (at most 496) valid pairs.

use crate::geometry::{canonical_pair, OrientedBox, Segment, Vec3, DEFAULT_TOL};
use crate::intersection::intersection_volume;

/// Feature pairing that produced a [`PointPair`]. Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    CornerAFaceB { corner: usize, face: usize },
    CornerBFaceA { corner: usize, face: usize },
    CornerAEdgeB { corner: usize, edge: usize },
    CornerBEdgeA { corner: usize, edge: usize },
    EdgeAEdgeB { edge_a: usize, edge_b: usize },
    CornerACornerB { corner_a: usize, corner_b: usize },
}

impl PairKind {
    fn swapped(self) -> Self {
        match self {
            PairKind::CornerAFaceB { corner, face } => PairKind::CornerBFaceA { corner, face },
            PairKind::CornerBFaceA { corner, face } => PairKind::CornerAFaceB { corner, face },
            PairKind::CornerAEdgeB { corner, edge } => PairKind::CornerBEdgeA { corner, edge },
            PairKind::CornerBEdgeA { corner, edge } => PairKind::CornerAEdgeB { corner, edge },
            PairKind::EdgeAEdgeB { edge_a, edge_b } => PairKind::EdgeAEdgeB {
                edge_a: edge_b,
                edge_b: edge_a,
            },
            PairKind::CornerACornerB { corner_a, corner_b } => PairKind::CornerACornerB {
                corner_a: corner_b,
                corner_b: corner_a,
            },
        }
    }

    pub fn is_corner_corner(&self) -> bool {
        matches!(self, PairKind::CornerACornerB { .. })
    }
}

/// A candidate closest pair: one point on each box surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointPair {
    pub on_a: Vec3,
    pub on_b: Vec3,
    pub distance: f64,
    pub kind: PairKind,
}

impl PointPair {
    fn new(on_a: Vec3, on_b: Vec3, kind: PairKind) -> Self {
        Self {
            on_a,
            on_b,
            distance: (on_a - on_b).norm(),
            kind,
        }
    }

    fn swapped(self) -> Self {
        Self {
            on_a: self.on_b,
            on_b: self.on_a,
            distance: self.distance,
            kind: self.kind.swapped(),
        }
    }
}

/// Orthogonal projection of a point onto a box face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceProjection {
    /// Unsigned distance from the point to the face plane.
    pub distance: f64,
    pub point: Vec3,
}

fn in_unit_range(t: f64, tol: f64) -> bool {
    (-tol..=1.0 + tol).contains(&t)
}

/// Projects `point` onto face `face` of `b`. Returns `None` when the foot of
/// the perpendicular falls outside the face.
pub fn project_point_onto_face(
    point: &Vec3,
    b: &OrientedBox,
    face: usize,
    tol: f64,
) -> Option<FaceProjection> {
    let patch = b.face(face);
    let n = b.face_normal(face);
    let signed = n.dot(&(point - patch.origin));
    let foot = point - n * signed;
    let (s, t) = patch.params(point);
    if !(in_unit_range(s, tol) && in_unit_range(t, tol)) {
        return None;
    }
    Some(FaceProjection {
        distance: signed.abs(),
        point: foot,
    })
}

/// Projects `point` onto edge `edge` of `b`, returning the edge parameter and
/// the projected point. `None` when the parameter leaves `[0, 1]`.
pub fn project_point_onto_edge(
    point: &Vec3,
    b: &OrientedBox,
    edge: usize,
    tol: f64,
) -> Option<(f64, Vec3)> {
    project_point_onto_segment(point, &b.edge(edge), tol)
}

pub fn project_point_onto_segment(point: &Vec3, seg: &Segment, tol: f64) -> Option<(f64, Vec3)> {
    let m = seg.slope();
    let t = (point - seg.start).dot(&m) / m.norm_squared();
    if !in_unit_range(t, tol) {
        return None;
    }
    let t = t.clamp(0.0, 1.0);
    Some((t, seg.at(t)))
}

/// Mutually closest points of two segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentClosest {
    pub t_a: f64,
    pub t_b: f64,
    pub on_a: Vec3,
    pub on_b: Vec3,
}

impl SegmentClosest {
    pub fn distance(&self) -> f64 {
        (self.on_a - self.on_b).norm()
    }
}

/// Closest points of the lines through two segments, accepted only when both
/// parameters fall inside their segments.
///
/// Minimizing `‖(a₀ + s·mₐ) − (b₀ + t·m_b)‖²` gives the normal equations
///
/// ```text
/// [ mₐ·mₐ   −mₐ·m_b ] [s]   [ −mₐ·w ]
/// [ mₐ·m_b  −m_b·m_b] [t] = [ −m_b·w ],   w = a₀ − b₀
/// ```
///
/// with Gram determinant `D = ‖mₐ‖²‖m_b‖² − (mₐ·m_b)²`. Parallel segments
/// (`D ≈ 0`) yield `None`; their closest pair is always attained at an
/// endpoint and is covered by the corner pairings.
pub fn closest_points_between_edges(a: &Segment, b: &Segment, tol: f64) -> Option<SegmentClosest> {
    let (ma, mb) = (a.slope(), b.slope());
    let w = a.start - b.start;
    let aa = ma.norm_squared();
    let bb = mb.norm_squared();
    let ab = ma.dot(&mb);
    let gram = aa * bb - ab * ab;
    if gram.abs() <= 1e-12 * aa * bb {
        return None;
    }
    let (da, db) = (ma.dot(&w), mb.dot(&w));
    let t_a = (ab * db - bb * da) / gram;
    let t_b = (aa * db - ab * da) / gram;
    if !(in_unit_range(t_a, tol) && in_unit_range(t_b, tol)) {
        return None;
    }
    let (t_a, t_b) = (t_a.clamp(0.0, 1.0), t_b.clamp(0.0, 1.0));
    Some(SegmentClosest {
        t_a,
        t_b,
        on_a: a.at(t_a),
        on_b: b.at(t_b),
    })
}

/// Exact distance between two segments from the same feature pairings used
/// for boxes: interior/interior, endpoint/interior and endpoint/endpoint.
pub fn segment_distance(a: &Segment, b: &Segment, tol: f64) -> f64 {
    let mut best = f64::INFINITY;
    if let Some(c) = closest_points_between_edges(a, b, tol) {
        best = best.min(c.distance());
    }
    for (p, seg) in [(a.start, b), (a.end, b), (b.start, a), (b.end, a)] {
        if let Some((_, q)) = project_point_onto_segment(&p, seg, tol) {
            best = best.min((p - q).norm());
        }
    }
    for p in [a.start, a.end] {
        for q in [b.start, b.end] {
            best = best.min((p - q).norm());
        }
    }
    best
}

/// Upper bound on the number of point pairs [`enumerate_ppois`] can return.
pub const MAX_PPOIS: usize = 2 * 8 * 6 + 2 * 8 * 12 + 12 * 12 + 8 * 8;

fn ppois_into(a: &OrientedBox, b: &OrientedBox, tol: f64, out: &mut Vec<PointPair>) {
    let corners_a = a.corners();
    let corners_b = b.corners();
    let edges_a: [Segment; 12] = std::array::from_fn(|e| a.edge(e));
    let edges_b: [Segment; 12] = std::array::from_fn(|e| b.edge(e));

    for (corner, c) in corners_a.iter().enumerate() {
        for face in 0..6 {
            if let Some(p) = project_point_onto_face(c, b, face, tol) {
                out.push(PointPair::new(
                    *c,
                    p.point,
                    PairKind::CornerAFaceB { corner, face },
                ));
            }
        }
    }
    for (corner, c) in corners_b.iter().enumerate() {
        for face in 0..6 {
            if let Some(p) = project_point_onto_face(c, a, face, tol) {
                out.push(PointPair::new(
                    p.point,
                    *c,
                    PairKind::CornerBFaceA { corner, face },
                ));
            }
        }
    }
    for (corner, c) in corners_a.iter().enumerate() {
        for (edge, seg) in edges_b.iter().enumerate() {
            if let Some((_, q)) = project_point_onto_segment(c, seg, tol) {
                out.push(PointPair::new(
                    *c,
                    q,
                    PairKind::CornerAEdgeB { corner, edge },
                ));
            }
        }
    }
    for (corner, c) in corners_b.iter().enumerate() {
        for (edge, seg) in edges_a.iter().enumerate() {
            if let Some((_, q)) = project_point_onto_segment(c, seg, tol) {
                out.push(PointPair::new(
                    q,
                    *c,
                    PairKind::CornerBEdgeA { corner, edge },
                ));
            }
        }
    }
    for (edge_a, sa) in edges_a.iter().enumerate() {
        for (edge_b, sb) in edges_b.iter().enumerate() {
            if let Some(c) = closest_points_between_edges(sa, sb, tol) {
                out.push(PointPair::new(
                    c.on_a,
                    c.on_b,
                    PairKind::EdgeAEdgeB { edge_a, edge_b },
                ));
            }
        }
    }
    for (corner_a, ca) in corners_a.iter().enumerate() {
        for (corner_b, cb) in corners_b.iter().enumerate() {
            out.push(PointPair::new(
                *ca,
                *cb,
                PairKind::CornerACornerB { corner_a, corner_b },
            ));
        }
    }
}

/// Every valid point pair of interest between the two box surfaces.
pub fn enumerate_ppois(a: &OrientedBox, b: &OrientedBox, tol: f64) -> Vec<PointPair> {
    let mut out = Vec::with_capacity(MAX_PPOIS);
    ppois_into(a, b, tol, &mut out);
    out
}

/// The closest pair of surface points. Ties resolve to the earliest pairing in
/// enumeration order, evaluated in canonical argument order.
pub fn closest_pair(a: &OrientedBox, b: &OrientedBox, tol: f64) -> PointPair {
    let (first, second, swapped) = canonical_pair(a, b);
    let best = enumerate_ppois(first, second, tol)
        .into_iter()
        .reduce(|best, p| if p.distance < best.distance { p } else { best })
        .expect("corner pairs are always present");
    if swapped {
        best.swapped()
    } else {
        best
    }
}

/// Volume-to-volume distance with an explicit tolerance.
pub fn v2v_with_tol(a: &OrientedBox, b: &OrientedBox, tol: f64) -> f64 {
    if intersection_volume(a, b, tol) > 0.0 {
        return 0.0;
    }
    closest_pair(a, b, tol).distance
}

/// Volume-to-volume distance: zero under any overlap, otherwise the shortest
/// surface-to-surface distance.
pub fn v2v(a: &OrientedBox, b: &OrientedBox) -> f64 {
    v2v_with_tol(a, b, DEFAULT_TOL)
}
