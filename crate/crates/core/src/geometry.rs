//! Oriented boxes, their homogeneous transforms and the unit-cube topology
//! shared by the intersection and distance kernels.
//!
//! A box is stored as center `p`, rotation `R` and extents `d`. Its transform
//! is `T = [R·diag(d) | p]`, so the body axes are scaled before they are
//! rotated and corner `j` lands at `p + R·diag(d)·u_j`.

use nalgebra::{Matrix3, Matrix4, Quaternion, UnitQuaternion, Vector3};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

/// Default containment / parameter tolerance, measured in the unit frame.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Maximum deviation from orthonormality (or unit norm, for quaternions)
/// accepted before a rotation is re-projected.
pub const ROTATION_ACCEPT_TOL: f64 = 1e-6;

/// Corners of the unit cube centered at the origin, in canonical order.
pub const UNIT_CORNERS: [[f64; 3]; 8] = [
    [-0.5, -0.5, -0.5],
    [0.5, -0.5, -0.5],
    [-0.5, 0.5, -0.5],
    [-0.5, -0.5, 0.5],
    [0.5, 0.5, 0.5],
    [-0.5, 0.5, 0.5],
    [0.5, -0.5, 0.5],
    [0.5, 0.5, -0.5],
];

/// The 12 edges as (start, end) indices into [`UNIT_CORNERS`].
pub const EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [1, 7],
    [2, 7],
    [0, 2],
    [3, 6],
    [6, 4],
    [5, 4],
    [3, 5],
    [0, 3],
    [1, 6],
    [7, 4],
    [2, 5],
];

/// The 6 faces as corner triples `(origin, origin + s, origin + t)`. The two
/// spanning vectors cover the whole face for `(s, t) ∈ [0, 1]²`.
pub const FACES: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 1, 3],
    [0, 2, 3],
    [4, 5, 6],
    [4, 5, 7],
    [4, 6, 7],
];

/// Outward normal of each face as (rotation column, sign).
pub const FACE_NORMALS: [(usize, f64); 6] = [
    (2, -1.0),
    (1, -1.0),
    (0, -1.0),
    (2, 1.0),
    (1, 1.0),
    (0, 1.0),
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoxError {
    #[error("non-positive dimension {0:?}")]
    NonPositiveDimension([f64; 3]),
    #[error("non-finite value in box parameters")]
    NonFinite,
    #[error("rotation matrix is not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("rotation matrix is a reflection (det {0:.6})")]
    Reflection(f64),
    #[error("quaternion is not unit length (norm {0:.9})")]
    NotUnitQuaternion(f64),
}

/// Rotation input accepted at box construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rotation {
    /// Row-major 3×3 matrix.
    Matrix([f64; 9]),
    /// Unit quaternion `[w, x, y, z]`.
    Quaternion([f64; 4]),
    /// Intrinsic XYZ Euler angles in radians: `R = Rx(rx)·Ry(ry)·Rz(rz)`.
    EulerXyz([f64; 3]),
}

impl Rotation {
    /// Normalizes the input to an orthonormal matrix with determinant +1.
    pub fn to_matrix(&self) -> Result<Matrix3<f64>, BoxError> {
        match *self {
            Rotation::Matrix(m) => {
                if m.iter().any(|v| !v.is_finite()) {
                    return Err(BoxError::NonFinite);
                }
                orthonormalize(&Matrix3::from_row_slice(&m))
            }
            Rotation::Quaternion([w, x, y, z]) => {
                let q = Quaternion::new(w, x, y, z);
                let norm = q.norm();
                if !norm.is_finite() {
                    return Err(BoxError::NonFinite);
                }
                if (norm - 1.0).abs() > ROTATION_ACCEPT_TOL {
                    return Err(BoxError::NotUnitQuaternion(norm));
                }
                Ok(UnitQuaternion::from_quaternion(q)
                    .to_rotation_matrix()
                    .into_inner())
            }
            Rotation::EulerXyz([rx, ry, rz]) => {
                if !(rx.is_finite() && ry.is_finite() && rz.is_finite()) {
                    return Err(BoxError::NonFinite);
                }
                Ok(euler_xyz_matrix(rx, ry, rz))
            }
        }
    }
}

/// Rotation matrix about the x axis.
pub fn rot_x(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Rotation matrix about the y axis.
pub fn rot_y(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Rotation matrix about the z axis.
pub fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// `Rx(rx)·Ry(ry)·Rz(rz)`.
pub fn euler_xyz_matrix(rx: f64, ry: f64, rz: f64) -> Matrix3<f64> {
    rot_x(rx) * rot_y(ry) * rot_z(rz)
}

/// Largest absolute entry of `RᵀR − I`.
pub fn orthonormality_error(r: &Matrix3<f64>) -> f64 {
    (r.transpose() * r - Matrix3::identity()).amax()
}

/// Projects a nearly orthonormal matrix onto SO(3) via its polar factor.
fn orthonormalize(r: &Matrix3<f64>) -> Result<Matrix3<f64>, BoxError> {
    let err = orthonormality_error(r);
    if err > ROTATION_ACCEPT_TOL {
        return Err(BoxError::NotOrthonormal(err));
    }
    let det = r.determinant();
    if det <= 0.0 {
        return Err(BoxError::Reflection(det));
    }
    let svd = r.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    Ok(u * v_t)
}

/// 4×4 homogeneous transform `[R·diag(d) | p; 0 0 0 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomTransform(pub Matrix4<f64>);

impl HomTransform {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn apply_point(&self, p: &Vec3) -> Vec3 {
        self.0.transform_point(&(*p).into()).coords
    }

    /// Inverse transform. Boxes always have positive extents, so this exists.
    pub fn inverse(&self) -> HomTransform {
        HomTransform(
            self.0
                .try_inverse()
                .expect("box transform with positive extents is invertible"),
        )
    }
}

/// A cuboid with arbitrary position, orientation and strictly positive extents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    center: Vec3,
    rotation: Matrix3<f64>,
    dimensions: Vec3,
}

impl OrientedBox {
    pub fn new(center: Vec3, rotation: Rotation, dimensions: Vec3) -> Result<Self, BoxError> {
        Self::from_matrix(center, rotation.to_matrix()?, dimensions)
    }

    /// Builds a box from a rotation matrix, re-projecting it onto SO(3).
    pub fn from_matrix(
        center: Vec3,
        rotation: Matrix3<f64>,
        dimensions: Vec3,
    ) -> Result<Self, BoxError> {
        if center
            .iter()
            .chain(dimensions.iter())
            .any(|v| !v.is_finite())
            || rotation.iter().any(|v| !v.is_finite())
        {
            return Err(BoxError::NonFinite);
        }
        if dimensions.iter().any(|&d| d <= 0.0) {
            return Err(BoxError::NonPositiveDimension([
                dimensions.x,
                dimensions.y,
                dimensions.z,
            ]));
        }
        Ok(Self {
            center,
            rotation: orthonormalize(&rotation)?,
            dimensions,
        })
    }

    /// Axis-aligned box.
    pub fn aligned(center: Vec3, dimensions: Vec3) -> Result<Self, BoxError> {
        Self::from_matrix(center, Matrix3::identity(), dimensions)
    }

    /// Axis-aligned unit cube centered at `center`.
    pub fn unit_cube(center: Vec3) -> Self {
        Self::aligned(center, Vec3::repeat(1.0)).expect("unit cube is valid")
    }

    pub fn center(&self) -> &Vec3 {
        &self.center
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn dimensions(&self) -> &Vec3 {
        &self.dimensions
    }

    pub fn volume(&self) -> f64 {
        self.dimensions.product()
    }

    /// Length of the space diagonal.
    pub fn diagonal(&self) -> f64 {
        self.dimensions.norm()
    }

    pub fn unit_quaternion(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::from_matrix(&self.rotation)
    }

    /// The same box moved by the rigid motion `x ↦ q·x + t`.
    pub fn transformed(&self, q: &Matrix3<f64>, t: &Vec3) -> Result<Self, BoxError> {
        Self::from_matrix(q * self.center + t, q * self.rotation, self.dimensions)
    }

    /// The same box with center and extents scaled by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self, BoxError> {
        Self::from_matrix(self.center * s, self.rotation, self.dimensions * s)
    }

    pub fn transform(&self) -> HomTransform {
        let block = self.rotation * Matrix3::from_diagonal(&self.dimensions);
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&block);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.center);
        HomTransform(m)
    }

    /// Maps a unit-frame point to world coordinates.
    pub fn unit_to_world(&self, u: &Vec3) -> Vec3 {
        self.center + self.rotation * u.component_mul(&self.dimensions)
    }

    /// Maps a world point into the box's unit frame, where the box is
    /// `[-0.5, 0.5]³`.
    pub fn world_to_unit(&self, p: &Vec3) -> Vec3 {
        (self.rotation.transpose() * (p - self.center)).component_div(&self.dimensions)
    }

    /// Closed containment test with tolerance `tol` in the unit frame.
    pub fn contains_point(&self, p: &Vec3, tol: f64) -> bool {
        let limit = 0.5 + tol;
        self.world_to_unit(p).iter().all(|c| c.abs() <= limit)
    }

    pub fn corner(&self, idx: usize) -> Vec3 {
        self.unit_to_world(&Vec3::from(UNIT_CORNERS[idx]))
    }

    /// The 8 corners in canonical order.
    pub fn corners(&self) -> [Vec3; 8] {
        std::array::from_fn(|i| self.corner(i))
    }

    /// Edge `idx` as a segment between two world corners.
    pub fn edge(&self, idx: usize) -> Segment {
        let [a, b] = EDGES[idx];
        Segment::new(self.corner(a), self.corner(b))
    }

    /// Face `idx` as origin plus two spanning vectors.
    pub fn face(&self, idx: usize) -> FacePatch {
        let [o, s, t] = FACES[idx];
        let origin = self.corner(o);
        FacePatch {
            origin,
            span_s: self.corner(s) - origin,
            span_t: self.corner(t) - origin,
        }
    }

    /// Outward unit normal of face `idx`.
    pub fn face_normal(&self, idx: usize) -> Vec3 {
        let (col, sign) = FACE_NORMALS[idx];
        self.rotation.column(col) * sign
    }

    /// Total order on boxes over their stored parameters. Pairwise kernels
    /// evaluate in this order so that swapping arguments gives bit-identical
    /// results.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = self
            .center
            .iter()
            .chain(self.dimensions.iter())
            .chain(self.rotation.iter());
        let rhs = other
            .center
            .iter()
            .chain(other.dimensions.iter())
            .chain(other.rotation.iter());
        lhs.zip(rhs)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Returns the pair in canonical order together with whether it was swapped.
pub(crate) fn canonical_pair<'a>(
    a: &'a OrientedBox,
    b: &'a OrientedBox,
) -> (&'a OrientedBox, &'a OrientedBox, bool) {
    if a.canonical_cmp(b).is_gt() {
        (b, a, true)
    } else {
        (a, b, false)
    }
}

/// A line segment `start + t·(end − start)`, `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: Vec3,
    pub end: Vec3,
}

impl Segment {
    pub fn new(start: Vec3, end: Vec3) -> Self {
        Self { start, end }
    }

    pub fn slope(&self) -> Vec3 {
        self.end - self.start
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.start + self.slope() * t
    }

    pub fn length(&self) -> f64 {
        self.slope().norm()
    }
}

/// A box face parameterized as `origin + s·span_s + t·span_t`, `(s, t) ∈ [0, 1]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacePatch {
    pub origin: Vec3,
    pub span_s: Vec3,
    pub span_t: Vec3,
}

impl FacePatch {
    pub fn at(&self, s: f64, t: f64) -> Vec3 {
        self.origin + self.span_s * s + self.span_t * t
    }

    /// Least-squares face parameters of `p`, i.e. `N⁺·(p − origin)` with
    /// `N = [span_s span_t]`.
    pub fn params(&self, p: &Vec3) -> (f64, f64) {
        let v = p - self.origin;
        let (a, b, c) = (
            self.span_s.norm_squared(),
            self.span_s.dot(&self.span_t),
            self.span_t.norm_squared(),
        );
        let (ps, pt) = (self.span_s.dot(&v), self.span_t.dot(&v));
        let det = a * c - b * b;
        ((c * ps - b * pt) / det, (a * pt - b * ps) / det)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn rotated_box(center: Vec3, r: Matrix3<f64>, d: Vec3) -> OrientedBox {
        OrientedBox::from_matrix(center, r, d).unwrap()
    }

    #[test]
    fn unit_cube_transform_is_identity() {
        let t = OrientedBox::unit_cube(Vec3::zeros()).transform();
        assert_eq!(*t.matrix(), Matrix4::identity());
    }

    #[test]
    fn scaled_box_transform() {
        let b = OrientedBox::aligned(Vec3::zeros(), Vec3::new(2.0, 1.0, 1.0)).unwrap();
        assert_eq!(
            *b.transform().matrix(),
            Matrix4::from_diagonal(&nalgebra::Vector4::new(2.0, 1.0, 1.0, 1.0))
        );
    }

    #[test]
    fn rotated_translated_transform_maps_corners() {
        let r = rot_z(FRAC_PI_2);
        let b = rotated_box(Vec3::new(1.0, 2.0, 3.0), r, Vec3::repeat(1.0));
        let t = b.transform();
        let m = t.matrix();
        assert_relative_eq!(m.fixed_view::<3, 3>(0, 0).into_owned(), r, epsilon = 1e-15);
        assert_eq!(
            m.column(3).into_owned(),
            nalgebra::Vector4::new(1.0, 2.0, 3.0, 1.0)
        );
        assert_eq!(
            m.row(3).into_owned(),
            nalgebra::RowVector4::new(0.0, 0.0, 0.0, 1.0)
        );
        for (j, u) in UNIT_CORNERS.iter().enumerate() {
            let u = Vec3::from(*u);
            let expected = r * u + Vec3::new(1.0, 2.0, 3.0);
            assert_relative_eq!(t.apply_point(&u), expected, epsilon = 1e-12);
            assert_relative_eq!(b.corner(j), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn corners_of_canonical_boxes() {
        let unit = OrientedBox::unit_cube(Vec3::zeros());
        for (c, u) in unit.corners().iter().zip(UNIT_CORNERS.iter()) {
            assert_eq!(*c, Vec3::from(*u));
        }
        let big = OrientedBox::aligned(Vec3::zeros(), Vec3::repeat(2.0)).unwrap();
        for (c, u) in big.corners().iter().zip(UNIT_CORNERS.iter()) {
            assert_eq!(*c, Vec3::from(*u) * 2.0);
        }
        let rot = rotated_box(Vec3::zeros(), rot_z(FRAC_PI_4), Vec3::repeat(1.0));
        assert_relative_eq!(
            rot.corner(0),
            Vec3::new(0.0, -SQRT_2 / 2.0, -0.5),
            epsilon = 1e-12
        );
    }

    #[test]
    fn world_to_unit_examples() {
        let b = rotated_box(
            Vec3::new(3.0, -1.0, 2.0),
            rot_x(0.3) * rot_y(1.1),
            Vec3::new(0.5, 2.0, 3.0),
        );
        assert_relative_eq!(b.world_to_unit(b.center()), Vec3::zeros(), epsilon = 1e-15);
        let unit = OrientedBox::unit_cube(Vec3::zeros());
        assert_eq!(
            unit.world_to_unit(&Vec3::new(0.5, 0.0, 0.0)),
            Vec3::new(0.5, 0.0, 0.0)
        );
        let wide = OrientedBox::aligned(Vec3::zeros(), Vec3::new(2.0, 1.0, 1.0)).unwrap();
        assert_eq!(
            wide.world_to_unit(&Vec3::new(1.0, 0.0, 0.0)),
            Vec3::new(0.5, 0.0, 0.0)
        );
    }

    #[test]
    fn containment_is_closed_with_tolerance() {
        let unit = OrientedBox::unit_cube(Vec3::zeros());
        assert!(unit.contains_point(&Vec3::zeros(), 1e-9));
        assert!(unit.contains_point(&Vec3::new(0.5, 0.0, 0.0), 1e-9));
        assert!(!unit.contains_point(&Vec3::new(0.5 + 1e-6, 0.0, 0.0), 1e-9));
    }

    #[test]
    fn topology_tables_are_consistent() {
        for u in UNIT_CORNERS {
            assert!(u.iter().all(|c| c.abs() == 0.5));
        }
        for [a, b] in EDGES {
            let diff = (0..3)
                .filter(|&k| UNIT_CORNERS[a][k] != UNIT_CORNERS[b][k])
                .count();
            assert_eq!(diff, 1, "edge {a}-{b}");
        }
        for (f, face) in FACES.iter().enumerate() {
            let (axis, sign) = FACE_NORMALS[f];
            for &c in face {
                assert_eq!(UNIT_CORNERS[c][axis], 0.5 * sign, "face {f} corner {c}");
            }
            // The spanning vectors must be orthogonal unit edges so that
            // [0, 1]² covers exactly the face.
            let o = Vec3::from(UNIT_CORNERS[face[0]]);
            let s = Vec3::from(UNIT_CORNERS[face[1]]) - o;
            let t = Vec3::from(UNIT_CORNERS[face[2]]) - o;
            assert_eq!(s.norm(), 1.0);
            assert_eq!(t.norm(), 1.0);
            assert_eq!(s.dot(&t), 0.0);
        }
    }

    #[test]
    fn face_normals_point_outward() {
        let b = rotated_box(
            Vec3::new(1.0, 0.0, -2.0),
            rot_y(0.7) * rot_z(0.2),
            Vec3::new(1.0, 2.0, 0.5),
        );
        for f in 0..6 {
            let patch = b.face(f);
            let mid = patch.at(0.5, 0.5);
            assert!(b.face_normal(f).dot(&(mid - b.center())) > 0.0);
            assert_relative_eq!(b.face_normal(f).dot(&patch.span_s), 0.0, epsilon = 1e-12);
            assert_relative_eq!(b.face_normal(f).dot(&patch.span_t), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotation_inputs_agree() {
        let angle = 0.8_f64;
        let from_euler = Rotation::EulerXyz([0.0, 0.0, angle]).to_matrix().unwrap();
        let (s, c) = (angle / 2.0).sin_cos();
        let from_quat = Rotation::Quaternion([c, 0.0, 0.0, s]).to_matrix().unwrap();
        let m = rot_z(angle);
        let from_matrix = Rotation::Matrix([
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ])
        .to_matrix()
        .unwrap();
        assert_relative_eq!(from_euler, m, epsilon = 1e-14);
        assert_relative_eq!(from_quat, m, epsilon = 1e-14);
        assert_relative_eq!(from_matrix, m, epsilon = 1e-14);
        assert_eq!(
            Rotation::Quaternion([1.0, 0.0, 0.0, 0.0])
                .to_matrix()
                .unwrap(),
            Matrix3::identity()
        );
    }

    #[test]
    fn rejects_invalid_boxes() {
        let r = Rotation::Matrix([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            OrientedBox::new(Vec3::zeros(), r, Vec3::new(0.0, 1.0, 1.0)),
            Err(BoxError::NonPositiveDimension(_))
        ));
        let skewed = Rotation::Matrix([1.0, 1e-3, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            OrientedBox::new(Vec3::zeros(), skewed, Vec3::repeat(1.0)),
            Err(BoxError::NotOrthonormal(_))
        ));
        let mirror = Rotation::Matrix([-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            OrientedBox::new(Vec3::zeros(), mirror, Vec3::repeat(1.0)),
            Err(BoxError::Reflection(_))
        ));
        assert!(matches!(
            OrientedBox::new(
                Vec3::zeros(),
                Rotation::Quaternion([2.0, 0.0, 0.0, 0.0]),
                Vec3::repeat(1.0)
            ),
            Err(BoxError::NotUnitQuaternion(_))
        ));
        assert!(matches!(
            OrientedBox::aligned(Vec3::new(f64::NAN, 0.0, 0.0), Vec3::repeat(1.0)),
            Err(BoxError::NonFinite)
        ));
    }

    #[test]
    fn slightly_perturbed_rotation_is_reprojected() {
        let mut m = rot_x(0.4);
        m[(0, 1)] += 5e-7;
        let b = OrientedBox::from_matrix(Vec3::zeros(), m, Vec3::repeat(1.0)).unwrap();
        assert!(orthonormality_error(b.rotation()) <= 1e-12);
        assert_relative_eq!(b.rotation().determinant(), 1.0, epsilon = 1e-12);
    }

    fn arb_box() -> impl Strategy<Value = OrientedBox> {
        (
            prop::array::uniform3(-5.0..5.0f64),
            prop::array::uniform3(-3.2..3.2f64),
            prop::array::uniform3(0.05..4.0f64),
        )
            .prop_map(|(c, e, d)| {
                OrientedBox::new(Vec3::from(c), Rotation::EulerXyz(e), Vec3::from(d)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn world_unit_round_trip(b in arb_box(), p in prop::array::uniform3(-10.0..10.0f64)) {
            let p = Vec3::from(p);
            let u = b.world_to_unit(&p);
            let back = b.transform().apply_point(&u);
            prop_assert!((back - p).norm() <= 1e-9 * p.norm().max(1.0));
            let inv = b.transform().inverse().apply_point(&p);
            prop_assert!((inv - u).norm() <= 1e-9 * u.norm().max(1.0));
        }

        #[test]
        fn corners_are_contained(b in arb_box()) {
            for c in b.corners() {
                prop_assert!(b.contains_point(&c, 1e-9));
            }
        }

        #[test]
        fn containment_is_rigid_equivariant(
            b in arb_box(),
            p in prop::array::uniform3(-4.0..4.0f64),
            e in prop::array::uniform3(-3.2..3.2f64),
            t in prop::array::uniform3(-5.0..5.0f64),
        ) {
            let p = Vec3::from(p);
            let q = euler_xyz_matrix(e[0], e[1], e[2]);
            let t = Vec3::from(t);
            let moved = b.transformed(&q, &t).unwrap();
            // Stay away from the boundary where rounding could flip the answer.
            let u = b.world_to_unit(&p);
            prop_assume!(u.iter().all(|c| (c.abs() - 0.5).abs() > 1e-7));
            prop_assert_eq!(b.contains_point(&p, 1e-9), moved.contains_point(&(q * p + t), 1e-9));
        }
    }
}
