//! Bounding Box Disparity and the auxiliary pose/size/point-cloud metrics.

use crate::distance::v2v_with_tol;
use crate::geometry::{OrientedBox, Vec3, DEFAULT_TOL};
use crate::intersection::iou_with_tol;
use nalgebra::Matrix3;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricError {
    /// No cloud point lies in either box, so point-based IoU is 0/0.
    #[error("no point lies in either box; point-based IoU is undefined")]
    UndefinedRatio,
}

/// Non-fatal conditions attached to a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricWarning {
    UndefinedRatio,
    GimbalLock,
}

impl MetricWarning {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetricWarning::UndefinedRatio => "UndefinedRatio",
            MetricWarning::GimbalLock => "GimbalLockWarning",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Absolute and squared variants of a difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Difference {
    pub abs: f64,
    pub squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationDifference {
    /// Per-axis wrapped difference of intrinsic XYZ Euler angles, radians.
    pub euler_diff: Vec3,
    pub quaternion_dist: f64,
    pub matrix_geodesic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub iou: f64,
    pub v2v: f64,
    pub bbd: f64,
    pub position_diff: Difference,
    pub size_diff: Difference,
    pub rotation: RotationDifference,
    pub point_iou: Option<f64>,
    pub warnings: Vec<MetricWarning>,
}

/// Bounding Box Disparity `1 − IoU + v2v`.
pub fn bbd(a: &OrientedBox, b: &OrientedBox) -> f64 {
    bbd_with_tol(a, b, DEFAULT_TOL)
}

pub fn bbd_with_tol(a: &OrientedBox, b: &OrientedBox, tol: f64) -> f64 {
    1.0 - iou_with_tol(a, b, tol) + v2v_with_tol(a, b, tol)
}

/// L2 distance between centers, and its square.
pub fn position_difference(a: &OrientedBox, b: &OrientedBox) -> Difference {
    let sq = (a.center() - b.center()).norm_squared();
    Difference {
        abs: sq.sqrt(),
        squared: sq,
    }
}

/// L1 and squared-L2 differences of the extents.
pub fn size_difference(a: &OrientedBox, b: &OrientedBox) -> Difference {
    let d = a.dimensions() - b.dimensions();
    Difference {
        abs: d.abs().sum(),
        squared: d.norm_squared(),
    }
}

/// Geodesic angle between the two orientations through unit quaternions,
/// insensitive to the sign of either quaternion.
pub fn quaternion_distance(a: &OrientedBox, b: &OrientedBox) -> f64 {
    // 2·acos(|qa·qb|), evaluated as 2·atan2(‖vec(qa⁻¹qb)‖, |w(qa⁻¹qb)|) to stay
    // accurate near zero.
    let rel = a.unit_quaternion().inverse() * b.unit_quaternion();
    2.0 * rel.imag().norm().atan2(rel.w.abs())
}

/// Geodesic angle `acos((tr(RaᵀRb) − 1) / 2)` on SO(3).
pub fn matrix_geodesic_distance(a: &OrientedBox, b: &OrientedBox) -> f64 {
    rotation_angle(&(a.rotation().transpose() * b.rotation()))
}

/// Rotation angle of `r`, from the cosine `(tr − 1)/2` and the sine carried by
/// the skew part, which keeps full precision at both ends of `[0, π]`.
fn rotation_angle(r: &Matrix3<f64>) -> f64 {
    let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let sin = 0.5
        * Vec3::new(
            r[(2, 1)] - r[(1, 2)],
            r[(0, 2)] - r[(2, 0)],
            r[(1, 0)] - r[(0, 1)],
        )
        .norm();
    sin.atan2(cos)
}

/// Intrinsic XYZ Euler angles `(rx, ry, rz)` with `R = Rx·Ry·Rz`, plus whether
/// the decomposition sits at gimbal lock (`|ry|` within 1e-6 of π/2).
pub fn euler_xyz_angles(r: &Matrix3<f64>) -> (Vec3, bool) {
    let sy = r[(0, 2)].clamp(-1.0, 1.0);
    let ry = sy.asin();
    let locked = (ry.abs() - PI / 2.0).abs() <= 1e-6;
    if locked {
        // Only rx ± rz is determined; pin rz to zero.
        let rx = r[(2, 1)].atan2(r[(1, 1)]);
        (Vec3::new(rx, ry, 0.0), true)
    } else {
        let rx = (-r[(1, 2)]).atan2(r[(2, 2)]);
        let rz = (-r[(0, 1)]).atan2(r[(0, 0)]);
        (Vec3::new(rx, ry, rz), false)
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Euler-angle difference `b − a`, wrapped per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerDifference {
    pub delta: Vec3,
    pub gimbal_lock: bool,
}

pub fn euler_angle_difference(a: &OrientedBox, b: &OrientedBox) -> EulerDifference {
    let (ea, la) = euler_xyz_angles(a.rotation());
    let (eb, lb) = euler_xyz_angles(b.rotation());
    EulerDifference {
        delta: (eb - ea).map(wrap_angle),
        gimbal_lock: la || lb,
    }
}

/// Unweighted ratio of cloud points inside both boxes to points inside either.
/// Boundary points count as inside.
pub fn point_based_iou(
    cloud: &PointCloud,
    a: &OrientedBox,
    b: &OrientedBox,
    tol: f64,
) -> Result<f64, MetricError> {
    let (both, either) = cloud
        .points
        .iter()
        .fold((0usize, 0usize), |(both, either), p| {
            match (a.contains_point(p, tol), b.contains_point(p, tol)) {
                (true, true) => (both + 1, either + 1),
                (true, false) | (false, true) => (both, either + 1),
                (false, false) => (both, either),
            }
        });
    if either == 0 {
        return Err(MetricError::UndefinedRatio);
    }
    Ok(both as f64 / either as f64)
}

/// Every metric for one box pair.
pub fn full_report(
    a: &OrientedBox,
    b: &OrientedBox,
    cloud: Option<&PointCloud>,
    tol: f64,
) -> MetricReport {
    let mut warnings = Vec::new();
    let iou = iou_with_tol(a, b, tol);
    let v2v = v2v_with_tol(a, b, tol);
    let euler = euler_angle_difference(a, b);
    if euler.gimbal_lock {
        warnings.push(MetricWarning::GimbalLock);
    }
    let point_iou = cloud.and_then(|c| match point_based_iou(c, a, b, tol) {
        Ok(v) => Some(v),
        Err(MetricError::UndefinedRatio) => {
            warnings.push(MetricWarning::UndefinedRatio);
            None
        }
    });
    MetricReport {
        iou,
        v2v,
        bbd: 1.0 - iou + v2v,
        position_diff: position_difference(a, b),
        size_diff: size_difference(a, b),
        rotation: RotationDifference {
            euler_diff: euler.delta,
            quaternion_dist: quaternion_distance(a, b),
            matrix_geodesic: matrix_geodesic_distance(a, b),
        },
        point_iou,
        warnings,
    }
}
