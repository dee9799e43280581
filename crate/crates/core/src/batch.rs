//! Array-shaped entry points for scripting front ends: boxes arrive as
//! parallel `centers / rotations / dimensions` arrays and metrics come back
//! elementwise.

use crate::geometry::{BoxError, OrientedBox, Rotation, Vec3};
use crate::intersection::iou;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArrayError {
    #[error("array length mismatch: {field} has {found} entries, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("box {index}: {field}: {reason}")]
    InvalidBox {
        index: usize,
        field: &'static str,
        reason: BoxError,
    },
}

/// Per-box rotations in one of the accepted encodings.
#[derive(Debug, Clone, Copy)]
pub enum RotationArray<'a> {
    /// Row-major 3×3 matrices.
    Matrices(&'a [[f64; 9]]),
    /// `[w, x, y, z]` unit quaternions.
    Quaternions(&'a [[f64; 4]]),
}

impl RotationArray<'_> {
    fn len(&self) -> usize {
        match self {
            RotationArray::Matrices(m) => m.len(),
            RotationArray::Quaternions(q) => q.len(),
        }
    }

    fn get(&self, i: usize) -> Rotation {
        match self {
            RotationArray::Matrices(m) => Rotation::Matrix(m[i]),
            RotationArray::Quaternions(q) => Rotation::Quaternion(q[i]),
        }
    }
}

/// Builds boxes from parallel arrays, naming the offending field on failure.
pub fn boxes_from_arrays(
    centers: &[[f64; 3]],
    rotations: RotationArray<'_>,
    dimensions: &[[f64; 3]],
) -> Result<Vec<OrientedBox>, ArrayError> {
    let n = centers.len();
    for (field, found) in [
        ("rotations", rotations.len()),
        ("dimensions", dimensions.len()),
    ] {
        if found != n {
            return Err(ArrayError::LengthMismatch {
                field,
                expected: n,
                found,
            });
        }
    }
    (0..n)
        .map(|i| {
            let invalid = |field, reason| ArrayError::InvalidBox {
                index: i,
                field,
                reason,
            };
            let r = rotations
                .get(i)
                .to_matrix()
                .map_err(|e| invalid("rotations", e))?;
            OrientedBox::from_matrix(Vec3::from(centers[i]), r, Vec3::from(dimensions[i])).map_err(
                |e| {
                    let field = match e {
                        BoxError::NonPositiveDimension(_) => "dimensions",
                        BoxError::NonFinite => "centers",
                        _ => "rotations",
                    };
                    invalid(field, e)
                },
            )
        })
        .collect()
}

/// Elementwise IoU of two equally long box lists, in input order.
pub fn batch_iou(a: &[OrientedBox], b: &[OrientedBox]) -> Result<Vec<f64>, ArrayError> {
    if a.len() != b.len() {
        return Err(ArrayError::LengthMismatch {
            field: "boxes_b",
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.par_iter().zip(b).map(|(x, y)| iou(x, y)).collect())
}
