//! Metrics for comparing two arbitrarily oriented 3D bounding boxes.
//!
//! * [`iou`]: exact volumetric intersection over union.
//! * [`v2v`]: exact volume-to-volume (surface-to-surface) distance, zero under
//!   overlap.
//! * [`bbd`]: Bounding Box Disparity, `1 − IoU + v2v`, a continuous
//!   non-negative dissimilarity that keeps ranking boxes once they stop
//!   overlapping.
//!
//! Position, size, rotation and point-cloud metrics live in [`metrics`];
//! sampling-based reference implementations for differential testing live in
//! [`oracles`].
//!
//! ```
//! use boxmetrics::{bbd, iou, v2v, OrientedBox, Vec3};
//!
//! let a = OrientedBox::unit_cube(Vec3::zeros());
//! let b = OrientedBox::unit_cube(Vec3::new(0.5, 0.0, 0.0));
//! assert!((iou(&a, &b) - 1.0 / 3.0).abs() < 1e-12);
//! assert_eq!(v2v(&a, &b), 0.0);
//! assert!((bbd(&a, &b) - 2.0 / 3.0).abs() < 1e-12);
//! ```

pub mod batch;
pub mod distance;
pub mod geometry;
pub mod hull;
pub mod intersection;
pub mod io;
pub mod metrics;
pub mod oracles;

pub use distance::{closest_pair, enumerate_ppois, v2v, PointPair};
pub use geometry::{BoxError, HomTransform, OrientedBox, Rotation, Vec3, DEFAULT_TOL};
pub use hull::{convex_hull, ConvexPolytope, HullError};
pub use intersection::{intersection_polytope, intersection_volume, iou};
pub use metrics::{bbd, full_report, MetricReport, PointCloud};
