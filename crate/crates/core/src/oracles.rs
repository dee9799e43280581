//! Slow, independent references used for differential testing: Monte-Carlo
//! IoU, surface-lattice v2v and grid-search segment distance.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64`; chunk `k`
//! of a sampling run uses stream `k`, so results do not depend on how many
//! threads evaluate the chunks.

use crate::geometry::{OrientedBox, Segment, Vec3, DEFAULT_TOL};
use nalgebra::{Quaternion, UnitQuaternion};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

/// Samples per deterministic RNG stream.
const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleConfigError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("grid resolution must be at least 2, got {0}")]
    GridTooCoarse(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    sample_count: usize,
    seed: u64,
    grid_res: usize,
}

impl OracleConfig {
    pub fn new(sample_count: usize, seed: u64, grid_res: usize) -> Result<Self, OracleConfigError> {
        if sample_count == 0 {
            return Err(OracleConfigError::NoSamples);
        }
        if grid_res < 2 {
            return Err(OracleConfigError::GridTooCoarse(grid_res));
        }
        Ok(Self {
            sample_count,
            seed,
            grid_res,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid_res(&self) -> usize {
        self.grid_res
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            sample_count: 1_000_000,
            seed: 0,
            grid_res: 32,
        }
    }
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

fn count_inside(a: &OrientedBox, b: &OrientedBox, seed: u64, chunk: usize, n: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    (0..n)
        .filter(|_| {
            let u = Vec3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            );
            b.contains_point(&a.unit_to_world(&u), DEFAULT_TOL)
        })
        .count()
}

/// Monte-Carlo IoU: uniform samples in `a`, the fraction inside `b` scales
/// `vol(a)` to an intersection estimate.
pub fn mc_iou(a: &OrientedBox, b: &OrientedBox, cfg: &OracleConfig) -> Estimate {
    let n = cfg.sample_count;
    let chunks = n.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|k| count_inside(a, b, cfg.seed, k, CHUNK.min(n - k * CHUNK)))
        .sum();
    let f = hits as f64 / n as f64;
    let (va, vb) = (a.volume(), b.volume());
    let inter = f * va;
    let union = va + vb - inter;
    // Binomial error on f carried through d(IoU)/df = va(va + vb)/union².
    let se_f = (f * (1.0 - f) / n as f64).sqrt();
    Estimate {
        estimate: inter / union,
        std_error: se_f * va * (va + vb) / (union * union),
    }
}

/// `grid_res × grid_res` lattice on each face of the box, corners included.
pub fn surface_lattice(b: &OrientedBox, grid_res: usize) -> Vec<Vec3> {
    let step = 1.0 / (grid_res - 1) as f64;
    let mut out = Vec::with_capacity(6 * grid_res * grid_res);
    for f in 0..6 {
        let patch = b.face(f);
        for i in 0..grid_res {
            for j in 0..grid_res {
                out.push(patch.at(i as f64 * step, j as f64 * step));
            }
        }
    }
    out
}

/// Largest lattice-cell diagonal over all faces of both boxes.
pub fn lattice_cell_diagonal(a: &OrientedBox, b: &OrientedBox, grid_res: usize) -> f64 {
    let face_diag = |bx: &OrientedBox| {
        let d = bx.dimensions();
        [d.x.hypot(d.y), d.y.hypot(d.z), d.x.hypot(d.z)]
            .into_iter()
            .fold(0.0, f64::max)
    };
    face_diag(a).max(face_diag(b)) / (grid_res - 1) as f64
}

/// Minimum distance between the two surface lattices, or 0 when a lattice
/// point of either box lies inside the other.
pub fn sampled_v2v(a: &OrientedBox, b: &OrientedBox, cfg: &OracleConfig) -> f64 {
    let la = surface_lattice(a, cfg.grid_res);
    let lb = surface_lattice(b, cfg.grid_res);
    if la.iter().any(|p| b.contains_point(p, DEFAULT_TOL))
        || lb.iter().any(|p| a.contains_point(p, DEFAULT_TOL))
    {
        return 0.0;
    }
    la.iter()
        .map(|p| {
            lb.iter()
                .map(|q| (p - q).norm_squared())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Minimum of `‖A(s) − B(t)‖` over a `steps × steps` parameter grid that
/// includes both endpoints.
pub fn brute_segment_distance(a: &Segment, b: &Segment, steps: usize) -> f64 {
    assert!(steps >= 2, "steps must be at least 2");
    let h = 1.0 / (steps - 1) as f64;
    let pb: Vec<Vec3> = (0..steps).map(|j| b.at(j as f64 * h)).collect();
    (0..steps)
        .map(|i| {
            let p = a.at(i as f64 * h);
            pb.iter()
                .map(|q| (p - q).norm_squared())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Uniform rotation from a normalized 4D Gaussian quaternion.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion<f64> {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if q.norm() > 1e-6 {
            return UnitQuaternion::from_quaternion(q);
        }
    }
}

/// Generator of random boxes: centers uniform in `[-half_width, half_width]³`,
/// extents uniform in `[dim_min, dim_max]`, uniform rotations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomBoxes {
    pub half_width: f64,
    pub dim_min: f64,
    pub dim_max: f64,
}

impl Default for RandomBoxes {
    fn default() -> Self {
        Self {
            half_width: 2.0,
            dim_min: 0.2,
            dim_max: 2.0,
        }
    }
}

impl RandomBoxes {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> OrientedBox {
        let center = Vec3::from_fn(|_, _| rng.random_range(-self.half_width..=self.half_width));
        let dims = Vec3::from_fn(|_, _| rng.random_range(self.dim_min..=self.dim_max));
        let rot = random_rotation(rng).to_rotation_matrix().into_inner();
        OrientedBox::from_matrix(center, rot, dims).expect("sampled box is valid")
    }

    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (OrientedBox, OrientedBox) {
        (self.sample(rng), self.sample(rng))
    }
}

/// Seeded RNG used by the test suites and demos.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
