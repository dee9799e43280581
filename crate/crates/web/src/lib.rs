//! WebAssembly bindings for the browser demo.
//!
//! Every box crosses the boundary as nine numbers:
//! `[cx, cy, cz, rx, ry, rz, dx, dy, dz]`, center, intrinsic XYZ Euler angles
//! in radians, and full extents. Results come back as JSON strings.

use boxmetrics::geometry::EDGES;
use boxmetrics::oracles::{mc_iou, OracleConfig};
use boxmetrics::{
    bbd, closest_pair, intersection_polytope, iou, v2v, OrientedBox, Rotation, Vec3, DEFAULT_TOL,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn parse_box(p: &[f64]) -> Result<OrientedBox, String> {
    let p: &[f64; 9] = p
        .try_into()
        .map_err(|_| format!("a box needs 9 numbers, got {}", p.len()))?;
    OrientedBox::new(
        Vec3::new(p[0], p[1], p[2]),
        Rotation::EulerXyz([p[3], p[4], p[5]]),
        Vec3::new(p[6], p[7], p[8]),
    )
    .map_err(|e| e.to_string())
}

fn xyz(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

#[derive(Serialize)]
struct Hull {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
    volume: f64,
}

#[derive(Serialize)]
struct Closest {
    on_a: [f64; 3],
    on_b: [f64; 3],
    distance: f64,
}

#[derive(Serialize)]
struct PairView {
    iou: f64,
    v2v: f64,
    bbd: f64,
    corners_a: Vec<[f64; 3]>,
    corners_b: Vec<[f64; 3]>,
    edges: [[usize; 2]; 12],
    /// Absent when the boxes do not overlap in volume.
    hull: Option<Hull>,
    /// Absent when the boxes overlap.
    closest: Option<Closest>,
}

#[derive(Serialize)]
struct SweepPoint {
    offset: f64,
    iou: f64,
    v2v: f64,
    bbd: f64,
}

#[derive(Serialize)]
struct McView {
    iou: f64,
    estimate: f64,
    std_error: f64,
    samples: usize,
}

pub fn pair_view(a: &[f64], b: &[f64]) -> Result<String, String> {
    let (a, b) = (parse_box(a)?, parse_box(b)?);
    let iou = iou(&a, &b);
    let v2v = v2v(&a, &b);
    let hull = intersection_polytope(&a, &b, DEFAULT_TOL)
        .ok()
        .map(|h| Hull {
            vertices: h.vertices().iter().map(xyz).collect(),
            faces: h.faces().to_vec(),
            volume: h.volume(),
        });
    let closest = (iou == 0.0).then(|| {
        let p = closest_pair(&a, &b, DEFAULT_TOL);
        Closest {
            on_a: xyz(&p.on_a),
            on_b: xyz(&p.on_b),
            distance: p.distance,
        }
    });
    let view = PairView {
        iou,
        v2v,
        bbd: 1.0 - iou + v2v,
        corners_a: a.corners().iter().map(xyz).collect(),
        corners_b: b.corners().iter().map(xyz).collect(),
        edges: EDGES,
        hull,
        closest,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Slides `b` along a world axis through `steps` offsets in `[from, to]`.
pub fn sweep(
    a: &[f64],
    b: &[f64],
    axis: usize,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<String, String> {
    if axis > 2 {
        return Err(format!("axis must be 0, 1 or 2, got {axis}"));
    }
    if steps < 2 {
        return Err("a sweep needs at least 2 steps".into());
    }
    let a = parse_box(a)?;
    let mut params: [f64; 9] = b
        .try_into()
        .map_err(|_| format!("a box needs 9 numbers, got {}", b.len()))?;
    let base = params[axis];
    let points = (0..steps)
        .map(|i| {
            let offset = from + (to - from) * i as f64 / (steps - 1) as f64;
            params[axis] = base + offset;
            let moved = parse_box(&params)?;
            let (i, d) = (iou(&a, &moved), v2v(&a, &moved));
            Ok(SweepPoint {
                offset,
                iou: i,
                v2v: d,
                bbd: bbd(&a, &moved),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

pub fn mc_view(a: &[f64], b: &[f64], samples: usize, seed: u64) -> Result<String, String> {
    let (a, b) = (parse_box(a)?, parse_box(b)?);
    let cfg = OracleConfig::new(samples, seed, 2).map_err(|e| e.to_string())?;
    let est = mc_iou(&a, &b, &cfg);
    let view = McView {
        iou: iou(&a, &b),
        estimate: est.estimate,
        std_error: est.std_error,
        samples,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// IoU, v2v, BBD, box wireframes, intersection hull and closest pair.
#[wasm_bindgen]
pub fn pair_report(a: &[f64], b: &[f64]) -> Result<String, JsError> {
    pair_view(a, b).map_err(|e| JsError::new(&e))
}

/// Metrics while box `b` slides along `axis` (0 = x, 1 = y, 2 = z).
#[wasm_bindgen]
pub fn bbd_sweep(
    a: &[f64],
    b: &[f64],
    axis: usize,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<String, JsError> {
    sweep(a, b, axis, from, to, steps).map_err(|e| JsError::new(&e))
}

/// Exact IoU next to a seeded Monte-Carlo estimate.
#[wasm_bindgen]
pub fn mc_compare(a: &[f64], b: &[f64], samples: usize, seed: u32) -> Result<String, JsError> {
    mc_view(a, b, samples, seed.into()).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const UNIT: [f64; 9] = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0];

    fn shifted(x: f64) -> [f64; 9] {
        let mut b = UNIT;
        b[0] = x;
        b
    }

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn overlapping_pair_has_a_hull() {
        let v = parse(pair_view(&UNIT, &shifted(0.5)).unwrap());
        assert!((v["iou"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(v["v2v"], 0.0);
        assert_eq!(v["corners_a"].as_array().unwrap().len(), 8);
        assert!((v["hull"]["volume"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!(v["closest"].is_null());
    }

    #[test]
    fn disjoint_pair_has_a_closest_pair() {
        let v = parse(pair_view(&UNIT, &shifted(3.0)).unwrap());
        assert_eq!(v["v2v"], 2.0);
        assert_eq!(v["bbd"], 3.0);
        assert!(v["hull"].is_null());
        assert_eq!(v["closest"]["distance"], 2.0);
        assert_eq!(v["closest"]["on_a"][0], 0.5);
    }

    #[test]
    fn sweep_is_continuous_through_contact() {
        let v = parse(sweep(&UNIT, &UNIT, 0, 0.0, 2.0, 21).unwrap());
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 21);
        assert_eq!(pts[0]["bbd"], 0.0);
        let bbds: Vec<f64> = pts.iter().map(|p| p["bbd"].as_f64().unwrap()).collect();
        assert!(bbds.windows(2).all(|w| w[1] >= w[0] && w[1] - w[0] <= 0.2));
        assert!((bbds[20] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mc_estimate_tracks_exact() {
        let v = parse(mc_view(&UNIT, &shifted(0.5), 100_000, 1).unwrap());
        assert!((v["estimate"].as_f64().unwrap() - v["iou"].as_f64().unwrap()).abs() < 0.01);
    }

    #[test]
    fn bad_input_is_reported() {
        assert!(pair_view(&UNIT[..8], &UNIT)
            .unwrap_err()
            .contains("9 numbers"));
        let mut flat = UNIT;
        flat[8] = 0.0;
        assert!(pair_view(&UNIT, &flat).is_err());
        assert!(sweep(&UNIT, &UNIT, 3, 0.0, 1.0, 5).is_err());
        assert!(sweep(&UNIT, &UNIT, 0, 0.0, 1.0, 1).is_err());
        assert!(mc_view(&UNIT, &UNIT, 0, 0).is_err());
    }
}
