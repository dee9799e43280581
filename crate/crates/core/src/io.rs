//! Box, pair and point-cloud file formats, report serialization and the
//! batch runner behind the command-line tool.
//!
//! Box files hold one JSON object per line:
//!
//! ```text
//! {"id":"a","center":[0,0,0],"rotation":{"matrix":[1,0,0,0,1,0,0,0,1]},"dimensions":[1,1,1]}
//! {"id":"b","center":[0.5,0,0],"rotation":{"quaternion":[1,0,0,0]},"dimensions":[1,1,1]}
//! {"id":"c","center":[3,0,0],"rotation":{"euler_xyz":[0,0,0.785]},"dimensions":[1,2,1]}
//! ```
//!
//! Pair files hold one `{"box_a":"a","box_b":"b","cloud":"scan.ply"}` object
//! per line (`cloud` optional). Blank lines are ignored in both.

use crate::distance::v2v_with_tol;
use crate::geometry::{BoxError, OrientedBox, Rotation, Vec3};
use crate::intersection::iou_with_tol;
use crate::metrics::{full_report, MetricReport, PointCloud};
use crate::oracles::{lattice_cell_diagonal, mc_iou, sampled_v2v, OracleConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("box {id:?}: {reason}")]
    InvalidBox { id: String, reason: BoxError },
    #[error("line {line}: duplicate box id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("unknown box id {0:?}")]
    UnknownId(String),
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Non-empty lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationRecord {
    /// Row-major.
    Matrix([f64; 9]),
    /// `[w, x, y, z]`.
    Quaternion([f64; 4]),
    /// Intrinsic XYZ, radians.
    EulerXyz([f64; 3]),
}

impl From<RotationRecord> for Rotation {
    fn from(r: RotationRecord) -> Self {
        match r {
            RotationRecord::Matrix(m) => Rotation::Matrix(m),
            RotationRecord::Quaternion(q) => Rotation::Quaternion(q),
            RotationRecord::EulerXyz(e) => Rotation::EulerXyz(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRecord {
    pub id: String,
    pub center: [f64; 3],
    pub rotation: RotationRecord,
    pub dimensions: [f64; 3],
}

impl BoxRecord {
    pub fn to_box(&self) -> Result<OrientedBox, IoError> {
        OrientedBox::new(
            Vec3::from(self.center),
            self.rotation.into(),
            Vec3::from(self.dimensions),
        )
        .map_err(|reason| IoError::InvalidBox {
            id: self.id.clone(),
            reason,
        })
    }

    /// Record for an existing box, with the rotation written as a matrix.
    pub fn from_box(id: impl Into<String>, b: &OrientedBox) -> Self {
        let r = b.rotation();
        Self {
            id: id.into(),
            center: (*b.center()).into(),
            rotation: RotationRecord::Matrix(std::array::from_fn(|i| r[(i / 3, i % 3)])),
            dimensions: (*b.dimensions()).into(),
        }
    }
}

/// Parsed and validated boxes, in file order, addressable by id.
#[derive(Debug, Clone, Default)]
pub struct BoxSet {
    records: Vec<BoxRecord>,
    boxes: Vec<OrientedBox>,
    index: HashMap<String, usize>,
}

impl BoxSet {
    pub fn records(&self) -> &[BoxRecord] {
        &self.records
    }

    pub fn boxes(&self) -> &[OrientedBox] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn get(&self, id: &str) -> Result<&OrientedBox, IoError> {
        self.index
            .get(id)
            .map(|&i| &self.boxes[i])
            .ok_or_else(|| IoError::UnknownId(id.to_owned()))
    }

    /// One JSON line per box.
    pub fn to_lines(&self) -> String {
        self.records
            .iter()
            .zip(&self.boxes)
            .map(|(r, b)| {
                serde_json::to_string(&BoxRecord::from_box(r.id.clone(), b)).unwrap() + "\n"
            })
            .collect()
    }
}

impl FromStr for BoxSet {
    type Err = IoError;

    fn from_str(text: &str) -> Result<Self, IoError> {
        let mut set = BoxSet::default();
        for (line, content) in content_lines(text) {
            let record: BoxRecord = serde_json::from_str(content).map_err(|e| IoError::Parse {
                line,
                message: e.to_string(),
            })?;
            if set.index.contains_key(&record.id) {
                return Err(IoError::DuplicateId {
                    id: record.id,
                    line,
                });
            }
            let b = record.to_box()?;
            set.index.insert(record.id.clone(), set.boxes.len());
            set.boxes.push(b);
            set.records.push(record);
        }
        Ok(set)
    }
}

pub fn parse_box_file(path: impl AsRef<Path>) -> Result<BoxSet, IoError> {
    read(path.as_ref())?.parse()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairJob {
    pub box_a: String,
    pub box_b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<String>,
}

pub fn parse_pairs(text: &str) -> Result<Vec<PairJob>, IoError> {
    content_lines(text)
        .map(|(line, content)| {
            serde_json::from_str(content).map_err(|e| IoError::Parse {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn parse_pairs_file(path: impl AsRef<Path>) -> Result<Vec<PairJob>, IoError> {
    parse_pairs(&read(path.as_ref())?)
}

fn parse_xyz_fields(fields: &[&str], line: usize) -> Result<Vec3, IoError> {
    let mut xyz = [0.0f64; 3];
    for (slot, f) in xyz.iter_mut().zip(fields) {
        *slot = f.parse().map_err(|_| IoError::Parse {
            line,
            message: format!("invalid number {f:?}"),
        })?;
    }
    if xyz.iter().any(|v| !v.is_finite()) {
        return Err(IoError::Parse {
            line,
            message: "non-finite coordinate".into(),
        });
    }
    Ok(Vec3::from(xyz))
}

/// Plain text, one `x y z` triple per line. `#` starts a comment line.
fn parse_xyz(text: &str) -> Result<PointCloud, IoError> {
    let mut points = Vec::new();
    for (line, content) in content_lines(text) {
        if content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(IoError::Parse {
                line,
                message: format!("expected 3 coordinates, found {}", fields.len()),
            });
        }
        points.push(parse_xyz_fields(&fields, line)?);
    }
    Ok(PointCloud::new(points))
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
    has_list: bool,
}

/// ASCII PLY; reads the `x`, `y`, `z` properties of the `vertex` element and
/// ignores everything else.
fn parse_ply(text: &str) -> Result<PointCloud, IoError> {
    let err = |line: usize, message: String| IoError::Parse { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut elements: Vec<PlyElement> = Vec::new();
    let mut format_seen = false;
    let mut header_done = false;
    lines.next();
    for (line, content) in lines.by_ref() {
        let mut tok = content.split_whitespace();
        match tok.next() {
            Some("format") => {
                if tok.next() != Some("ascii") {
                    return Err(err(line, "only ascii PLY is supported".into()));
                }
                format_seen = true;
            }
            Some("element") => {
                let name = tok
                    .next()
                    .ok_or_else(|| err(line, "element without name".into()))?;
                let count = tok
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| err(line, "element without valid count".into()))?;
                elements.push(PlyElement {
                    name: name.to_owned(),
                    count,
                    properties: Vec::new(),
                    has_list: false,
                });
            }
            Some("property") => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| err(line, "property before any element".into()))?;
                let parts: Vec<&str> = tok.collect();
                if parts.first() == Some(&"list") {
                    el.has_list = true;
                }
                let name = parts
                    .last()
                    .ok_or_else(|| err(line, "property without name".into()))?;
                el.properties.push((*name).to_owned());
            }
            Some("end_header") => {
                header_done = true;
                break;
            }
            Some("comment") | Some("obj_info") | None => {}
            Some(other) => return Err(err(line, format!("unexpected header keyword {other:?}"))),
        }
    }
    if !header_done {
        return Err(err(0, "PLY header has no end_header".into()));
    }
    if !format_seen {
        return Err(err(0, "PLY header has no format line".into()));
    }

    let mut points = Vec::new();
    let mut body = lines.filter(|(_, l)| !l.is_empty());
    for el in &elements {
        if el.name != "vertex" {
            // Skip the rows of elements that precede the vertices.
            for _ in 0..el.count {
                body.next()
                    .ok_or_else(|| err(0, format!("truncated {} element", el.name)))?;
            }
            continue;
        }
        if el.has_list {
            return Err(err(
                0,
                "list properties on vertices are not supported".into(),
            ));
        }
        let col = |axis: &str| {
            el.properties
                .iter()
                .position(|p| p == axis)
                .ok_or_else(|| err(0, format!("vertex element has no {axis} property")))
        };
        let cols = [col("x")?, col("y")?, col("z")?];
        for i in 0..el.count {
            let (line, content) = body
                .next()
                .ok_or_else(|| err(0, format!("vertex {i}: expected {} vertices", el.count)))?;
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != el.properties.len() {
                return Err(err(
                    line,
                    format!(
                        "vertex {i}: expected {} values, found {}",
                        el.properties.len(),
                        fields.len()
                    ),
                ));
            }
            let picked: Vec<&str> = cols.iter().map(|&c| fields[c]).collect();
            points.push(parse_xyz_fields(&picked, line)?);
        }
        break;
    }
    Ok(PointCloud::new(points))
}

/// XYZ text or ASCII PLY, told apart by a leading `ply` magic line.
pub fn parse_point_cloud_str(text: &str) -> Result<PointCloud, IoError> {
    if text.lines().next().map(str::trim) == Some("ply") {
        parse_ply(text)
    } else {
        parse_xyz(text)
    }
}

pub fn parse_point_cloud(path: impl AsRef<Path>) -> Result<PointCloud, IoError> {
    parse_point_cloud_str(&read(path.as_ref())?)
}

/// Which metric groups appear in a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSelection(BTreeSet<Metric>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Iou,
    V2v,
    Bbd,
    Position,
    Size,
    Rotation,
    PointIou,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Iou,
        Metric::V2v,
        Metric::Bbd,
        Metric::Position,
        Metric::Size,
        Metric::Rotation,
        Metric::PointIou,
    ];

    fn name(&self) -> &'static str {
        match self {
            Metric::Iou => "iou",
            Metric::V2v => "v2v",
            Metric::Bbd => "bbd",
            Metric::Position => "position",
            Metric::Size => "size",
            Metric::Rotation => "rotation",
            Metric::PointIou => "point_iou",
        }
    }
}

impl MetricSelection {
    pub fn all() -> Self {
        Self(Metric::ALL.into_iter().collect())
    }

    pub fn contains(&self, m: Metric) -> bool {
        self.0.contains(&m)
    }
}

impl Default for MetricSelection {
    fn default() -> Self {
        Self::all()
    }
}

impl FromStr for MetricSelection {
    type Err = String;

    /// Comma-separated metric names, or `all`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut set = BTreeSet::new();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            if name == "all" {
                return Ok(Self::all());
            }
            let m = Metric::ALL
                .into_iter()
                .find(|m| m.name() == name)
                .ok_or_else(|| {
                    let known: Vec<_> = Metric::ALL.iter().map(Metric::name).collect();
                    format!("unknown metric {name:?} (known: {}, all)", known.join(", "))
                })?;
            set.insert(m);
        }
        if set.is_empty() {
            return Err("empty metric list".into());
        }
        Ok(Self(set))
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub tol: f64,
    pub metrics: MetricSelection,
    /// Cloud used for jobs that do not name their own.
    pub cloud: Option<PathBuf>,
    /// Batch worker threads; 0 lets the thread pool decide.
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tol: crate::geometry::DEFAULT_TOL,
            metrics: MetricSelection::all(),
            cloud: None,
            workers: 0,
        }
    }
}

/// Rounds to 12 significant digits; serde then prints the shortest
/// round-tripping form, e.g. `0.333333333333`.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceOut {
    pub abs: f64,
    pub squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationOut {
    pub euler_diff: [f64; 3],
    pub quaternion_dist: f64,
    pub matrix_geodesic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iou: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v2v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bbd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position_diff: Option<DifferenceOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_diff: Option<DifferenceOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationOut>,
    /// Outer `None`: not requested. Inner `None`: no cloud or undefined ratio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_iou: Option<Option<f64>>,
}

impl MetricsOut {
    pub fn from_report(r: &MetricReport, sel: &MetricSelection) -> Self {
        let pick = |m: Metric| sel.contains(m);
        let diff = |d: &crate::metrics::Difference| DifferenceOut {
            abs: sig12(d.abs),
            squared: sig12(d.squared),
        };
        Self {
            iou: pick(Metric::Iou).then(|| sig12(r.iou)),
            v2v: pick(Metric::V2v).then(|| sig12(r.v2v)),
            bbd: pick(Metric::Bbd).then(|| sig12(r.bbd)),
            position_diff: pick(Metric::Position).then(|| diff(&r.position_diff)),
            size_diff: pick(Metric::Size).then(|| diff(&r.size_diff)),
            rotation: pick(Metric::Rotation).then(|| RotationOut {
                euler_diff: r.rotation.euler_diff.map(sig12).into(),
                quaternion_dist: sig12(r.rotation.quaternion_dist),
                matrix_geodesic: sig12(r.rotation.matrix_geodesic),
            }),
            point_iou: pick(Metric::PointIou).then(|| r.point_iou.map(sig12)),
        }
    }
}

/// One line of report output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub job: Option<usize>,
    pub box_a: String,
    pub box_b: String,
    pub version: String,
    pub tol: f64,
    pub metrics: MetricsOut,
    pub warnings: Vec<String>,
}

/// A job that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobError {
    pub job: usize,
    pub box_a: String,
    pub box_b: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub errors: usize,
    pub mean_iou: Option<f64>,
    pub mean_bbd: Option<f64>,
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a Summary,
}

/// Evaluates one pair and returns the structured report.
pub fn evaluate_pair(
    id_a: &str,
    a: &OrientedBox,
    id_b: &str,
    b: &OrientedBox,
    cloud: Option<&PointCloud>,
    opts: &RunOptions,
) -> (PairReport, MetricReport) {
    let report = full_report(a, b, cloud, opts.tol);
    let out = PairReport {
        job: None,
        box_a: id_a.to_owned(),
        box_b: id_b.to_owned(),
        version: TOOL_VERSION.to_owned(),
        tol: opts.tol,
        metrics: MetricsOut::from_report(&report, &opts.metrics),
        warnings: report
            .warnings
            .iter()
            .map(|w| w.as_str().to_owned())
            .collect(),
    };
    (out, report)
}

/// Evaluates one pair and serializes the report as a single JSON line.
pub fn run_pair(
    id_a: &str,
    a: &OrientedBox,
    id_b: &str,
    b: &OrientedBox,
    cloud: Option<&PointCloud>,
    opts: &RunOptions,
) -> String {
    serde_json::to_string(&evaluate_pair(id_a, a, id_b, b, cloud, opts).0)
        .expect("report serializes")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput {
    /// One JSON line per job, in input order.
    pub lines: Vec<String>,
    pub summary: Summary,
}

impl BatchOutput {
    pub fn has_errors(&self) -> bool {
        self.summary.errors > 0
    }

    /// Report lines followed by the summary line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        s.push_str(
            &serde_json::to_string(&SummaryLine {
                summary: &self.summary,
            })
            .unwrap(),
        );
        s.push('\n');
        s
    }
}

enum JobOutcome {
    Done(Box<(PairReport, MetricReport)>),
    Failed(JobError),
}

/// Runs every job; per-job failures are reported in-stream and do not stop
/// the batch. Output order follows job order regardless of worker count.
pub fn run_batch(boxes: &BoxSet, jobs: &[PairJob], opts: &RunOptions) -> BatchOutput {
    // Clouds are loaded once each, sequentially, before evaluation.
    let mut clouds: HashMap<String, Result<PointCloud, String>> = HashMap::new();
    let default_cloud = opts
        .cloud
        .as_ref()
        .map(|p| p.to_string_lossy().into_owned());
    for job in jobs {
        if let Some(path) = job.cloud.as_ref().or(default_cloud.as_ref()) {
            clouds
                .entry(path.clone())
                .or_insert_with(|| parse_point_cloud(path).map_err(|e| e.to_string()));
        }
    }

    let evaluate = |(i, job): (usize, &PairJob)| -> JobOutcome {
        let fail = |error: String| {
            JobOutcome::Failed(JobError {
                job: i,
                box_a: job.box_a.clone(),
                box_b: job.box_b.clone(),
                error,
            })
        };
        let (a, b) = match (boxes.get(&job.box_a), boxes.get(&job.box_b)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return fail(e.to_string()),
        };
        let cloud = match job.cloud.as_ref().or(default_cloud.as_ref()) {
            None => None,
            Some(path) => match &clouds[path] {
                Ok(c) => Some(c),
                Err(e) => return fail(e.clone()),
            },
        };
        let (mut report, raw) = evaluate_pair(&job.box_a, a, &job.box_b, b, cloud, opts);
        report.job = Some(i);
        JobOutcome::Done(Box::new((report, raw)))
    };

    let outcomes: Vec<JobOutcome> = if opts.workers == 1 {
        jobs.iter().enumerate().map(evaluate).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .expect("thread pool");
        pool.install(|| jobs.par_iter().enumerate().map(evaluate).collect())
    };

    let mut lines = Vec::with_capacity(outcomes.len());
    let (mut errors, mut iou_sum, mut bbd_sum, mut ok) = (0usize, 0.0, 0.0, 0usize);
    for o in &outcomes {
        match o {
            JobOutcome::Done(done) => {
                let (report, raw) = &**done;
                ok += 1;
                iou_sum += raw.iou;
                bbd_sum += raw.bbd;
                lines.push(serde_json::to_string(report).unwrap());
            }
            JobOutcome::Failed(e) => {
                errors += 1;
                lines.push(serde_json::to_string(e).unwrap());
            }
        }
    }
    let mean = |s: f64| (ok > 0).then(|| sig12(s / ok as f64));
    BatchOutput {
        lines,
        summary: Summary {
            count: jobs.len(),
            errors,
            mean_iou: mean(iou_sum),
            mean_bbd: mean(bbd_sum),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McIouOut {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledV2vOut {
    pub value: f64,
    pub grid: usize,
    /// Largest admissible `value − v2v`.
    pub bound: f64,
}

/// Analytic metrics next to their sampling oracles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub box_a: String,
    pub box_b: String,
    pub version: String,
    pub iou: f64,
    pub mc_iou: McIouOut,
    pub v2v: f64,
    pub sampled_v2v: SampledV2vOut,
}

pub fn run_oracle(
    id_a: &str,
    a: &OrientedBox,
    id_b: &str,
    b: &OrientedBox,
    cfg: &OracleConfig,
    tol: f64,
) -> String {
    let mc = mc_iou(a, b, cfg);
    let report = OracleReport {
        box_a: id_a.to_owned(),
        box_b: id_b.to_owned(),
        version: TOOL_VERSION.to_owned(),
        iou: sig12(iou_with_tol(a, b, tol)),
        mc_iou: McIouOut {
            estimate: sig12(mc.estimate),
            std_error: sig12(mc.std_error),
            samples: cfg.sample_count(),
            seed: cfg.seed(),
        },
        v2v: sig12(v2v_with_tol(a, b, tol)),
        sampled_v2v: SampledV2vOut {
            value: sig12(sampled_v2v(a, b, cfg)),
            grid: cfg.grid_res(),
            bound: sig12(2.0 * lattice_cell_diagonal(a, b, cfg.grid_res())),
        },
    };
    serde_json::to_string(&report).expect("report serializes")
}
