//! Command-line front end: single pairs, batches and oracle comparisons.
//!
//! Exit status: 0 on success, 1 when any batch job failed, 2 on usage or
//! input errors.

use boxmetrics::io::{
    parse_box_file, parse_pairs_file, parse_point_cloud, run_batch, run_oracle, run_pair, BoxSet,
    MetricSelection, RunOptions,
};
use boxmetrics::oracles::OracleConfig;
use boxmetrics::{OrientedBox, DEFAULT_TOL};
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "boxmetrics",
    version,
    about = "IoU, v2v and BBD for oriented 3D boxes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report every metric for one pair of boxes.
    Pair {
        #[command(flatten)]
        select: PairSelect,
        #[arg(long)]
        cloud: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate every job of a pairs file against a box file.
    Batch {
        boxes: PathBuf,
        pairs: PathBuf,
        /// Cloud for jobs that do not name one.
        #[arg(long)]
        cloud: Option<PathBuf>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Compare analytic IoU and v2v against Monte-Carlo and lattice oracles.
    Oracle {
        #[command(flatten)]
        select: PairSelect,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct PairSelect {
    /// Box file, one JSON record per line.
    boxes: PathBuf,
    /// First box id (defaults to the first record when the file holds two).
    id_a: Option<String>,
    /// Second box id.
    id_b: Option<String>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Comma-separated subset of iou,v2v,bbd,position,size,rotation,point_iou.
    #[arg(long, default_value = "all")]
    metrics: MetricSelection,
    /// Output file, or `-` for stdout.
    #[arg(long, default_value = "-")]
    output: String,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn resolve<'a>(
    set: &'a BoxSet,
    select: &'a PairSelect,
) -> Result<[(&'a str, &'a OrientedBox); 2], Failure> {
    let ids: [&str; 2] = match (&select.id_a, &select.id_b) {
        (Some(a), Some(b)) => [a, b],
        (None, None) if set.len() == 2 => [&set.records()[0].id, &set.records()[1].id],
        (None, None) => {
            return Err(Failure(format!(
                "box file holds {} boxes; name the two ids to compare",
                set.len()
            )))
        }
        _ => return Err(Failure("give both box ids or neither".into())),
    };
    Ok([(ids[0], set.get(ids[0])?), (ids[1], set.get(ids[1])?)])
}

fn write_output(target: &str, text: &str) -> Result<(), Failure> {
    if target == "-" {
        io::stdout().lock().write_all(text.as_bytes())?;
    } else {
        File::create(target)?.write_all(text.as_bytes())?;
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Failure(format!(
            "--tol must be a non-negative number, got {tol}"
        )))
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Pair {
            select,
            cloud,
            common,
        } => {
            check_tol(common.tol)?;
            let set = parse_box_file(&select.boxes)?;
            let [(id_a, a), (id_b, b)] = resolve(&set, &select)?;
            let cloud = cloud.map(parse_point_cloud).transpose()?;
            let opts = RunOptions {
                tol: common.tol,
                metrics: common.metrics,
                ..RunOptions::default()
            };
            let line = run_pair(id_a, a, id_b, b, cloud.as_ref(), &opts);
            write_output(&common.output, &(line + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Batch {
            boxes,
            pairs,
            cloud,
            workers,
            common,
        } => {
            check_tol(common.tol)?;
            let set = parse_box_file(&boxes)?;
            let jobs = parse_pairs_file(&pairs)?;
            let opts = RunOptions {
                tol: common.tol,
                metrics: common.metrics,
                cloud,
                workers,
            };
            let out = run_batch(&set, &jobs, &opts);
            write_output(&common.output, &out.render())?;
            Ok(if out.has_errors() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Oracle {
            select,
            seed,
            samples,
            grid,
            common,
        } => {
            check_tol(common.tol)?;
            let cfg = OracleConfig::new(samples, seed, grid)?;
            let set = parse_box_file(&select.boxes)?;
            let [(id_a, a), (id_b, b)] = resolve(&set, &select)?;
            let line = run_oracle(id_a, a, id_b, b, &cfg, common.tol);
            write_output(&common.output, &(line + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
