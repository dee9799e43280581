use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

const BOXES: &str = r#"{"id":"a","center":[0,0,0],"rotation":{"matrix":[1,0,0,0,1,0,0,0,1]},"dimensions":[1,1,1]}
{"id":"b","center":[0.5,0,0],"rotation":{"quaternion":[1,0,0,0]},"dimensions":[1,1,1]}
{"id":"far","center":[10,0,0],"rotation":{"euler_xyz":[0,0,0]},"dimensions":[1,1,1]}
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boxmetrics"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn pair_reports_every_metric() {
    let dir = TempDir::new().unwrap();
    let boxes = write(&dir, "boxes.jsonl", BOXES);
    let out = run(&["pair", &boxes, "a", "b"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = &json_lines(&out)[0];
    let m = &report["metrics"];
    assert_eq!(m["iou"], 0.333333333333);
    assert_eq!(m["v2v"], 0.0);
    assert_eq!(m["bbd"], 0.666666666667);
    assert_eq!(m["position_diff"]["abs"], 0.5);
    assert_eq!(m["size_diff"]["squared"], 0.0);
    assert_eq!(m["rotation"]["matrix_geodesic"], 0.0);
    assert_eq!(m["point_iou"], Value::Null);
    assert_eq!(report["tol"], 1e-9);
    assert!(report["version"].is_string());
    assert_eq!(report["warnings"], Value::Array(vec![]));
}

#[test]
fn pair_with_identical_and_far_boxes() {
    let dir = TempDir::new().unwrap();
    let boxes = write(&dir, "boxes.jsonl", BOXES);
    let same = json_lines(&run(&["pair", &boxes, "a", "a"]));
    assert_eq!(same[0]["metrics"]["iou"], 1.0);
    assert_eq!(same[0]["metrics"]["bbd"], 0.0);
    let far = json_lines(&run(&["pair", &boxes, "a", "far", "--metrics", "bbd,v2v"]));
    assert_eq!(far[0]["metrics"]["bbd"], 10.0);
    assert_eq!(far[0]["metrics"]["v2v"], 9.0);
    assert!(far[0]["metrics"].get("iou").is_none());
}

#[test]
fn pair_defaults_to_the_only_two_boxes() {
    let dir = TempDir::new().unwrap();
    let two: String = BOXES.lines().take(2).map(|l| format!("{l}\n")).collect();
    let boxes = write(&dir, "two.jsonl", &two);
    let out = run(&["pair", &boxes]);
    assert!(out.status.success());
    assert_eq!(json_lines(&out)[0]["box_b"], "b");
    let three = write(&dir, "three.jsonl", BOXES);
    assert_eq!(run(&["pair", &three]).status.code(), Some(2));
}

#[test]
fn pair_with_cloud_file() {
    let dir = TempDir::new().unwrap();
    let boxes = write(&dir, "boxes.jsonl", BOXES);
    let cloud = write(&dir, "cloud.xyz", "-0.4 0 0\n0.4 0 0\n2 0 0\n");
    let out = run(&["pair", &boxes, "a", "b", "--cloud", &cloud]);
    assert_eq!(json_lines(&out)[0]["metrics"]["point_iou"], 0.5);

    let outside = write(&dir, "outside.xyz", "50 50 50\n");
    let out = run(&["pair", &boxes, "a", "b", "--cloud", &outside]);
    let report = &json_lines(&out)[0];
    assert_eq!(report["metrics"]["point_iou"], Value::Null);
    assert_eq!(report["warnings"][0], "UndefinedRatio");

    let ply = write(
        &dir,
        "cloud.ply",
        "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\nend_header\n0.25 0 0\n",
    );
    let out = run(&["pair", &boxes, "a", "b", "--cloud", &ply]);
    assert_eq!(json_lines(&out)[0]["metrics"]["point_iou"], 1.0);
}

#[test]
fn input_errors_exit_with_status_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.jsonl",
        r#"{"id":"a","center":[0,0,0],"rotation":{"matrix":[1,0,0,0,1,0,0,0,1]},"dimensions":[0,1,1]}"#,
    );
    let out = run(&["pair", &bad, "a", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-positive dimension"));

    let boxes = write(&dir, "boxes.jsonl", BOXES);
    assert_eq!(
        run(&["pair", &boxes, "a", "missing"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["pair", &boxes, "a", "b", "--metrics", "nonsense"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["pair", &boxes, "a", "b", "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let malformed = write(&dir, "bad.xyz", "0 0\n");
    let out = run(&["pair", &boxes, "a", "b", "--cloud", &malformed]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn batch_streams_reports_in_order() {
    let dir = TempDir::new().unwrap();
    let boxes = write(&dir, "boxes.jsonl", BOXES);
    let pairs = write(
        &dir,
        "pairs.jsonl",
        "{\"box_a\":\"a\",\"box_b\":\"a\"}\n{\"box_a\":\"a\",\"box_b\":\"b\"}\n{\"box_a\":\"a\",\"box_b\":\"far\"}\n",
    );
    let out = run(&["batch", &boxes, &pairs]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 4);
    for (i, l) in lines[..3].iter().enumerate() {
        assert_eq!(l["job"], i);
    }
    assert_eq!(lines[3]["summary"]["count"], 3);
    assert_eq!(lines[3]["summary"]["errors"], 0);
}

#[test]
fn batch_records_job_errors_and_fails() {
    let dir = TempDir::new().unwrap();
    let boxes = write(&dir, "boxes.jsonl", BOXES);
    let pairs = write(
        &dir,
        "pairs.jsonl",
        "{\"box_a\":\"a\",\"box_b\":\"ghost\"}\n{\"box_a\":\"a\",\"box_b\":\"b\"}\n",
    );
    let out = run(&["batch", &boxes, &pairs]);
    assert_eq!(out.status.code(), Some(1));
    let lines = json_lines(&out);
    assert!(lines[0]["error"].as_str().unwrap().contains("ghost"));
    assert_eq!(lines[1]["metrics"]["iou"], 0.333333333333);
    assert_eq!(lines[2]["summary"]["errors"], 1);
    assert_eq!(lines[2]["summary"]["count"], 2);
}

#[test]
fn empty_batch_succeeds() {
    let dir = TempDir::new().unwrap();
    let boxes = write(&dir, "boxes.jsonl", BOXES);
    let pairs = write(&dir, "pairs.jsonl", "");
    let out = run(&["batch", &boxes, &pairs]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["summary"]["count"], 0);
}

#[test]
fn batch_output_is_deterministic_across_workers() {
    let dir = TempDir::new().unwrap();
    let boxes = write(&dir, "boxes.jsonl", BOXES);
    let ids = ["a", "b", "far"];
    let pairs: String = ids
        .iter()
        .flat_map(|x| {
            ids.iter()
                .map(move |y| format!("{{\"box_a\":\"{x}\",\"box_b\":\"{y}\"}}\n"))
        })
        .collect();
    let pairs = write(&dir, "pairs.jsonl", &pairs);
    let one = dir.path().join("one.jsonl");
    let many = dir.path().join("many.jsonl");
    for (workers, path) in [("1", &one), ("8", &many)] {
        let out = run(&[
            "batch",
            &boxes,
            &pairs,
            "--workers",
            workers,
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let read = |p: &Path| fs::read(p).unwrap();
    assert_eq!(read(&one), read(&many));
    assert_eq!(read(&one), {
        let out = run(&["batch", &boxes, &pairs, "--workers", "1"]);
        out.stdout
    });
}

#[test]
fn oracle_subcommand_reports_both_sides() {
    let dir = TempDir::new().unwrap();
    let boxes = write(&dir, "boxes.jsonl", BOXES);
    let out = run(&[
        "oracle",
        &boxes,
        "a",
        "b",
        "--samples",
        "200000",
        "--seed",
        "7",
        "--grid",
        "8",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = &json_lines(&out)[0];
    assert_eq!(r["iou"], 0.333333333333);
    let est = r["mc_iou"]["estimate"].as_f64().unwrap();
    assert!((est - 1.0 / 3.0).abs() < 0.005);
    assert_eq!(r["mc_iou"]["seed"], 7);
    assert_eq!(r["sampled_v2v"]["value"], 0.0);

    let far = json_lines(&run(&[
        "oracle",
        &boxes,
        "a",
        "far",
        "--samples",
        "1000",
        "--grid",
        "4",
    ]));
    assert_eq!(far[0]["sampled_v2v"]["value"], 9.0);
    assert_eq!(far[0]["mc_iou"]["estimate"], 0.0);
    assert_eq!(
        run(&["oracle", &boxes, "a", "b", "--grid", "1"])
            .status
            .code(),
        Some(2)
    );
}
