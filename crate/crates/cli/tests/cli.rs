use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn scenesearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scenesearch"))
        .args(args)
        .env_remove("SCENESEARCH_W")
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("not JSON: {l}: {e}")))
        .collect()
}

fn last(out: &Output, event: &str) -> Value {
    let all = records(out);
    let rec = all.last().expect("at least one record").clone();
    assert_eq!(rec["event"], event);
    rec
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_solve_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    let out = scenesearch(&[
        "synth",
        "--object",
        "step_block:0.03,-0.02,40",
        "--noise",
        "0.001",
        "--seed",
        "4",
        "--out",
        path(&scene),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(last(&out, "synth")["points"].as_u64().unwrap() > 100);
    for f in ["scene.pcd", "scene.json", "models.json", "step_block.obj"] {
        assert!(scene.join(f).is_file(), "{f}");
    }

    let solved = dir.path().join("solve");
    let out = scenesearch(&[
        "solve",
        "--scene",
        path(&scene),
        "--workers",
        "1",
        "--out",
        path(&solved),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result = last(&out, "result");
    assert_eq!(result["found"], true);
    assert_eq!(result["poses"].as_array().unwrap().len(), 1);
    assert!(records(&out)[..records(&out).len() - 1]
        .iter()
        .all(|r| r["event"] == "progress"));
    let search: Value =
        serde_json::from_str(&std::fs::read_to_string(solved.join("search.json")).unwrap())
            .unwrap();
    assert_eq!(search["search"]["cost"], result["cost"]);

    let report_dir = dir.path().join("eval");
    let poses = solved.join("poses.json");
    let out = scenesearch(&[
        "eval",
        "--poses",
        path(&poses),
        "--truth",
        path(&scene),
        "--out",
        path(&report_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = last(&out, "report");
    assert!(report["objects"][0]["translation_error"].as_f64().unwrap() < 0.01);
    assert!(report["objects"][0]["yaw_error"].as_f64().unwrap() < 5f64.to_radians());
    assert!(report_dir.join("report.json").is_file());
    let csv = std::fs::read_to_string(report_dir.join("histogram.csv")).unwrap();
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn solve_takes_ids_for_a_bare_cloud() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    assert!(
        scenesearch(&["synth", "--object", "cylinder:0,0,0", "--out", path(&scene)])
            .status
            .success()
    );
    let bare = dir.path().join("bare.pcd");
    std::fs::copy(scene.join("scene.pcd"), &bare).unwrap();

    let out = scenesearch(&["solve", "--scene", path(&bare), "--quiet"]);
    assert_eq!(out.status.code(), Some(2));

    let out = scenesearch(&[
        "solve",
        "--scene",
        path(&bare),
        "--ids",
        "cylinder",
        "--quiet",
        "--workers",
        "1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(records(&out).len(), 1);
    let pose = &last(&out, "result")["poses"][0]["pose"];
    assert!(
        pose["x"]
            .as_f64()
            .unwrap()
            .hypot(pose["y"].as_f64().unwrap())
            < 0.005
    );
}

#[test]
fn experiment_writes_results_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("exp");
    let out = scenesearch(&[
        "experiment",
        "--object",
        "box:0,0.04,0",
        "--table",
        "0.25",
        "--plane",
        "--workers",
        "1",
        "--quiet",
        "--out",
        path(&out_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result = last(&out, "result");
    assert!(result["errors"][0]["translation_error"].as_f64().unwrap() < 0.01);
    let results: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("results.json")).unwrap())
            .unwrap();
    assert!(
        results["preprocess"]["kept_points"].as_u64()
            < results["preprocess"]["input_points"].as_u64()
    );
    assert!(out_dir.join("histogram.csv").is_file());
}

#[test]
fn invalid_configuration_exits_with_two() {
    let cases: [&[&str]; 4] = [
        &["experiment", "--quiet"],
        &[
            "experiment",
            "--object",
            "box:0,0,0",
            "--w",
            "0.5",
            "--quiet",
        ],
        &["experiment", "--object", "box:0,0", "--quiet"],
        &[
            "experiment",
            "--object",
            "box:0,0,0",
            "--grid-xy",
            "-1",
            "--quiet",
        ],
    ];
    for args in cases {
        let out = scenesearch(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn environment_overrides_defaults_and_flags_override_environment() {
    let bin = env!("CARGO_BIN_EXE_scenesearch");
    let run = |extra: &[&str]| {
        Command::new(bin)
            .args([
                "experiment",
                "--object",
                "box:0,0,0",
                "--quiet",
                "--workers",
                "1",
            ])
            .args(extra)
            .env("SCENESEARCH_W", "0.5")
            .output()
            .unwrap()
    };
    assert_eq!(run(&[]).status.code(), Some(2));
    assert!(run(&["--w", "2"]).status.success());
}

#[test]
fn zero_time_limit_exits_with_four() {
    let out = scenesearch(&[
        "experiment",
        "--object",
        "box:0,0,0",
        "--time-limit",
        "0",
        "--workers",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let result = last(&out, "result");
    assert_eq!(result["found"], false);
    assert_eq!(result["timed_out"], true);
}

#[test]
fn missing_scene_is_a_plain_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = scenesearch(&["solve", "--scene", path(&dir.path().join("absent"))]);
    assert_eq!(out.status.code(), Some(1));
}
