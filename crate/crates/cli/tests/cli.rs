//! End-to-end CLI checks: flag documentation, exit codes, pipeline
//! smoke run, and byte-identical reruns.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vq360"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_ok(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn help_documents_every_flag() {
    let expectations: &[(&str, &[&str])] = &[
        (
            "features",
            &[
                "--config",
                "--manifest",
                "--out",
                "--mode",
                "--pattern",
                "--fov",
                "--jobs",
            ],
        ),
        (
            "pool",
            &[
                "--config",
                "--cache",
                "--manifest",
                "--out",
                "--pooling",
                "--tau",
                "--p",
                "--k-percent",
            ],
        ),
        (
            "train",
            &[
                "--table",
                "--kind",
                "--grid",
                "--tune-repeats",
                "--tune-fraction",
                "--seed",
                "--out",
            ],
        ),
        ("predict", &["--model", "--table", "--out"]),
        (
            "evaluate",
            &[
                "--input",
                "--score-col",
                "--table",
                "--logistic-fit",
                "--split",
                "--out",
            ],
        ),
        (
            "cv",
            &[
                "--table",
                "--kind",
                "--model",
                "--hyperparams",
                "--repeats",
                "--fraction",
                "--seed",
                "--out",
            ],
        ),
        (
            "sffs",
            &[
                "--table",
                "--max-features",
                "--kind",
                "--repeats",
                "--fraction",
                "--seed",
                "--out",
            ],
        ),
        (
            "sweep",
            &[
                "--config",
                "--manifest",
                "--patterns",
                "--fovs",
                "--include-projection",
                "--jobs",
                "--out",
            ],
        ),
        (
            "synth",
            &[
                "--out",
                "--contents",
                "--levels",
                "--frames",
                "--width",
                "--seed",
            ],
        ),
    ];
    for (cmd, flags) in expectations {
        let out = run(&[cmd, "--help"]);
        assert_ok(&out, &format!("{cmd} --help"));
        let text = String::from_utf8_lossy(&out.stdout);
        for flag in *flags {
            assert!(text.contains(flag), "`{cmd} --help` missing {flag}");
        }
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["features", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_failures_exit_one_with_one_line_error() {
    let out = run(&[
        "pool",
        "--cache",
        "/nonexistent",
        "--manifest",
        "/nonexistent/manifest.json",
        "--out",
        "/tmp/never.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    let lines: Vec<&str> = err.trim().lines().collect();
    assert_eq!(lines.len(), 1, "expected one-line error, got: {err}");
    assert!(lines[0].starts_with("error: "));
}

fn file_bytes(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn pipeline_smoke_runs_and_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let path = |s: &str| root.join(s).to_string_lossy().into_owned();

    assert_ok(
        &run(&[
            "synth",
            "--out",
            &path("data"),
            "--contents",
            "8",
            "--levels",
            "2",
            "--frames",
            "3",
            "--width",
            "64",
            "--seed",
            "5",
        ]),
        "synth",
    );
    let features = [
        "features",
        "--manifest",
        &path("data/manifest.json"),
        "--out",
        &path("cache"),
        "--mode",
        "vp",
        "--pattern",
        "equatorial",
        "--fov",
        "40",
        "--jobs",
        "2",
    ];
    assert_ok(&run(&features), "features");
    let pool = [
        "pool",
        "--cache",
        &path("cache"),
        "--manifest",
        &path("data/manifest.json"),
        "--out",
        &path("pooled.csv"),
    ];
    assert_ok(&run(&pool), "pool");
    let train = [
        "train",
        "--table",
        &path("pooled.csv"),
        "--kind",
        "rfr",
        "--tune-repeats",
        "2",
        "--seed",
        "11",
        "--out",
        &path("model.json"),
    ];
    assert_ok(&run(&train), "train");
    let predict = [
        "predict",
        "--model",
        &path("model.json"),
        "--table",
        &path("pooled.csv"),
        "--out",
        &path("pred.csv"),
    ];
    assert_ok(&run(&predict), "predict");
    std::fs::write(
        root.join("split.txt"),
        "[train]\nc00\nc01\nc02\nc03\nc04\nc05\n[test]\nc06\nc07\n",
    )
    .unwrap();
    let evaluate = [
        "evaluate",
        "--input",
        &path("pred.csv"),
        "--table",
        &path("pooled.csv"),
        "--score-col",
        "prediction",
        "--split",
        &path("split.txt"),
        "--out",
        &path("report.json"),
    ];
    assert_ok(&run(&evaluate), "evaluate");
    let cv = [
        "cv",
        "--table",
        &path("pooled.csv"),
        "--repeats",
        "12",
        "--seed",
        "3",
        "--out",
        &path("cv"),
    ];
    assert_ok(&run(&cv), "cv");
    let sffs = [
        "sffs",
        "--table",
        &path("pooled.csv"),
        "--max-features",
        "2",
        "--repeats",
        "2",
        "--out",
        &path("sffs"),
    ];
    assert_ok(&run(&sffs), "sffs");
    let sweep = [
        "sweep",
        "--manifest",
        &path("data/manifest.json"),
        "--patterns",
        "equatorial",
        "--fovs",
        "40",
        "--out",
        &path("sweep"),
    ];
    assert_ok(&run(&sweep), "sweep");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root.join("report.json")).unwrap()).unwrap();
    assert!(report["report"]["plcc"].as_f64().unwrap() > 0.5);

    // Rerun everything with identical seeds: outputs must not change
    // by a single byte.
    let outputs = [
        path("data/manifest.json"),
        path("data/videos/c03_l2.yuv"),
        path("pooled.csv"),
        path("model.json"),
        path("pred.csv"),
        path("report.json"),
        path("cv/cv_report.json"),
        path("cv/cv_repeats.csv"),
        path("sffs/sffs_trace.json"),
        path("sweep/sweep.csv"),
    ];
    let before: Vec<Vec<u8>> = outputs.iter().map(|p| file_bytes(Path::new(p))).collect();
    let synth = [
        "synth",
        "--out",
        &path("data"),
        "--contents",
        "8",
        "--levels",
        "2",
        "--frames",
        "3",
        "--width",
        "64",
        "--seed",
        "5",
    ];
    for args in [
        &synth[..],
        &features[..],
        &pool[..],
        &train[..],
        &predict[..],
        &evaluate[..],
        &cv[..],
        &sffs[..],
        &sweep[..],
    ] {
        assert_ok(&run(args), "rerun");
    }
    for (path, old) in outputs.iter().zip(before) {
        assert_eq!(
            file_bytes(Path::new(path)),
            old,
            "{path} changed between identical runs"
        );
    }
}

#[test]
fn evaluate_identical_pred_and_target_gives_zero_rmse() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("scores.csv");
    // Score column equals dmos exactly.
    std::fs::write(
        &input,
        "video_id,group_id,dmos,score\na,g1,10,10\nb,g1,20,20\nc,g2,30,30\nd,g2,35,35\n",
    )
    .unwrap();
    let out = dir.path().join("report.json");
    let res = run(&[
        "evaluate",
        "--input",
        input.to_str().unwrap(),
        "--score-col",
        "score",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_ok(&res, "evaluate");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["report"]["rmse"].as_f64().unwrap(), 0.0);
    assert_eq!(report["report"]["plcc"].as_f64().unwrap(), 1.0);
}
