use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spcluster(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spcluster"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = spcluster(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_cluster_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("moons.csv");
    let pred = dir.path().join("pred.txt");
    let truth = dir.path().join("truth.txt");
    ok_stdout(&[
        "gen",
        "--shape",
        "moons",
        "--n",
        "400",
        "--out",
        path(&data),
    ]);

    let report: Value = serde_json::from_str(&ok_stdout(&[
        "cluster",
        "--data",
        path(&data),
        "--label-column",
        "last",
        "--ratio",
        "4",
        "--labels-out",
        path(&pred),
    ]))
    .unwrap();
    assert_eq!(report["n_samples"], 400);
    assert_eq!(report["mode"], "coarsened");
    assert!(report["coarse_nodes"].as_u64().unwrap() < 400);
    let acc = report["acc"].as_f64().unwrap();
    assert!(acc >= 0.99, "acc {acc}");

    let labels: String = fs::read_to_string(&data)
        .unwrap()
        .lines()
        .map(|l| format!("{}\n", l.rsplit(',').next().unwrap()))
        .collect();
    fs::write(&truth, labels).unwrap();
    let eval: Value = serde_json::from_str(&ok_stdout(&[
        "eval",
        "--truth",
        path(&truth),
        "--pred",
        path(&pred),
    ]))
    .unwrap();
    assert_eq!(eval["acc"].as_f64().unwrap(), acc);
    assert_eq!(eval["n_samples"], 400);
}

#[test]
fn report_goes_to_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let stdout = ok_stdout(&[
        "cluster",
        "--synthetic",
        "circles",
        "--n",
        "300",
        "--noise",
        "0.02",
        "--output",
        path(&out),
    ]);
    assert!(stdout.is_empty());
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["n_samples"], 300);
}

#[test]
fn cluster_is_deterministic() {
    let args = [
        "cluster",
        "--synthetic",
        "moons",
        "--n",
        "300",
        "--seed",
        "9",
    ];
    let strip = |s: String| {
        let mut v: Value = serde_json::from_str(&s).unwrap();
        v.as_object_mut().unwrap().remove("times");
        v
    };
    assert_eq!(strip(ok_stdout(&args)), strip(ok_stdout(&args)));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"mode": "standard_sc", "k_clusters": 3,
            "source": {"kind": "two_moons", "n": 200, "noise": 0.05, "seed": 1}}"#,
    )
    .unwrap();
    let report: Value =
        serde_json::from_str(&ok_stdout(&["cluster", "--config", path(&cfg), "-k", "2"])).unwrap();
    assert_eq!(report["mode"], "standard_sc");
    assert_eq!(report["k_clusters"], 2);
    assert_eq!(report["n_samples"], 200);
}

#[test]
fn bench_writes_csv() {
    let csv = ok_stdout(&[
        "bench",
        "--synthetic",
        "moons",
        "--n",
        "300",
        "--ratios",
        "1,5",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "ratio,acc,coarse_nodes,t_graph,t_coarsen,t_eigen,t_kmeans,t_lift,error"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,"));
    assert!(lines[1].contains(",300,"));
}

#[test]
fn scale_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scale.csv");
    ok_stdout(&[
        "scale",
        "--sizes",
        "400,800",
        "--repeats",
        "2",
        "--out",
        path(&out),
    ]);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,edges,coarse_nodes,t_coarsen,ratio");
    assert!(lines[1].starts_with("400,") && lines[1].ends_with(','));
    assert!(lines[2].starts_with("800,"));
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &[
            "cluster",
            "--synthetic",
            "moons",
            "--n",
            "200",
            "--ratio",
            "0.5",
        ][..],
        &["cluster", "--synthetic", "moons", "--n", "200", "-k", "0"],
        &["gen", "--shape", "moons", "--n", "5", "--out", "/dev/null"],
        &["scale", "--sizes", "800,400"],
    ] {
        let out = spcluster(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0\nx\n").unwrap();
    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "1,2,0\n3,0\n").unwrap();
    for args in [
        vec!["cluster", "--data", path(&missing)],
        vec!["cluster", "--data", path(&ragged), "--label-column", "last"],
        vec!["eval", "--truth", path(&bad), "--pred", path(&bad)],
    ] {
        let out = spcluster(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
    }
}
