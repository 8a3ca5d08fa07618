use std::path::Path;
use std::process::{Command, Output};

use manhattan_cox::analytic::{cdf_intersection, cdf_typical_theorem2, QuadSpec};
use manhattan_cox::ModelParams;
use serde_json::Value;

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_manhattan-cox"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("MANHATTAN_COX_THREADS", t),
        None => cmd.env_remove("MANHATTAN_COX_THREADS"),
    };
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn curve_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = run(
        &[
            "curve",
            "--lambda-l",
            "2",
            "--lambda-c",
            "0.7",
            "--grid-points",
            "50",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&out), 0);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["distance_km", "cdf"]);
    assert_eq!(rows.len(), 50);
    assert_eq!(rows[0], [0.0, 0.0]);
    let params = ModelParams::new(2.0, 0.7).unwrap();
    for w in rows.windows(2) {
        assert!(w[1][1] >= w[0][1]);
    }
    for row in &rows {
        assert_eq!(row[1].to_bits(), cdf_intersection(row[0], &params).unwrap().to_bits());
    }
}

#[test]
fn typical_curve_carries_both_routes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = run(
        &[
            "curve",
            "--preset",
            "dl-sp-typical",
            "--grid-points",
            "20",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["distance_km", "cdf", "cdf_assembled", "abs_diff"]);
    let params = ModelParams::new(10.0, 0.5).unwrap();
    for row in &rows {
        assert!(row[3] <= 1e-6);
        let want = cdf_typical_theorem2(row[0], &params, &QuadSpec::default()).unwrap();
        assert_eq!(row[1], want);
    }
}

#[test]
fn curve_json_has_schema_version() {
    let out = run(
        &["curve", "--preset", "sl-dp", "--grid-points", "5", "--format", "json"],
        None,
    );
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["config"]["lambda_c"], 3.0);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn intersection_preset_validates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dl-dp.csv");
    let out = run(
        &[
            "validate",
            "--preset",
            "dl-dp-intersection",
            "--seed",
            "5",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&path);
    assert_eq!(
        header,
        ["distance_km", "cdf_empirical", "cdf_analytic", "dkw_lo", "dkw_hi"]
    );
    for r in &rows {
        assert!(r[3] <= r[1] && r[1] <= r[4]);
    }
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("dl-dp.report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["report"]["pass"], true);
    assert_eq!(report["config"]["lambda_c"], 3.0);
    assert_eq!(report["report"]["n_trials"], 100_000);
}

#[test]
fn typical_preset_validates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sl-sp.json");
    let out = run(
        &["validate", "--preset", "sl-sp-typical", "--out", path.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["config"]["mode"], "typical-point");
    assert_eq!(doc["report"]["pass"], true);
    assert!(doc["report"]["ks_statistic"].as_f64().unwrap() <= 0.0063);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"lambda_l": 1.0, "lambda_c": 1.0, "colour": "red"}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["validate", "--lambda-l", "-1", "--lambda-c", "1"],
        vec!["validate", "--lambda-l", "1"],
        vec!["validate", "--preset", "dl-xx"],
        vec!["validate", "--preset", "dl-dp", "--trials", "10"],
        vec!["curve", "--preset", "dl-dp-typical", "--mode", "intersection"],
        vec!["curve", "--config", bad.to_str().unwrap()],
        vec!["curve", "--config", "/nonexistent/config.json"],
        vec!["curve", "--mode", "sideways"],
    ];
    for args in cases {
        assert_eq!(code(&run(&args, None)), 2, "{args:?}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"preset": "sl-sp", "mode": "typical-point", "grid_points": 4, "lambda_c": 0.25}"#,
    )
    .unwrap();
    let out = run(
        &[
            "curve",
            "--config",
            cfg.to_str().unwrap(),
            "--lambda-c",
            "2",
            "--format",
            "json",
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["lambda_l"], 1.0);
    assert_eq!(doc["config"]["lambda_c"], 2.0);
    assert_eq!(doc["config"]["mode"], "typical-point");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in [None, Some("1"), Some("3")].into_iter().enumerate() {
        let path = dir.path().join(format!("run{i}.json"));
        let out = run(
            &[
                "validate",
                "--preset",
                "sl-dp",
                "--mode",
                "typical-point",
                "--trials",
                "3000",
                "--seed",
                "42",
                "--out",
                path.to_str().unwrap(),
            ],
            threads,
        );
        assert_eq!(code(&out), 0);
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let other = dir.path().join("other.json");
    run(
        &[
            "validate",
            "--preset",
            "sl-dp",
            "--mode",
            "typical-point",
            "--trials",
            "3000",
            "--seed",
            "43",
            "--out",
            other.to_str().unwrap(),
        ],
        None,
    );
    assert_ne!(std::fs::read(&other).unwrap(), outputs[0]);
}
