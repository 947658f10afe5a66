use std::path::Path;
use std::process::{Command, Output};

const BALL: &str = r#"{"type":"ball","center":[0,0],"radius":1}"#;
const ELLIPSE: &str = r#"{"type":"ellipsoid","center":[0.1,-0.2],"shape":[[0.25,0.1],[0.1,1]]}"#;
const LSE_SQUARE: &str = r#"{"type":"lse_polytope","halfspaces":[
    {"normal":[1,0],"offset":1},{"normal":[-1,0],"offset":1},
    {"normal":[0,1],"offset":1},{"normal":[0,-1],"offset":1}]}"#;

fn finsler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args(args)
        .env("FINSLER_THREADS", "2")
        .output()
        .expect("binary runs")
}

struct Table {
    summary: Vec<(String, f64)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Self {
        let mut summary = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# summary ") {
                let (k, v) = rest.split_once(": ").unwrap();
                summary.push((k.to_string(), v.parse().unwrap()));
            } else if !line.starts_with('#') {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.unwrap().iter().map(String::from).collect())
            .collect();
        Self {
            summary,
            columns,
            rows,
        }
    }

    fn col(&self, name: &str) -> Vec<f64> {
        let i = self.columns.iter().position(|c| c == name).unwrap();
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }

    fn summary(&self, key: &str) -> f64 {
        self.summary.iter().find(|(k, _)| k == key).unwrap().1
    }
}

fn table(args: &[&str]) -> Table {
    let out = finsler(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Table::parse(&String::from_utf8(out.stdout).unwrap())
}

#[test]
fn eval_funk_of_ball() {
    let t = table(&[
        "eval",
        "--body",
        BALL,
        "--points",
        r#"[{"x":[0.5,0],"y":[1,0]}]"#,
    ]);
    assert!((t.col("F")[0] - 2.0).abs() < 1e-14);
}

#[test]
fn eval_klein_at_origin() {
    let t = table(&[
        "eval",
        "--metric",
        "klein",
        "--points",
        r#"[{"x":[0,0],"y":[0,1]}]"#,
    ]);
    assert!((t.col("F")[0] - 1.0).abs() < 1e-14);
}

#[test]
fn malformed_json_is_a_spec_error() {
    let out = finsler(&["eval", "--body", r#"{"type":"ball","#]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1 column"), "{err}");
}

#[test]
fn unknown_metric_is_a_spec_error() {
    let out = finsler(&["eval", "--metric", "no-such-metric"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn distances_on_ball() {
    let t = table(&["distance", "--body", BALL, "--points", "[[0,0],[0.5,0]]"]);
    assert!((t.col("funk")[0] - 2f64.ln()).abs() < 1e-14);
    assert!((t.col("hilbert")[0] - 0.5 * 3f64.ln()).abs() < 1e-14);
    for c in ["hilbert_asymmetry", "funk_minus_reverse_swapped"] {
        assert!(t.col(c).iter().all(|v| v.abs() < 1e-14));
    }
}

#[test]
fn points_outside_are_row_flagged() {
    let t = table(&["distance", "--body", BALL, "--points", "[[0,0],[2,0]]"]);
    let err = t.columns.iter().position(|c| c == "error").unwrap();
    assert!(t.rows.iter().all(|r| !r[err].is_empty()));
}

#[test]
fn hilbert_geodesics_follow_closed_form() {
    let t = table(&[
        "geodesic",
        "--metric",
        "hilbert",
        "--body",
        ELLIPSE,
        "--samples",
        "4",
    ]);
    assert!(t.summary("max_deviation") < 1e-6);
    let s = t.col("s");
    assert!(s.iter().any(|&v| (v + 3.0).abs() < 1e-12));
    assert!(s.iter().any(|&v| (v - 3.0).abs() < 1e-12));
}

#[test]
fn euclidean_geodesic_is_exact() {
    let t = table(&[
        "geodesic",
        "--metric",
        "euclidean",
        "--points",
        r#"[{"x":[0,0],"y":[3,4]}]"#,
    ]);
    assert!(t.summary("max_deviation") < 1e-13);
}

#[test]
fn boundary_reached_is_reported() {
    let t = table(&[
        "geodesic",
        "--metric",
        "funk",
        "--body",
        BALL,
        "--samples",
        "1",
        "--s-end",
        "60",
    ]);
    let err = t.columns.iter().position(|c| c == "error").unwrap();
    assert!(t.rows.last().unwrap()[err].starts_with("boundary reached at s ="));
}

#[test]
fn funk_ball_curvature_summary() {
    let t = table(&[
        "curvature",
        "--metric",
        "funk",
        "--body",
        BALL,
        "--samples",
        "20",
    ]);
    assert!((t.summary("mean") + 0.25).abs() < 1e-6);
    assert!(t.summary("spread") < 1e-6);
}

#[test]
fn hilbert_lse_curvature_summary() {
    let t = table(&[
        "curvature",
        "--metric",
        "hilbert",
        "--body",
        LSE_SQUARE,
        "--samples",
        "20",
        "--tol",
        "1e-5",
    ]);
    assert!((t.summary("mean") + 1.0).abs() < 1e-5);
    assert!(t.summary("spread") < 1e-5);
}

#[test]
fn minkowski_curvature_vanishes() {
    let t = table(&[
        "curvature",
        "--metric",
        "minkowski",
        "--body",
        BALL,
        "--samples",
        "5",
    ]);
    assert!(t.col("K").iter().all(|k| k.abs() < 1e-10));
}

#[test]
fn curvature_spread_above_tolerance_fails() {
    let out = finsler(&[
        "curvature",
        "--metric",
        "conformal",
        "--samples",
        "5",
        "--tol",
        "1e-6",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fixed_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, format: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let out = finsler(&[
            "curvature",
            "--metric",
            "hilbert",
            "--body",
            ELLIPSE,
            "--samples",
            "8",
            "--seed",
            "7",
            "--format",
            format,
            "--out",
            p,
        ]);
        assert!(out.status.success());
        std::fs::read(Path::new(p)).unwrap()
    };
    assert_eq!(run("a.csv", "csv"), run("b.csv", "csv"));
    assert_eq!(run("a.json", "json"), run("b.json", "json"));
}

#[test]
fn verify_quick_passes_and_catches_injected_bug() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = finsler(&[
        "verify",
        "--quick",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 12);

    let out = finsler(&["verify", "--quick", "--inject-bug"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[FAIL] criterion  1"), "{err}");
    assert!(err.contains("R(y)=0"), "{err}");
}
