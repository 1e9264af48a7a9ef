use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_busemann"))
        .args(args)
        .env_remove("BUSEMANN_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Validates `doc` against `schemas/<name>.schema.json`.
fn assert_valid(name: &str, doc: &Value) {
    let body = load(&schema_dir().join("body.schema.json"));
    let schema = load(&schema_dir().join(format!("{name}.schema.json")));
    let validator = jsonschema::options()
        .with_resource(
            "urn:busemann:schema:body",
            jsonschema::Resource::from_contents(body).unwrap(),
        )
        .build(&schema)
        .unwrap();
    let errors: Vec<String> = validator
        .iter_errors(doc)
        .map(|e| format!("{e} at {}", e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}");
}

fn json_out(dir: &tempfile::TempDir, name: &str) -> (PathBuf, String) {
    let p = dir.path().join(name);
    let s = p.to_str().unwrap().to_string();
    (p, s)
}

#[test]
fn functional_of_a_spherical_ball() {
    let dir = tempfile::tempdir().unwrap();
    let (path, out) = json_out(&dir, "f.json");
    let o = run(&[
        "functional",
        "--space",
        "s+:2",
        "--body",
        "ball:r=0.7",
        "--sections",
        "4",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = load(&path);
    assert_valid("functional", &doc);
    let vol = doc["volume"]["value"].as_f64().unwrap();
    let f = doc["functional"]["value"].as_f64().unwrap();
    assert!((vol - 2.0 * PI * (1.0 - 0.7f64.cos())).abs() < 1e-12);
    assert!((f - 8.0 * PI * 0.49).abs() < 1e-10);
    let sections = doc["sections"].as_array().unwrap();
    assert_eq!(sections.len(), 4);
    assert!(sections
        .iter()
        .all(|s| (s["value"].as_f64().unwrap() - 1.4).abs() < 1e-12));
}

#[test]
fn functional_of_a_hyperbolic_ball() {
    let o = run(&["functional", "--space", "h:3", "--body", "ball:r=1"]);
    assert_eq!(code(&o), 0);
    // vol = 4π ∫_0^1 sinh² = π (sinh 2 - 2); sections are disks of area 2π (cosh 1 - 1).
    let vol = PI * (2f64.sinh() - 2.0);
    let f = 4.0 * PI * (2.0 * PI * (1f64.cosh() - 1.0)).powi(3);
    let text = stdout(&o);
    let value = |label: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(label)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    assert!((value("volume") - vol).abs() < 1e-12 * vol);
    assert!((value("functional") - f).abs() < 1e-10 * f);
}

#[test]
fn malformed_body_is_a_usage_error() {
    for spec in ["ball:radius=1", "ball:r=x", "blob", "ellipsoid:semiaxes=1/2"] {
        let o = run(&["functional", "--space", "e:3", "--body", spec]);
        assert_eq!(code(&o), 2, "{spec}");
        assert!(stderr(&o).contains("--body"), "{spec}: {}", stderr(&o));
    }
    assert_eq!(code(&run(&["functional", "--space", "q:3", "--body", "ball:r=1"])), 2);
    assert_eq!(code(&run(&["verify", "--theorem", "nonsense"])), 2);
    assert_eq!(
        code(&run(&[
            "functional",
            "--space",
            "e:2",
            "--body",
            "ball:r=1",
            "--out",
            "x.txt"
        ])),
        2
    );
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn body_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (path, saved) = json_out(&dir, "body.json");
    let spec = "ridge:base=0.5,direction=1/0/0,amplitude=0.3,power=2,direction=0/0.6/0.8,amplitude=-0.2,power=1";
    let a = run(&["functional", "--space", "s+:3", "--body", spec, "--save-body", &saved]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_valid("body", &load(&path));
    let b = run(&["functional", "--body", &saved]);
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    assert_eq!(stdout(&a), stdout(&b));
    let wrong = run(&["functional", "--space", "e:3", "--body", &saved]);
    assert_eq!(code(&wrong), 2);
}

#[test]
fn verify_lune_maximum() {
    let dir = tempfile::tempdir().unwrap();
    let (path, out) = json_out(&dir, "v.json");
    let o = run(&["verify", "--theorem", "lune-max", "--w", "0.3", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let doc = load(&path);
    assert_valid("report", &doc);
    let r = &doc["reports"][0];
    assert_eq!(r["verdict"], "pass");
    assert!(r["rel_gap"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn verify_spherical_minimum_on_random_sets() {
    let dir = tempfile::tempdir().unwrap();
    let (path, out) = json_out(&dir, "v.csv");
    let args = [
        "verify",
        "--theorem",
        "min-nd",
        "--random",
        "20",
        "--dim",
        "3",
        "--seed",
        "7",
        "--out",
        &out,
    ];
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let header = rdr.headers().unwrap().clone();
    assert_eq!(&header[0], "format_version");
    let verdict = header.iter().position(|h| h == "verdict").unwrap();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| &r[verdict] == "pass"));
    let again = run(&args);
    assert_eq!(stdout(&o), stdout(&again));
}

#[test]
fn verify_gaussian_ball_is_equality() {
    let dir = tempfile::tempdir().unwrap();
    let (path, out) = json_out(&dir, "g.json");
    let o = run(&[
        "verify",
        "--theorem",
        "gaussian",
        "--dim",
        "2",
        "--body",
        "ball:r=1",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0);
    let doc = load(&path);
    assert_valid("report", &doc);
    let r = &doc["reports"][0];
    let (lhs, rhs) = (r["lhs"].as_f64().unwrap(), r["rhs"].as_f64().unwrap());
    assert!((lhs - rhs).abs() <= 1e-6 * rhs);
}

#[test]
fn verify_exit_codes() {
    // Two thin symmetric sectors: not convex, so the lune bound fails while
    // the cone identity holds with equality.
    let cone = "cone:arcs=0.1/0.3/3.2415926535897931/3.4415926535897931";
    let o = run(&["verify", "--theorem", "lune-max", "--body", cone]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
    assert_eq!(code(&run(&["verify", "--theorem", "cone-max", "--body", cone])), 0);
    let o = run(&[
        "verify",
        "--theorem",
        "busemann-euclidean",
        "--dim",
        "2",
        "--body",
        "ellipsoid:semiaxes=1/3",
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "verify",
        "--theorem",
        "min2d",
        "--body",
        "ridge:base=0.5,direction=1/0,amplitude=0.2,power=1",
    ]);
    assert_eq!(code(&o), 2, "asymmetric body for a symmetric theorem");
    assert_eq!(code(&run(&["verify", "--theorem", "prop4.1", "--space", "e:3"])), 2);
}

#[test]
fn perturbation_signs() {
    let dir = tempfile::tempdir().unwrap();
    let (path, out) = json_out(&dir, "p.json");
    let o = run(&[
        "experiment",
        "perturbation",
        "--dim",
        "3",
        "--r",
        "0.7854",
        "--k",
        "2,4",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let doc = load(&path);
    assert_valid("perturbation", &doc);
    let signs: Vec<i64> = doc["experiments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["observed_sign"].as_i64().unwrap())
        .collect();
    assert_eq!(signs, [1, -1]);

    let (csv_path, csv_out) = json_out(&dir, "p.csv");
    let o = run(&[
        "experiment",
        "perturbation",
        "--k",
        "2",
        "--beta",
        "0.02,0.01",
        "--out",
        &csv_out,
    ]);
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let h = rdr.headers().unwrap().clone();
    assert!(h.iter().any(|c| c == "predicted_sign") && h.iter().any(|c| c == "observed_sign"));
    assert_eq!(rdr.records().count(), 2);
    assert_eq!(code(&run(&["experiment", "perturbation", "--r", "2"])), 2);
}

#[test]
fn sharpness_schedule_approaches_the_constant() {
    let dir = tempfile::tempdir().unwrap();
    let (path, out) = json_out(&dir, "s.json");
    let o = run(&["experiment", "sharpness", "--dim", "3", "--t", "0.5", "--out", &out]);
    assert_eq!(code(&o), 0);
    let doc = load(&path);
    assert_valid("sharpness", &doc);
    let c = 32.0 / (PI * PI);
    assert!((doc["constant"].as_f64().unwrap() - c).abs() < 1e-12);
    let last = doc["rows"].as_array().unwrap().last().unwrap()["normalized"]
        .as_f64()
        .unwrap();
    assert!(last >= c && last <= 1.05 * c, "{last}");
    assert_eq!(
        code(&run(&["experiment", "sharpness", "--alpha", "0.1", "--eps", "0.5,0.4"])),
        2
    );
}

#[test]
fn search_trace() {
    let dir = tempfile::tempdir().unwrap();
    let (csv_path, csv_out) = json_out(&dir, "trace.csv");
    let args = [
        "experiment",
        "search",
        "--space",
        "s+:2",
        "--class",
        "sym-star",
        "--sense",
        "max",
        "--seed",
        "1",
    ];
    let mut with_out = args.to_vec();
    with_out.extend(["--budget", "300", "--out", &csv_out]);
    let o = run(&with_out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "format_version",
            "iteration",
            "objective",
            "volume_drift",
            "step",
            "accepted"
        ]
    );
    assert_eq!(rdr.records().count(), 300);

    let (path, out) = json_out(&dir, "trace.json");
    let mut json_args = args.to_vec();
    json_args.extend(["--budget", "300", "--out", &out]);
    assert_eq!(code(&run(&json_args)), 0);
    let doc = load(&path);
    assert_valid("search", &doc);
    assert_valid("body", &doc["best"]);
    assert!(doc["best_objective"].as_f64() >= doc["initial_objective"].as_f64());
    assert_eq!(code(&run(&["experiment", "search", "--class", "round"])), 2);
    assert_eq!(code(&run(&["experiment", "search", "--space", "s+:3"])), 2);
}

#[test]
fn thread_count_from_flag_and_environment() {
    let a = run(&[
        "--threads",
        "1",
        "verify",
        "--theorem",
        "hyperbolic",
        "--random",
        "4",
        "--seed",
        "3",
    ]);
    let b = Command::new(env!("CARGO_BIN_EXE_busemann"))
        .args(["verify", "--theorem", "hyperbolic", "--random", "4", "--seed", "3"])
        .env("BUSEMANN_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(code(&run(&["--threads", "0", "verify", "--theorem", "min2d"])), 2);
}

#[test]
fn schemas_reject_malformed_documents() {
    let dir = tempfile::tempdir().unwrap();
    let (path, out) = json_out(&dir, "f.json");
    assert_eq!(
        code(&run(&[
            "functional",
            "--space",
            "e:2",
            "--body",
            "ball:r=1",
            "--out",
            &out
        ])),
        0
    );
    let good = load(&path);
    let body = load(&schema_dir().join("body.schema.json"));
    let schema = load(&schema_dir().join("functional.schema.json"));
    let validator = jsonschema::options()
        .with_resource(
            "urn:busemann:schema:body",
            jsonschema::Resource::from_contents(body).unwrap(),
        )
        .build(&schema)
        .unwrap();
    assert!(validator.is_valid(&good));
    let mut bad = good.clone();
    bad["body"]["profile"]["kind"] = "blob".into();
    assert!(!validator.is_valid(&bad));
    let mut bad = good.clone();
    bad["format_version"] = 2.into();
    assert!(!validator.is_valid(&bad));
    let mut bad = good;
    bad["body"]["space"]["delta"] = 3.into();
    assert!(!validator.is_valid(&bad));
}
