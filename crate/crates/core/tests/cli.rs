use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn twogrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twogrid"))
        .args(args)
        .env_remove("RANK_REL_TOL")
        .env_remove("MATCH_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const NEUMANN8: &[&str] = &[
    "analyze",
    "--problem",
    "neumann1d:8",
    "--smoother",
    "jacobi:0.6667",
    "--prolongation",
    "aggregate:2",
];

#[test]
fn analyze_reports_matching_identity_and_oracle() {
    let out = twogrid(NEUMANN8);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let fi = v["factor_identity"].as_f64().unwrap();
    assert!((fi - v["factor_oracle"].as_f64().unwrap()).abs() <= 1e-10);
    assert!((fi - v["factor_ftg"].as_f64().unwrap()).abs() <= 1e-10);
    assert_eq!(v["seed"], 0);
    assert_eq!(v["flags"]["equiv_cond_ok"], true);
    assert!(v["conditions"]["intersection_dim"].is_u64());
}

#[test]
fn identical_invocations_are_byte_identical() {
    let a = twogrid(NEUMANN8);
    let b = twogrid(NEUMANN8);
    assert_eq!(a.stdout, b.stdout);
    let mut with_seed = NEUMANN8.to_vec();
    with_seed.extend(["--seed", "7"]);
    assert_eq!(json(&twogrid(&with_seed))["seed"], 7);
}

#[test]
fn degenerate_coarse_space_gives_zero_factor() {
    let dir = TempDir::new().unwrap();
    let a = write(
        dir.path(),
        "A.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 1\n2 1 -1\n2 2 1\n",
    );
    let p = write(dir.path(), "P.mtx", "%%MatrixMarket matrix array real general\n2 1\n1\n-1\n");
    let out = twogrid(&["analyze", "--matrix", &a, "--prolongation", &p, "--smoother", "jacobi:0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["factor_identity"].as_f64(), Some(0.0));
    assert_eq!(v["flags"]["degenerate"], true);
}

#[test]
fn failed_convergence_condition_exits_two_with_report() {
    let out = twogrid(&["analyze", "--problem", "neumann1d:8", "--smoother", "zero"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["flags"]["equiv_cond_ok"], false);
    assert!(v["factor_identity"].as_f64().unwrap() >= 1.0 - 1e-10);
}

#[test]
fn mismatched_coarse_range_is_rejected() {
    let dir = TempDir::new().unwrap();
    let bc = write(
        dir.path(),
        "Bc.mtx",
        "%%MatrixMarket matrix coordinate real general\n4 4 4\n1 1 1\n2 2 1\n3 3 1\n4 4 1\n",
    );
    let coarse = format!("bc:{bc}");
    let out = twogrid(&["analyze", "--problem", "neumann1d:8", "--coarse", &coarse]);
    assert_ne!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("R(B_c) != R(A_c)"), "{}", stderr(&out));
}

#[test]
fn linear_coarse_solver_adds_inexact_fields() {
    let dir = TempDir::new().unwrap();
    let bc = write(
        dir.path(),
        "Bc.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n4 4 7\n1 1 2\n2 1 -2\n2 2 4\n3 2 -2\n3 3 4\n4 3 -2\n4 4 2\n",
    );
    let coarse = format!("bc:{bc}");
    let out = twogrid(&["analyze", "--problem", "neumann1d:8", "--coarse", &coarse]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert!((v["alpha1"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["beta2"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    let itg = v["factor_exact_itg"].as_f64().unwrap();
    assert!(v["lower_l"].as_f64().unwrap() <= itg + 1e-10 && itg <= v["upper_u"].as_f64().unwrap() + 1e-10);
}

#[test]
fn csv_report_has_frozen_columns() {
    let mut args = NEUMANN8.to_vec();
    args.extend(["--format", "csv"]);
    let out = twogrid(&args);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,problem,smoother,coarse,n,nc,r,s,sigma_tg,factor_identity,factor_oracle,factor_ftg,lower,upper,alpha1,alpha2,beta1,beta2,delta_tg,lower_l,upper_u,factor_exact_itg,equiv_cond_ok,warning"
    );
    assert!(lines.next().unwrap().starts_with("0,neumann1d:8,jacobi:0.6667,exact,8,4,7,3,"));
}

#[test]
fn generate_round_trips_through_matrix_market() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let base = ["--problem", "random:14:8:5", "--smoother", "gs", "--prolongation", "aggregate:3", "--seed", "2"];
    let gen = twogrid(&[&["generate", "--output", d][..], &base[..]].concat());
    assert_eq!(gen.status.code(), Some(0), "{}", stderr(&gen));

    let direct = json(&twogrid(&[&["analyze"][..], &base[..]].concat()));
    let a = format!("{d}/A.mtx");
    let p = format!("{d}/P.mtx");
    let f = format!("{d}/f.mtx");
    let from_file = json(&twogrid(&[
        "analyze", "--matrix", &a, "--rhs", &f, "--prolongation", &p, "--smoother", "gs", "--seed", "2",
    ]));
    let (Value::Object(x), Value::Object(y)) = (&direct, &from_file) else { panic!() };
    let mut compared = 0;
    for (key, xv) in x {
        if let (Some(a), Some(b)) = (xv.as_f64(), y[key].as_f64()) {
            assert!((a - b).abs() <= 1e-14, "{key}: {a} vs {b}");
            compared += 1;
        }
    }
    assert!(compared > 10);
    assert_eq!(x["flags"], y["flags"]);
}

#[test]
fn solve_writes_trace_and_summary() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("trace.csv");
    let t = trace.to_str().unwrap();
    let out = twogrid(&["solve", "--problem", "neumann1d:16", "--smoother", "gs", "--sweeps", "20", "--output", t]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("sweep,error_A,residual_2,ratio\n"));
    assert_eq!(csv.lines().count(), 22);
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trace.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 0);
    assert!(summary["observed_factor"].as_f64().unwrap() < 1.0);
}

#[test]
fn solve_from_reference_stays_at_zero_error() {
    let out = twogrid(&[
        "solve", "--problem", "neumann1d:8", "--sweeps", "1", "--start", "reference", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let err: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(err < 1e-13, "{line}");
    }
}

#[test]
fn solve_rejects_inconsistent_rhs() {
    let dir = TempDir::new().unwrap();
    let a = write(
        dir.path(),
        "A.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n4 4 7\n1 1 1\n2 1 -1\n2 2 2\n3 2 -1\n3 3 2\n4 3 -1\n4 4 1\n",
    );
    let f = write(dir.path(), "f.mtx", "%%MatrixMarket matrix array real general\n4 1\n1\n1\n1\n1\n");
    let out = twogrid(&["solve", "--matrix", &a, "--rhs", &f]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("null-space component 2e0"), "{}", stderr(&out));
}

#[test]
fn solve_with_epsilon_solver_reports_accuracy() {
    let out = twogrid(&["solve", "--problem", "neumann1d:16", "--coarse", "eps:0.5", "--sweeps", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["violations"], 0);
    assert!((v["max_achieved_eps"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn verify_passes_and_detects_injected_offset() {
    let ok = twogrid(&["verify", "--problem", "neumann1d:8"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let v = json(&ok);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["checks"][0]["case"], "neumann1d:8");

    let bad = twogrid(&["verify", "--perturb-identity", "1e-6"]);
    assert_eq!(bad.status.code(), Some(1));
    let v = json(&bad);
    let worst = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["slack"].as_f64().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!((worst + 1e-6).abs() < 1e-9, "{worst}");
    let zero_case = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check"] == "equiv_cond_fails")
        .unwrap();
    assert_eq!(zero_case["passed"], true);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "problem = \"neumann1d:8\"\nsmoother = \"jacobi:0.6667\"\nprolongation = \"aggregate:2\"\nseed = 4\n",
    );
    let from_cfg = json(&twogrid(&["analyze", "--config", &cfg]));
    assert_eq!(from_cfg["seed"], 4);
    assert_eq!(from_cfg["smoother"], "jacobi:0.6667");
    let overridden = json(&twogrid(&["analyze", "--config", &cfg, "--smoother", "gs"]));
    assert_eq!(overridden["smoother"], "gs");

    let bad = write(dir.path(), "bad.toml", "problme = \"neumann1d:8\"\n");
    let out = twogrid(&["analyze", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("invalid config"));
}

#[test]
fn load_errors_carry_file_and_line_context() {
    let dir = TempDir::new().unwrap();
    let a = write(
        dir.path(),
        "A.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 x 1\n",
    );
    let out = twogrid(&["analyze", "--matrix", &a]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("A.mtx") && err.contains("line 4"), "{err}");

    let out = twogrid(&["analyze", "--problem", "neumann3d:4"]);
    assert!(stderr(&out).contains("unknown problem"));
    let out = twogrid(&["analyze"]);
    assert!(stderr(&out).contains("exactly one of --problem and --matrix"));
}

#[test]
fn tolerance_environment_override_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_twogrid"))
        .args(NEUMANN8)
        .env("RANK_REL_TOL", "2.0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("RANK_REL_TOL") || stderr(&out).contains("rank_rel_tol"), "{}", stderr(&out));
    let ok = Command::new(env!("CARGO_BIN_EXE_twogrid"))
        .args(NEUMANN8)
        .env("RANK_REL_TOL", "1e-9")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
}
