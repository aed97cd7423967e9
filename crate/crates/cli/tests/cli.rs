use std::path::{Path, PathBuf};
use std::process::Command;

use lweak_core::verify::{parse_csv, parse_json, Verdict};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["lweak"];
    argv.extend_from_slice(args);
    lweak_cli::run(argv)
}

/// Runs with `--output` into a temp dir and returns (exit code, file text).
fn run_to_file(args: &[&str]) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let out: PathBuf = dir.path().join("report.txt");
    let mut full: Vec<&str> = args.to_vec();
    let out_s = out.to_string_lossy().into_owned();
    full.extend_from_slice(&["--output", &out_s]);
    let code = run(&full);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (code, text)
}

#[test]
fn coeffs_lists_envelope_then_zeros() {
    let (code, text) = run_to_file(&["coeffs", "--model", &fixture("ma3.json"), "--n-max", "10"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 10);
    // α = (1, -0.5, 1), Rademacher: γ_1 = 0.5 + 0.5, γ_2 = 1
    assert_eq!(rows[0][1..], [1.0, 2.0]);
    assert_eq!(rows[1][1..], [1.0, 1.0]);
    for row in &rows[2..] {
        assert_eq!(row[1..], [0.0, 0.0]);
        assert!(row[2].is_sign_positive());
    }
    assert!(text.starts_with("k,gamma,v\n"));
}

#[test]
fn newman_on_iid_has_zero_bounds_and_succeeds() {
    let (code, text) = run_to_file(&[
        "verify", "--check", "newman", "--model", &fixture("iid.json"), "--replicates", "2000", "--seed", "3",
    ]);
    assert_eq!(code, 0);
    let reports = parse_csv(&text).unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r.bound == 0.0 && r.verdict == Verdict::Dominated));
    assert!(reports.iter().all(|r| r.seed == 3 && r.replicates == 2000));
}

#[test]
fn bound_rejects_theta_out_of_range() {
    assert_eq!(run(&["bound", "--n", "4096", "--x-grid", "0:10:0.5", "--theta", "1.2", "--c", "1", "--sigma2", "1"]), 2);
}

#[test]
fn bound_grid_is_inclusive_and_starts_at_one() {
    let (code, text) = run_to_file(&["bound", "--n", "4096", "--x-grid", "0:10:0.5", "--model", &fixture("ma.json")]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,bound,valid");
    assert_eq!(lines.len(), 22);
    assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000000e0,true"));
    assert!(lines[21].starts_with("1.0000000000000000e1,"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]), 2);
    assert_eq!(run(&[]), 2);
    assert_eq!(run(&["coeffs", "--model", &fixture("bad_variant.json"), "--n-max", "3"]), 2);
    assert_eq!(run(&["coeffs", "--model", &fixture("missing.json"), "--n-max", "3"]), 2);
    assert_eq!(run(&["coeffs", "--model", &fixture("cumsum.json"), "--n-max", "3"]), 2);
    assert_eq!(run(&["verify", "--check", "clt", "--model", &fixture("iid.json"), "--replicates", "50"]), 2);
    assert_eq!(run(&["verify", "--check", "bogus", "--model", &fixture("iid.json")]), 2);
    assert_eq!(run(&["verify", "--check", "emp", "--model", &fixture("iid_rademacher.json"), "--replicates", "100"]), 2);
    assert_eq!(run(&["verify", "--check", "cov", "--model", &fixture("ma.json"), "--i", "1,2", "--j", "2", "--replicates", "100"]), 2);
}

#[test]
fn unwritable_output_is_a_config_error() {
    let code = run(&["coeffs", "--model", &fixture("ma.json"), "--n-max", "3", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(code, 2);
}

#[test]
fn violated_row_exits_one() {
    // Without any slack the noise in an i.i.d. covariance exceeds the zero bound.
    let (code, text) = run_to_file(&[
        "verify", "--check", "cov", "--model", &fixture("iid.json"), "--replicates", "1000", "--error-multiplier", "0",
    ]);
    assert_eq!(code, 1);
    assert_eq!(parse_csv(&text).unwrap()[0].verdict, Verdict::Violated);
}

#[test]
fn reports_are_deterministic_and_json_matches_csv() {
    let args = ["verify", "--check", "tail", "--model", &fixture("ma.json"), "--n", "256", "--replicates", "500", "--seed", "11"];
    let (c1, a) = run_to_file(&args);
    let (c2, b) = run_to_file(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let mut json_args = args.to_vec();
    json_args.extend_from_slice(&["--out", "json"]);
    let (c3, j) = run_to_file(&json_args);
    assert_eq!(c3, 0);
    let from_csv = parse_csv(&a).unwrap();
    let from_json = parse_json(&j).unwrap();
    assert_eq!(from_csv.len(), 17);
    for (x, y) in from_csv.iter().zip(&from_json) {
        assert_eq!(x.estimate.to_bits(), y.estimate.to_bits());
        assert_eq!(x.bound.to_bits(), y.bound.to_bits());
        assert_eq!(x.verdict, y.verdict);
    }
}

#[test]
fn decompose_summary_adds_up() {
    let (code, text) = run_to_file(&["decompose", "--model", &fixture("ma.json"), "--n", "1000", "--seed", "2"]);
    assert_eq!(code, 0);
    let (blocks, summary) = text.split_once("\n\n").unwrap();
    assert!(blocks.starts_with("j,Y\n"));
    let get = |k: &str| -> f64 {
        summary
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{k},")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(get("p_n"), 44.0);
    assert_eq!(blocks.lines().count() - 1, 2 * get("r_n") as usize);
    assert!((get("z_odd") + get("z_even") + get("remainder") - get("sum")).abs() < 1e-9);
}

#[test]
fn limit_checks_run_end_to_end() {
    for (check, model, extra) in [
        ("clt", "iid_rademacher.json", vec!["--n", "1024"]),
        ("fclt", "ma.json", vec!["--n", "1024"]),
        ("slln", "iid.json", vec!["--n-grid", "256,512,1024,2048,4096"]),
        ("emp", "iid.json", vec!["--n", "512"]),
        ("emp", "ma.json", vec!["--n", "512"]),
        ("quasi", "ma.json", vec!["--alpha1-grid", "1:50:1"]),
    ] {
        let mut args = vec!["verify", "--check", check, "--replicates", "2000", "--seed", "5"];
        let m = fixture(model);
        args.extend_from_slice(&["--model", &m]);
        args.extend(extra);
        let (code, text) = run_to_file(&args);
        assert_eq!(code, 0, "{check} on {model}: {text}");
        assert!(!parse_csv(&text).unwrap().is_empty());
    }
}

#[test]
fn binary_reports_version_and_checks() {
    let bin = env!("CARGO_BIN_EXE_lweak");
    let out = Command::new(bin).arg("--version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("lweak "));
    let out = Command::new(bin).arg("--list-checks").output().unwrap();
    assert!(out.status.success());
    let names: Vec<String> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.split('\t').next().unwrap().to_string())
        .collect();
    assert_eq!(names, ["cov", "tail", "newman", "quasi", "slln", "clt", "fclt", "emp"]);
    let out = Command::new(bin).args(["bound", "--n", "64", "--x-grid", "0:1:1", "--theta", "1.2", "--c", "1", "--sigma2", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("theta"));
}
