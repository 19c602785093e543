//! End-to-end tests of the CLI binary: flag validation, exit codes, exact
//! values on stdout, file outputs, manifests, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wishart-smin-cli"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn density_emits_exact_closed_form() {
    let doc = stdout_json(&run(&["density", "--n", "2", "--m", "3"]));
    assert_eq!(doc["n"], 2);
    assert_eq!(doc["m"], 3);
    assert_eq!(doc["kind"], "regular");
    let coeffs = doc["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 2);
    assert_eq!((coeffs[0]["j"].as_u64(), coeffs[0]["num"].as_str()), (Some(2), Some("3")));
    assert_eq!((coeffs[1]["j"].as_u64(), coeffs[1]["num"].as_str()), (Some(3), Some("1")));
    assert!(coeffs.iter().all(|c| c["den"] == "1"));
}

#[test]
fn density_square_case_is_a_single_coefficient() {
    let doc = stdout_json(&run(&["density", "--n", "5", "--m", "5"]));
    let coeffs = doc["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 1);
    assert_eq!(coeffs[0]["j"], 1);
    assert_eq!(coeffs[0]["num"], "5");
}

#[test]
fn density_exact_at_reports_polynomial_and_symbolic_factor() {
    let doc = stdout_json(&run(&["density", "--n", "2", "--m", "3", "--exact-at", "7/2"]));
    // density = x(3+x)e^{−2x}: polynomial part at 7/2 is (7/2)(13/2) = 91/4.
    assert_eq!(doc["exact"]["x"], "7/2");
    assert_eq!(doc["exact"]["polynomial_value"], "91/4");
    assert_eq!(doc["exact"]["exponential_factor"], "exp(-7)");
}

#[test]
fn ft_density_exact_at_is_fully_rational() {
    let doc = stdout_json(&run(&["ft-density", "--n", "2", "--m", "3", "--exact-at", "1/4"]));
    // f_F(x) = 60x(1−x)(1−2x)²: at 1/4 this is 60·(1/4)·(3/4)·(1/4) = 45/16.
    assert_eq!(doc["exact"]["x"], "1/4");
    assert_eq!(doc["exact"]["value"], "45/16");
    // Outside the support [0, 1/n] the density is exactly zero.
    let doc = stdout_json(&run(&["ft-density", "--n", "2", "--m", "3", "--exact-at", "3/4"]));
    assert_eq!(doc["exact"]["value"], "0");
}

#[test]
fn invalid_dimensions_exit_2() {
    let out = run(&["density", "--n", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m must be ≥ n"));
}

#[test]
fn unknown_flags_exit_2() {
    let out = run(&["density", "--n", "2", "--m", "3", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn grid_without_out_exit_2() {
    let out = run(&["density", "--n", "2", "--m", "3", "--grid", "0:1:5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["density", "--n", "2", "--m", "3", "--grid", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn moments_print_exact_rationals() {
    let out = run(&["moments", "--n", "3", "--m", "11", "--eta", "1", "--fixed-trace"]);
    assert!(out.status.success());
    let printed = String::from_utf8_lossy(&out.stdout);
    let printed = printed.trim();
    assert!(printed.contains('/'), "expected a rational, got '{printed}'");
    // Cross-check against the library's exact moment.
    let params = wishart_smin::EnsembleParams::new(3, 11).unwrap();
    let order = wishart_smin::MomentOrder::new(1.0).unwrap();
    let expect = wishart_smin::fixed_trace::ft_moment(params, order).unwrap();
    assert_eq!(printed, expect.as_exact().unwrap().0.to_string());
}

#[test]
fn density_grid_matches_library_and_manifest_records_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("grid.csv");
    let out = run(&[
        "density", "--n", "2", "--m", "3",
        "--grid", "0:2:5",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,density"));
    assert_eq!(lines.clone().count(), 5);
    // Spot-check the midpoint value against the closed form x(3+x)e^{−2x}.
    let row: Vec<&str> = lines.nth(2).unwrap().split(',').collect();
    let x: f64 = row[0].parse().unwrap();
    let y: f64 = row[1].parse().unwrap();
    assert_eq!(x, 1.0);
    assert!((y - (x * (3.0 + x) * (-2.0 * x).exp())).abs() < 1e-15);

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(manifest_path(&out_path)).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "density");
    assert_eq!(manifest["flags"]["grid"], "0:2:5");
    assert_eq!(manifest["tool"]["name"], "wishart-smin-cli");
    assert!(manifest["wall_time_ms"].is_u64());
}

fn manifest_path(out: &Path) -> std::path::PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".manifest.json");
    os.into()
}

#[test]
fn mc_runs_are_byte_identical_and_manifest_reports_fit() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for path in [&first, &second] {
        let out = run(&[
            "mc", "--n", "4", "--m", "6",
            "--count", "200", "--seed", "7",
            "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b, "same flags must produce byte-identical samples");

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(manifest_path(&first)).unwrap(),
    )
    .unwrap();
    let ks = manifest["ks_statistic"].as_f64().unwrap();
    assert!(ks > 0.0 && ks < 0.2, "ks={ks} out of plausible range");

    // The file round-trips through the library parser.
    let set = wishart_smin::montecarlo::SampleSet::read_csv(&first).unwrap();
    assert_eq!(set.values.len(), 200);
    assert!(!set.fixed_trace);
}

#[test]
fn tw_emits_four_aligned_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("tw.csv");
    let out = run(&[
        "tw", "--n", "6", "--m", "12",
        "--grid", "-4:2:7",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("s,tracy_widom,rescaled_regular,rescaled_fixed_trace")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0][0], -4.0);
    assert_eq!(rows[6][0], 2.0);
    // Densities are finite and non-negative on the grid.
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
    assert!(rows.iter().all(|r| r[1] >= 0.0 && r[2] >= 0.0 && r[3] >= 0.0));
}

#[test]
fn marginal_writes_expected_density() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("mp.csv");
    let out = run(&[
        "marginal", "--n", "4", "--m", "8",
        "--kind", "mp",
        "--grid", "0:1:5",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let params = wishart_smin::EnsembleParams::new(4, 8).unwrap();
    for (i, &v) in values.iter().enumerate() {
        let mu = i as f64 * 0.25;
        let expect = wishart_smin::marginal::marginal_mp(params, mu);
        assert!((v - expect).abs() < 1e-15, "μ={mu}: {v} vs {expect}");
    }
}

#[test]
fn marginal_json_format_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("mp.json");
    let out = run(&[
        "marginal", "--n", "4", "--m", "8",
        "--kind", "mp",
        "--grid", "0:1:5",
        "--format", "json",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["xs"].as_array().unwrap().len(), 5);
    assert_eq!(doc["ys"].as_array().unwrap().len(), 5);
    assert_eq!(doc["metadata"]["kind"], "marginal-mp");
}

#[test]
fn kicked_writes_spectra_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("spectra.csv");
    let out = run(&[
        "kicked", "--j1", "1", "--j2", "1.5",
        "--k1", "7", "--k2", "8", "--eps", "1",
        "--skip", "2", "--stride", "3", "--count", "4",
        "--seedless",
        "--out", out_path.to_str().unwrap(),
    ]);
    let summary = stdout_json(&out);
    assert_eq!(summary["n1"], 3);
    assert_eq!(summary["n2"], 4);
    assert_eq!(summary["count"], 4);
    assert!(summary["ks_smallest_vs_ft"].as_f64().unwrap() <= 1.0);
    assert!(summary["max_cluster_z"].as_f64().unwrap().is_finite());

    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# n1: 3");
    assert_eq!(lines[1], "# n2: 4");
    assert_eq!(lines[2], "mu_1,mu_2,mu_3");
    assert_eq!(lines.len(), 3 + 4);
    for row in &lines[3..] {
        let mu: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(mu.len(), 3);
        let sum: f64 = mu.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12, "spectrum must sum to 1");
        assert!(mu.windows(2).all(|w| w[0] >= w[1]), "descending order");
    }

    // Determinism: the same flags reproduce the same bytes.
    let second = dir.path().join("again.csv");
    let out2 = run(&[
        "kicked", "--j1", "1", "--j2", "1.5",
        "--k1", "7", "--k2", "8", "--eps", "1",
        "--skip", "2", "--stride", "3", "--count", "4",
        "--seedless",
        "--out", second.to_str().unwrap(),
    ]);
    assert!(out2.status.success());
    assert_eq!(
        std::fs::read(&out_path).unwrap(),
        std::fs::read(&second).unwrap()
    );
}

#[test]
fn kicked_rejects_bad_spins_and_angles() {
    let out = run(&[
        "kicked", "--j1", "0.7", "--j2", "1", "--k1", "1", "--k2", "1",
        "--eps", "0", "--out", "/tmp/unused.csv",
    ]);
    assert_eq!(out.status.code(), Some(2), "0.7 is not a half-integer");
    let out = run(&[
        "kicked", "--j1", "1", "--j2", "0.5", "--k1", "1", "--k2", "1",
        "--eps", "0", "--out", "/tmp/unused.csv",
    ]);
    assert_eq!(out.status.code(), Some(2), "j1 > j2 violates n ≤ m");
    let out = run(&[
        "kicked", "--j1", "0.5", "--j2", "0.5", "--k1", "1", "--k2", "1",
        "--eps", "0", "--theta1", "4.0", "--out", "/tmp/unused.csv",
    ]);
    assert_eq!(out.status.code(), Some(2), "θ outside [0, π]");
}
