use std::path::Path;
use std::process::{Command, Output};

use mimo_bounds::operators::OperatorBundle;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mimo-bounds")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn assemble_plate(dir: &Path, extra: &[&str]) {
    let out = dir.to_str().unwrap();
    let mut args = vec!["--reproducible", "assemble", "--ka", "0.5", "--grid", "10x10", "--out", out];
    args.extend_from_slice(extra);
    ok(&args);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn bound_worked_example() {
    let text = ok(&["bound", "--rho", "100,10,1", "--gamma", "10", "--eta", "0.5"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let c = v["C_star"].as_f64().unwrap();
    assert!((c - 6.3464).abs() < 1e-3, "{c}");
    assert_eq!(v["modes_used"], 3);
    assert_eq!(v["normalization"], "radiated");
    assert!(v["provenance"].as_str().unwrap().starts_with("mimo-bounds "));
}

#[test]
fn reproducible_output_is_byte_identical() {
    let args = ["--reproducible", "bound", "--rho", "50,5,0.5", "--gamma", "3", "--eta", "0.2"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    assert!(!a.contains("time:"));
    assert!(ok(&args[1..]).contains("time:"));
}

#[test]
fn bundle_and_explicit_spectrum_agree() {
    let dir = tempfile::tempdir().unwrap();
    let ops = dir.path().join("ops");
    assemble_plate(&ops, &[]);
    assert!(ops.join("provenance.txt").is_file());
    let table = ok(&["modes", "--ops", ops.to_str().unwrap(), "--count", "100"]);
    let rho: Vec<String> = csv_rows(&table).into_iter().map(|r| r[1].clone()).collect();
    let from_ops: Value =
        serde_json::from_str(&ok(&["bound", "--ops", ops.to_str().unwrap(), "--gamma", "10", "--eta", "0.3"])).unwrap();
    let from_rho: Value =
        serde_json::from_str(&ok(&["bound", "--rho", &rho.join(","), "--gamma", "10", "--eta", "0.3"])).unwrap();
    let (a, b) = (from_ops["C_star"].as_f64().unwrap(), from_rho["C_star"].as_f64().unwrap());
    assert!((a - b).abs() <= 1e-9 * a.abs(), "{a} vs {b}");
}

#[test]
fn modes_table_is_normalized_by_the_strongest_mode() {
    let dir = tempfile::tempdir().unwrap();
    let ops = dir.path().join("ops");
    assemble_plate(&ops, &[]);
    let csv = dir.path().join("modes.csv");
    ok(&["modes", "--ops", ops.to_str().unwrap(), "--count", "4", "--characteristic", "--out", csv.to_str().unwrap()]);
    let rows = csv_rows(&std::fs::read_to_string(csv).unwrap());
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 1.0);
    assert!(rows.iter().filter(|r| r[3] == "characteristic").all(|r| r[2].parse::<f64>().unwrap() <= 1.0 + 1e-9));
}

#[test]
fn sweep_writes_one_row_per_value() {
    let text = ok(&["--reproducible", "sweep", "--rho", "100,10,1", "--eta", "0.01:0.99:50", "--gamma", "10"]);
    assert!(text.starts_with("# mimo-bounds "));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 50);
    let c: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(c.windows(2).all(|w| w[1] <= w[0] + 1e-9), "radiated bound grows with efficiency loss");
    assert_eq!(code(&["sweep", "--rho", "1", "--eta", "0.1:0.9:3", "--gamma", "1:2:3"]), 1);
    assert_eq!(code(&["sweep", "--rho", "1", "--eta", "0.1", "--gamma", "1"]), 1);
}

#[test]
fn count_on_a_sphere() {
    let text = ok(&["count", "--shape", "sphere", "--ka", "1", "--eta", "0.5"]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let normalizer: f64 = rows[0][4].parse().unwrap();
    assert!((normalizer - 2.0).abs() < 0.02, "{normalizer}");
    let count: usize = rows[0][2].parse().unwrap();
    assert!(count > 0);
}

#[test]
fn subregion_reports_conditioning_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let ops = dir.path().join("ops");
    let export = dir.path().join("reduced");
    assemble_plate(&ops, &[]);
    let text = ok(&[
        "subregion",
        "--ops",
        ops.to_str().unwrap(),
        "--case",
        "A",
        "--count",
        "2",
        "--export",
        export.to_str().unwrap(),
    ]);
    assert!(text.contains("zgg_condition="));
    let rows = csv_rows(&text);
    assert!(!rows.is_empty() && rows.len() <= 2);
    assert!(rows[0][2].parse::<f64>().unwrap() < 1.0);
    for f in ["Z_t.cmx", "Psi_p.cmx", "S_p.cmx", "R_omega_p.cmx", "subregion.json", "provenance.txt"] {
        assert!(export.join(f).is_file(), "{f}");
    }
}

#[test]
fn region_file_drives_the_partition() {
    let dir = tempfile::tempdir().unwrap();
    let ops = dir.path().join("ops");
    assemble_plate(&ops, &[]);
    let regions = dir.path().join("r.txt");
    std::fs::write(&regions, "# left edge\n-0.5 -0.25 -0.3 0.25\n").unwrap();
    let text = ok(&["subregion", "--ops", ops.to_str().unwrap(), "--regions", regions.to_str().unwrap()]);
    assert!(text.contains("labels=[1]"));
}

#[test]
fn geom_writes_mesh_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("disc.rmesh");
    ok(&["geom", "--shape", "disc", "--max-edge", "0.4", "--out", mesh.to_str().unwrap()]);
    assert!(mesh.is_file());
    let prov = std::fs::read_to_string(dir.path().join("disc.rmesh.provenance")).unwrap();
    assert!(prov.starts_with("# mimo-bounds "));
    let ops = dir.path().join("ops");
    ok(&["assemble", "--mesh", mesh.to_str().unwrap(), "--ka", "0.3", "--out", ops.to_str().unwrap()]);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["bogus"]), 1);
    assert_eq!(code(&["bound", "--rho", "1", "--gamma", "1"]), 1);
    assert_eq!(code(&["bound", "--rho", "1", "--gamma", "1", "--eta", "1.5"]), 1);
    assert_eq!(code(&["modes", "--ops", "/nonexistent/bundle"]), 1);
    let out = Command::new(env!("CARGO_BIN_EXE_mimo-bounds"))
        .args(["bound", "--rho", "1", "--gamma", "1", "--eta", "0.5"])
        .env("MIMO_BOUNDS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn indefinite_loss_matrix_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let ops = dir.path().join("ops");
    assemble_plate(&ops, &[]);
    let mut bundle = OperatorBundle::load(&ops).unwrap();
    bundle.r_omega = -bundle.r_omega.clone();
    bundle.save(&ops).unwrap();
    assert_eq!(code(&["modes", "--ops", ops.to_str().unwrap()]), 2);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let ops = dir.path().join("ops");
    assemble_plate(&ops, &[]);
    let go = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_mimo-bounds"))
            .args(["--reproducible", "modes", "--ops", ops.to_str().unwrap(), "--count", "5"])
            .env("MIMO_BOUNDS_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(go("1"), go("4"));
}
