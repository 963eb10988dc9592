use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_floquet-synth"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().args(args).arg("--out").arg(dir).output().expect("binary runs")
}

fn clause_file() -> String {
    format!("{}/data/toy3sat.txt", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn basis_lists_the_sector() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["basis", "--L", "3", "--M", "2", "--U", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("basis.csv")).unwrap();
    assert!(text.starts_with("# units:"));
    assert!(text.contains("# config: {"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "index,occ_1,occ_2,occ_3");
    assert_eq!(rows[1], "0,2,0,0");
    assert_eq!(rows.len(), 1 + 6);
}

#[test]
fn optimize_star_reaches_high_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "optimize", "--target", "star", "--L", "5", "--hub", "3", "--M", "1", "--N", "8", "--T", "8", "--drive", "g",
        "--gmax", "5", "--restarts", "2", "--seed", "3",
    ];
    let out = run(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["report"]["best_fidelity"].as_f64().unwrap() > 0.99);
    assert_eq!(report["config"]["hub"], 3);
    assert_eq!(report["config"]["objective"], "abs-trace");
    for f in ["controls.csv", "effective_re.csv", "effective_im.csv", "effective.json", "effective_aligned.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }

    // replaying the controls reproduces the synthesized fidelity
    let controls = dir.path().join("controls.csv");
    let replay = tempfile::tempdir().unwrap();
    let out = run(
        replay.path(),
        &["evolve", "--target", "star", "--L", "5", "--hub", "3", "--T", "8", "--periods", "5", "--controls", controls.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let floquet: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(replay.path().join("floquet.json")).unwrap()).unwrap();
    let f = floquet["fidelity_to_target"].as_f64().unwrap();
    assert!((f - report["report"]["best_fidelity"].as_f64().unwrap()).abs() < 1e-12);
    let evolution = std::fs::read_to_string(replay.path().join("evolution.csv")).unwrap();
    assert_eq!(evolution.lines().filter(|l| !l.starts_with('#')).count(), 1 + 6);
}

#[test]
fn identical_runs_write_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["optimize", "--target", "ring", "--L", "4", "--N", "4", "--T", "4", "--restarts", "3", "--max-iter", "30"];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    for f in ["controls.csv", "report.json", "effective.json", "effective_re.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"target": "chain", "L": 4, "M": 2, "K": 0.5}"#).unwrap();
    let out = bin()
        .args(["target", "--config", cfg.to_str().unwrap(), "--K", "2.0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("target.json")).unwrap()).unwrap();
    assert_eq!(json["dim"], 6);
    assert_eq!(json["config"]["K"], 2.0);
    // |1100> and |1010> are coupled by the (2,3) bond at strength K
    assert_eq!(json["entries"][0][1][0].as_f64().unwrap(), 2.0);
}

#[test]
fn output_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["basis", "--L", "4", "--M", "1"])
        .env("FLOQUET_SYNTH_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("basis.csv").exists());
}

#[test]
fn clause_target_and_lih_target() {
    let dir = tempfile::tempdir().unwrap();
    let file = clause_file();
    let out = run(dir.path(), &["target", "--target", "clauses", "--clauses", &file, "--omega", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("target.json")).unwrap()).unwrap();
    assert_eq!(json["dim"], 8);
    assert_eq!(json["config"]["L"], 8);

    let out = run(dir.path(), &["target", "--target", "lih"]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("target.json")).unwrap()).unwrap();
    assert_eq!(json["dim"], 16);
    assert_eq!(json["entries"][0][1][0].as_f64().unwrap(), -0.33392);
}

#[test]
fn short_adiabatic_run_decodes() {
    let dir = tempfile::tempdir().unwrap();
    let file = clause_file();
    let out = run(dir.path(), &["adiabatic", "--clauses", &file, "--cycles", "40", "--T", "6.38", "--N", "11"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("adiabatic.json")).unwrap()).unwrap();
    assert_eq!(json["decoded"], serde_json::json!([0, 0, 1]));
    let traj = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().filter(|l| !l.starts_with('#')).count(), 1 + 41);
}

#[test]
fn sweeps_write_rows_and_fits() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["sweep", "--mode", "grid", "--target", "star", "--L", "4", "--T-grid", "2,4", "--N-grid", "2,4", "--restarts", "2", "--workers", "2"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "T,N,best_fidelity");
    assert_eq!(rows.len(), 5);

    let out = run(
        dir.path(),
        &["sweep", "--mode", "tmin", "--target", "star", "--tau", "1.0", "--threshold", "0.99", "--L", "3..5", "--restarts", "3"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["points"].as_array().unwrap().len(), 3);
    assert!(json["slope"].as_f64().is_some());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // missing target
    assert_eq!(run(dir.path(), &["optimize", "--L", "4"]).status.code(), Some(1));
    // empty hardcore sector
    assert_eq!(run(dir.path(), &["basis", "--L", "2", "--M", "3"]).status.code(), Some(1));
    // unknown flag
    assert_eq!(run(dir.path(), &["basis", "--bogus"]).status.code(), Some(1));
    // bad range
    assert_eq!(run(dir.path(), &["basis", "--L", "9..3"]).status.code(), Some(1));
    // a floor no synthesis can meet
    let file = clause_file();
    let out = run(
        dir.path(),
        &["adiabatic", "--clauses", &file, "--cycles", "3", "--N", "1", "--restarts", "1", "--fidelity-floor", "0.9999999"],
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("trajectory.csv").exists());
    assert!(bin().arg("--help").output().unwrap().status.success());
}
