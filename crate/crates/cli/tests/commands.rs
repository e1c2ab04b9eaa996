use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;
use twistmodel::{run, CommandOutcome, EXIT_DATA, EXIT_OK, EXIT_USAGE};
use twistmodel_core::actuator::MotionMode;
use twistmodel_core::mocap::{write_trajectories, write_trials, MarkerSet, TrialSet};
use twistmodel_core::synthetic;

fn twistmodel(args: &[&str]) -> CommandOutcome {
    run(std::iter::once("twistmodel").chain(args.iter().copied()))
}

fn markers_file(dir: &TempDir, name: &str, set: &MarkerSet) -> PathBuf {
    let path = dir.path().join(name);
    write_trajectories(set, std::fs::File::create(&path).unwrap()).unwrap();
    path
}

fn trials_file(dir: &TempDir, name: &str, sets: &[TrialSet]) -> PathBuf {
    let path = dir.path().join(name);
    write_trials(sets, std::fs::File::create(&path).unwrap()).unwrap();
    path
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn predict_twist_default_sweep() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("curve.csv");
    let plot = dir.path().join("curve.svg");
    let o = twistmodel(&["predict-twist", "--out", s(&out), "--plot", s(&plot)]);
    assert_eq!(o.exit_code, EXIT_OK, "{:?}", o.summary);
    assert_eq!(o.artifacts, vec![out.clone(), plot.clone()]);
    let table = rows(&out);
    assert_eq!(table.len(), 13);
    for row in &table {
        let r: f64 = row[1].parse().unwrap();
        assert!(r > 0.0 && r.is_finite());
        assert_eq!(row[3], "false");
    }
    assert!(std::fs::read_to_string(&plot).unwrap().contains("<polyline"));
}

#[test]
fn predict_twist_at_zero_pressure() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("zero.csv");
    let o = twistmodel(&["predict-twist", "--pmin", "0", "--pmax", "0", "--out", s(&out)]);
    assert_eq!(o.exit_code, EXIT_OK);
    let table = rows(&out);
    assert_eq!(table.len(), 1);
    assert_eq!(table[0][3], "true");
}

#[test]
fn missing_config_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("curve.csv");
    let cfg = dir.path().join("absent.ini");
    let o = twistmodel(&["--config", s(&cfg), "predict-twist", "--out", s(&out)]);
    assert_eq!(o.exit_code, EXIT_USAGE);
    assert!(o.artifacts.is_empty());
    assert!(!out.exists());
}

#[test]
fn config_overrides_reach_the_model() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("stiff.ini");
    std::fs::write(&cfg, "[material]\nyoungs_modulus_kpa = 250\n").unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(twistmodel(&["predict-twist", "--pmin", "20", "--pmax", "20", "--out", s(&a)]).exit_code, 0);
    let o = twistmodel(&["--config", s(&cfg), "predict-twist", "--pmin", "20", "--pmax", "20", "--out", s(&b)]);
    assert_eq!(o.exit_code, 0);
    let ra: f64 = rows(&a)[0][1].parse().unwrap();
    let rb: f64 = rows(&b)[0][1].parse().unwrap();
    // curvature scales with P / E
    assert!((rb / ra - 2.0).abs() < 1e-6, "{ra} {rb}");
}

#[test]
fn bad_sweep_arguments_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.csv");
    for args in [["--pmin", "30", "--pmax", "18"], ["--step", "0", "--pmax", "20"], ["--pmin", "-1", "--pmax", "2"]] {
        let mut v = vec!["predict-twist", "--out", s(&out)];
        v.extend(args);
        assert_eq!(twistmodel(&v).exit_code, EXIT_USAGE, "{args:?}");
    }
    assert_eq!(twistmodel(&["predict-twist", "--pmin", "abc"]).exit_code, EXIT_USAGE);
    assert_eq!(twistmodel(&["no-such-command"]).exit_code, EXIT_USAGE);
}

#[test]
fn fit_circle_best_frame() {
    let dir = TempDir::new().unwrap();
    let with_ref = markers_file(&dir, "ref.csv", &synthetic::helix_markers(40.0, 7, true));
    let without = markers_file(&dir, "plain.csv", &synthetic::helix_markers(40.0, 7, false));
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let a = twistmodel(&["fit-circle", s(&with_ref), "--best-frame", "--reference", "ref", "--out", s(&out_a)]);
    let b = twistmodel(&["fit-circle", s(&without), "--best-frame", "--out", s(&out_b)]);
    assert_eq!((a.exit_code, b.exit_code), (EXIT_OK, EXIT_OK));
    let ra: f64 = rows(&out_a)[0][1].parse().unwrap();
    let rb: f64 = rows(&out_b)[0][1].parse().unwrap();
    assert!((ra - 40.0).abs() < 1e-3);
    assert_eq!(ra, rb);
    assert_eq!(rows(&out_a)[0][0], synthetic::HELIX_FULL_FRAME.to_string());
}

#[test]
fn fit_circle_on_occluded_frame() {
    let dir = TempDir::new().unwrap();
    let markers = markers_file(&dir, "m.csv", &synthetic::helix_markers(40.0, 7, false));
    let out = dir.path().join("c.csv");
    let frame = synthetic::HELIX_SPARSE_FRAME.to_string();
    let o = twistmodel(&["fit-circle", s(&markers), "--frame", &frame, "--out", s(&out)]);
    assert_eq!(o.exit_code, EXIT_DATA);
    assert!(o.summary[0].contains("m3"), "{:?}", o.summary);
    assert!(!out.exists());
    // one of --frame / --best-frame is required
    assert_eq!(twistmodel(&["fit-circle", s(&markers)]).exit_code, EXIT_USAGE);
}

#[test]
fn unreadable_and_malformed_inputs() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(twistmodel(&["sweep-volume", s(&missing)]).exit_code, EXIT_USAGE);
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "frame,time_s,marker_id,x_mm,y_mm,z_mm\n0,0,a,1,2,oops\n").unwrap();
    let o = twistmodel(&["sweep-volume", s(&bad), "--out", s(&dir.path().join("v.csv"))]);
    assert_eq!(o.exit_code, EXIT_DATA);
    assert!(o.summary[0].contains("line 2"), "{:?}", o.summary);
}

#[test]
fn sweep_volume_fixtures() {
    let dir = TempDir::new().unwrap();
    let cube = markers_file(&dir, "cube.csv", &synthetic::cube_markers(10.0));
    let out = dir.path().join("cube_v.csv");
    assert_eq!(twistmodel(&["sweep-volume", s(&cube), "--out", s(&out)]).exit_code, EXIT_OK);
    let v: f64 = rows(&out)[0][1].parse().unwrap();
    assert!((v - 1000.0).abs() < 1e-9);

    let bend = markers_file(&dir, "bend.csv", &synthetic::bending_sweep(synthetic::BENDING_HALF_WIDTH_MM));
    let out = dir.path().join("bend_v.csv");
    let plot = dir.path().join("bend.svg");
    let o = twistmodel(&["sweep-volume", s(&bend), "--out", s(&out), "--plot", s(&plot)]);
    assert_eq!(o.exit_code, EXIT_OK);
    let table = rows(&out);
    assert_eq!(table.len(), 2);
    assert_eq!(table[1][0], "bending");
    let v: f64 = table[0][1].parse().unwrap();
    assert!((v / 10_035.0 - 1.0).abs() < 0.01);
    assert!(plot.exists());
}

#[test]
fn sweep_volume_of_empty_data() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "frame,time_s,marker_id,x_mm,y_mm,z_mm\n").unwrap();
    let out = dir.path().join("v.csv");
    assert_eq!(twistmodel(&["sweep-volume", s(&empty), "--out", s(&out)]).exit_code, EXIT_DATA);
}

#[test]
fn repeatability_outputs() {
    let dir = TempDir::new().unwrap();
    let same = trials_file(
        &dir,
        "same.csv",
        &[TrialSet { mode: MotionMode::Bending, endpoints: vec![[10.0, 20.0, 30.0]; 30] }],
    );
    let out = dir.path().join("r.csv");
    assert_eq!(twistmodel(&["repeatability", s(&same), "--out", s(&out)]).exit_code, EXIT_OK);
    let table = rows(&out);
    assert_eq!(table[0], vec!["bending", "30", "0"]);
    assert_eq!(table[1], vec!["overall", "30", "0"]);

    let one = trials_file(&dir, "one.csv", &[TrialSet { mode: MotionMode::Twisting, endpoints: vec![[0.0; 3]] }]);
    assert_eq!(twistmodel(&["repeatability", s(&one), "--out", s(&out)]).exit_code, EXIT_DATA);

    let no_mode = dir.path().join("nomode.csv");
    std::fs::write(&no_mode, "trial,x_mm,y_mm,z_mm\n1,0,0,0\n").unwrap();
    assert_eq!(twistmodel(&["repeatability", s(&no_mode), "--out", s(&out)]).exit_code, EXIT_DATA);
}

#[test]
fn mode_table() {
    let o = twistmodel(&["mode", "--humofit1", "5", "--humofit2", "5"]);
    assert_eq!((o.exit_code, o.summary[0].as_str()), (EXIT_OK, "bending"));
    let o = twistmodel(&["mode", "--humofit1", "45", "--humofit2", "5"]);
    assert_eq!((o.exit_code, o.summary[0].as_str()), (EXIT_OK, "twisting"));
    let o = twistmodel(&["mode", "--humofit1", "-3", "--humofit2", "40"]);
    assert_eq!((o.exit_code, o.summary[0].as_str()), (EXIT_OK, "extension"));
    assert_eq!(twistmodel(&["mode", "--humofit1", "45", "--humofit2", "45"]).exit_code, EXIT_DATA);
    assert_eq!(twistmodel(&["mode", "--humofit1", "hot", "--humofit2", "45"]).exit_code, EXIT_USAGE);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_twistmodel");
    let dir = TempDir::new().unwrap();
    let code = |args: &[&str]| Command::new(bin).args(args).current_dir(dir.path()).output().unwrap();
    let ok = code(&["mode", "--humofit1", "5", "--humofit2", "45"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "extension");
    assert_eq!(code(&["mode", "--humofit1", "20", "--humofit2", "5"]).status.code(), Some(2));
    assert_eq!(code(&["--config", "nope.ini", "predict-twist"]).status.code(), Some(1));
    assert_eq!(code(&["--help"]).status.code(), Some(0));
    // zero setup: no actuator.ini in the working directory
    assert_eq!(code(&["predict-twist"]).status.code(), Some(0));
    assert!(dir.path().join("twist_curve.csv").exists());
}
