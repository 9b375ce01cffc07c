use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn qhydro(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhydro")).env("QHYDRO_OUT", out).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_snapshots_and_meta() {
    let out = tempfile::tempdir().unwrap();
    let cfg = configs().join("free_gaussian.cfg");
    let o = qhydro(out.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dir = out.path().join("free_gaussian");
    assert!(dir.join("meta").exists());
    let snaps = fs::read_dir(&dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("density_t"))
        .count();
    assert!(snaps >= 2);
}

#[test]
fn compare_run_reports_error_history() {
    let out = tempfile::tempdir().unwrap();
    let cfg = configs().join("coherent.cfg");
    let o = qhydro(out.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.path().join("coherent/error_vs_time.csv").exists());
}

#[test]
fn invalid_parameter_exits_with_two_and_names_it() {
    let out = tempfile::tempdir().unwrap();
    let cfg = write_config(out.path(), "bad.cfg", "[grid]\nn = 64\nlength = 10\n[physics]\nkT = -1\n[scenario]\nname = madelung\n");
    let o = qhydro(out.path(), &["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("physics.kT"), "{}", stderr(&o));
}

#[test]
fn unknown_scenario_exits_with_two() {
    let out = tempfile::tempdir().unwrap();
    let cfg = write_config(out.path(), "odd.cfg", "[grid]\nn = 64\nlength = 10\n[scenario]\nname = teleport\n");
    let o = qhydro(out.path(), &["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("teleport"));
}

#[test]
fn missing_config_file_exits_with_two() {
    let out = tempfile::tempdir().unwrap();
    let o = qhydro(out.path(), &["run", out.path().join("absent.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blow_up_exits_with_three_and_leaves_diagnostics() {
    let out = tempfile::tempdir().unwrap();
    let cfg = write_config(
        out.path(),
        "blowup.cfg",
        "[grid]\nn = 64\nlength = 10\n[scenario]\nname = madelung\ninitial = gaussian\nsigma = 1\nscheme = spectral\ndt = 0.5\nt_end = 20\n",
    );
    let o = qhydro(out.path(), &["run", &cfg]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(out.path().join("blowup/diagnostics").exists());
}

#[test]
fn verify_identities_prints_a_passing_table() {
    let out = tempfile::tempdir().unwrap();
    let o = qhydro(out.path(), &["verify", "identities"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("log form vs sqrt form"));
    assert!(!table.contains("FAIL"));
    assert!(out.path().join("verify-identities.csv").exists());
}

#[test]
fn verify_rejects_an_unknown_suite() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(qhydro(out.path(), &["verify", "everything"]).status.code(), Some(2));
}

#[test]
fn sweep_fits_a_slope_and_rejects_text_keys() {
    let out = tempfile::tempdir().unwrap();
    let cfg = configs().join("pulse.cfg");
    let cfg = cfg.to_str().unwrap();
    let o = qhydro(out.path(), &["sweep", cfg, "--param", "scenario.dt", "--values", "0.02,0.01,0.005"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("log-log slope"));
    assert!(out.path().join("pulse-sweep-scenario-dt/sweep.csv").exists());

    let o = qhydro(out.path(), &["sweep", cfg, "--param", "scenario.scheme", "--values", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qhydro(out.path(), &["sweep", cfg, "--param", "scenario.dt", "--values", "fast,slow"]);
    assert_eq!(o.status.code(), Some(2));
}
