use std::path::Path;
use std::process::{Command, Output};

fn cogmac(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cogmac"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn estimate_sweep_writes_annotated_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "e.toml",
        "kind = \"estimation-sweep\"\n[estimation]\nq_from = 0.1\nq_to = 0.3\nq_step = 0.1\n",
    );
    let out = cogmac(&["estimate-sweep", "--config", &cfg, "--reps", "20", "--seed", "4"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("estimation_sweep.csv")).unwrap();
    assert!(csv.starts_with("# experiment: estimation-sweep\n"));
    assert!(csv.contains("#   seed = 4"));
    assert!(csv.contains("#   reps = 20"));
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "q,protocol,mean_slots,std_err,ci95_half_width,reps,source");
    assert_eq!(data.len(), 1 + 3 * 3);
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[mac.protocol]\nchanels = 3\n");
    let out = cogmac(&["mac-sim", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mac.protocol.chanels"), "{err}");
}

#[test]
fn wrong_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k.toml", "kind = \"mac-sim\"\n");
    let out = cogmac(&["estimate-sweep", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mac_sim_runs_both_modes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "m.toml",
        "[mac]\nlambdas = [0.2]\nframes = 200\nwarmup = 20\nbatches = 10\n",
    );
    let out = cogmac(&["mac-sim", "--config", &cfg, "--jobs", "1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("mac_sim.csv")).unwrap();
    let rows = csv.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 2 * 3);
}

#[test]
fn validate_exit_code_follows_the_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.toml",
        "[validate]\nequivalence_runs = 50\nslot_mc_runs = 200\nframe_model = false\n",
    );
    let out = cogmac(&["validate", "--config", &cfg], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let failed = stdout.lines().any(|l| l.starts_with("FAIL"));
    assert!(stdout.lines().all(|l| l.starts_with("PASS") || l.starts_with("FAIL")), "{stdout}");
    assert_eq!(out.status.code(), Some(if failed { 1 } else { 0 }), "{stdout}");
    assert!(dir.path().join("validate.csv").exists());
}
