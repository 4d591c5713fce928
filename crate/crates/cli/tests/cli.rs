use std::path::Path;
use std::process::{Command, Output};

fn zk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zk"))
        .args(args)
        .current_dir(dir)
        .env("ZK_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, initial: &str) -> String {
    let text = format!(
        r#"
seed = 3

[domain]
d = 1
nx = 32
nt1 = 16
transverse_bc = "dirichlet"

[params]
epsilon = 1e-2
c = 1.0
dt = 1e-3
t_final = 0.02

[initial]
{initial}

[diagnostics]
cadence = 5
snapshot_every = 1
"#
    );
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn zero_initial_condition_gives_zero_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "kind = \"zero\"");
    let out = zk(&["run", "--config", &cfg, "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("res/diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("step,t,l2,"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[2..].iter().all(|&v| v == 0.0), "{row}");
    }
    assert!(dir.path().join("res/final.zks").exists());
    assert!(dir.path().join("res/snap_00000020.zks").exists());
}

#[test]
fn run_twice_produces_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "kind = \"random\"\nl2 = 0.1");
    let mut files = Vec::new();
    for out_dir in ["a", "b", "a"] {
        let out = zk(&["run", "--config", &cfg, "--out", out_dir], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        files.push((
            std::fs::read(dir.path().join(out_dir).join("diagnostics.csv")).unwrap(),
            std::fs::read(dir.path().join(out_dir).join("final.zks")).unwrap(),
        ));
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
}

#[test]
fn verify_passes_with_seed_and_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = zk(&["verify", "--seed", "7", "--samples", "1000", "--out", "rep"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("verify: PASS"));
    assert!(stdout.contains("1000 random fields"));
    assert!(dir.path().join("rep/verify.txt").exists());
}

#[test]
fn sweep_with_four_epsilons() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "kind = \"modal\"\nmodes = [{ k = 1, n = 1, amplitude = 0.1 }]");
    let out = zk(&["sweep", "--config", &cfg, "--eps", "1e-2:4", "--out", "sw"], dir.path());
    assert!(out.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sw/sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    let eps: Vec<f64> = rows.iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(eps, vec![1e-2, 5e-3, 2.5e-3, 1.25e-3]);
}

#[test]
fn poincare_reports_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "kind = \"zero\"");
    let out = zk(&["poincare", "--config", &cfg, "--samples", "100"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("poincare-x") && stdout.contains("100 x-mean-free fields"));
}

#[test]
fn errors_are_single_machine_readable_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "kind = \"zero\"");
    let bad = std::fs::read_to_string(&cfg).unwrap().replace("epsilon = 1e-2", "epsilon = -1.0");
    std::fs::write(&cfg, bad).unwrap();
    let out = zk(&["run", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.starts_with("error kind=validation message="), "{stderr}");
    assert!(stderr.contains("epsilon must be ≥ 0"));

    let out = zk(&["poincare", "--samples", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let out = zk(&["sweep", "--eps", "oops"], dir.path());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error kind=argument"), "{stderr}");

    let out = Command::new(env!("CARGO_BIN_EXE_zk"))
        .args(["run", "--config", &cfg])
        .env("ZK_THREADS", "0")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("ZK_THREADS"));
}
