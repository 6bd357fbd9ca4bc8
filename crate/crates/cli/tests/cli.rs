use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dampwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dampwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    dampwave(args).status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn accretivity_writes_margins() {
    let dir = tempfile::tempdir().unwrap();
    let out = dampwave(&[
        "verify",
        "accretivity",
        "--lambda",
        "1",
        "--samples",
        "1000",
        "--seed",
        "7",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("margins.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("check,verdict,margin"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.contains(",pass,")));
    assert_eq!(code(&["report", path(dir.path())]), 0);
}

fn negative_control_flips(suite: &str) {
    assert_eq!(code(&["verify", suite]), 0, "{suite} should pass");
    assert_eq!(
        code(&["verify", suite, "--negative-control"]),
        1,
        "{suite} control should fail"
    );
}

#[test]
fn accretivity_control() {
    negative_control_flips("accretivity");
}

#[test]
fn energy_control() {
    negative_control_flips("energy");
}

#[test]
fn decay_control() {
    negative_control_flips("decay");
}

#[test]
fn absorbing_control() {
    negative_control_flips("absorbing");
}

#[test]
fn tail_control() {
    negative_control_flips("tail");
}

#[test]
fn gronwall_control() {
    negative_control_flips("gronwall");
}

#[test]
fn poincare_control() {
    negative_control_flips("poincare");
}

#[test]
fn nonlinearity_control() {
    negative_control_flips("nonlinearity");
}

#[test]
fn corrupted_delta_fails_decay() {
    assert_eq!(code(&["verify", "decay", "--corrupt-delta", "1.1"]), 1);
}

#[test]
fn attractor_control() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&["attractor", "--out", path(dir.path())]), 0);
    assert!(dir.path().join("member_00000.dwaf").exists());
    assert_eq!(code(&["attractor", "--negative-control"]), 1);
}

#[test]
fn zero_horizon_gives_one_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# zero horizon\nt_end = 0\nnx = 99\n").unwrap();
    let out = dir.path().join("out");
    assert_eq!(code(&["simulate", "--config", path(&cfg), "--out", path(&out)]), 0);
    let csv = fs::read_to_string(out.join("timeseries.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("t,E,X2,flux,u_l2,grad_l2,v_l2\n"));
}

#[test]
fn persisted_config_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let args = [
        "simulate",
        "--set",
        "nx=199",
        "--set",
        "t_end=3",
        "--set",
        "initial=smooth",
        "--set",
        "nonlinearity=saturating_cubic",
        "--set",
        "forcing=bump",
        "--set",
        "tail_radii=5, 10",
        "--set",
        "snapshot_stride=5",
        "--seed",
        "11",
        "--out",
        path(&first),
    ];
    assert_eq!(code(&args), 0);
    let second = dir.path().join("second");
    let cfg = first.join("run.cfg");
    let status = Command::new(env!("CARGO_BIN_EXE_dampwave"))
        .args(["simulate", "--config", path(&cfg), "--out", path(&second)])
        .env("RAYON_NUM_THREADS", "1")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let mut files: Vec<_> = fs::read_dir(&first).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert!(files.len() > 3);
    for name in files.iter().filter(|n| *n != "run.cfg") {
        assert_eq!(
            fs::read(first.join(name)).unwrap(),
            fs::read(second.join(name)).unwrap(),
            "{name:?} differs"
        );
    }
    assert_eq!(code(&["report", path(&first.join("timeseries.csv"))]), 0);
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(code(&["verify", "nope"]), 2);
    assert_eq!(code(&["verify", "tail", "--bogus"]), 2);
    assert_eq!(code(&["verify", "decay", "--corrupt-delta", "-1"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["simulate", "--config", "/nonexistent/run.cfg"]), 2);
    assert_eq!(code(&["simulate", "--set", "warp=9"]), 2);
    assert_eq!(
        code(&["simulate", "--set", "y=0, 1", "--set", "ny=0", "--set", "t_end=0"]),
        2
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("reports.jsonl");
    fs::write(&bad, "{not json}\n").unwrap();
    assert_eq!(code(&["report", path(&bad)]), 2);
}
