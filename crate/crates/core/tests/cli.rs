use std::fs;
use std::process::Command;

fn detjump() -> Command {
    Command::new(env!("CARGO_BIN_EXE_detjump"))
}

#[test]
fn fig1_writes_csv_jsonl_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let status = detjump()
        .args(["fig1", "--omega0", "1:3:1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let csv = fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("omega0T,delta0T,initial_state"));
    let jsonl = fs::read_to_string(dir.path().join("fig1.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 3);
    for line in jsonl.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["delta0_t"], 5.0);
    }
    let cfg = fs::read_to_string(dir.path().join("fig1.config")).unwrap();
    assert!(cfg.contains("delta0: 5"));
}

#[test]
fn grid_with_residual_map_writes_matrices_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small grid\nomega0: 2:4:1\ndelta0: 1, 3\noutputs: final_populations, residual_map\n").unwrap();
    let out = detjump()
        .args(["grid", "--workers", "2", "--shape", "sech", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["grid.csv", "grid.jsonl", "grid_num.dat", "grid_ana.dat", "grid_residual.dat", "grid.gp"] {
        assert!(dir.path().join("out").join(name).exists(), "{name}");
    }
    let script = fs::read_to_string(dir.path().join("out/grid.gp")).unwrap();
    assert!(script.contains("splot"));
}

#[test]
fn table3_reports_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = detjump().arg("table3").arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("table3.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("majorana_residual"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn single_writes_trajectory_when_requested() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "outputs: final_populations, trajectory\n").unwrap();
    let out = detjump()
        .args(["single", "--tau-jump", "0.01", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let traj = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().next(), Some("t,p1,p2"));
    assert!(traj.lines().count() > 100);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "omega_zero: 3\n").unwrap();
    let codes: Vec<Option<i32>> = [
        vec!["single", "--config", bad.to_str().unwrap()],
        vec!["single", "--tolerance", "-1"],
        vec!["grid", "--workers", "0"],
        vec!["single", "--shape", "square"],
        vec!["nonsense"],
    ]
    .into_iter()
    .map(|args| detjump().args(args).arg("--out").arg(dir.path()).output().unwrap().status.code())
    .collect();
    assert!(codes.iter().all(|c| *c == Some(1)), "{codes:?}");
}

#[test]
fn io_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = detjump().args(["single", "--out"]).arg(blocker.join("sub")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let missing = detjump().args(["single", "--config"]).arg(dir.path().join("nope.cfg")).output().unwrap();
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn failed_nodes_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = detjump().args(["single", "--tolerance", "1e-17", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let csv = fs::read_to_string(dir.path().join("single.csv")).unwrap();
    assert!(csv.contains("NaN"));
}
