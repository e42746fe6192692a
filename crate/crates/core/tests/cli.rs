use std::process::{Command, Output};

fn abi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abi")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn latinsquare_prints_rows() {
    let text = stdout(&abi(&["latinsquare", "4"]));
    assert_eq!(text, "0 1 3 2\n1 2 0 3\n2 3 1 0\n3 0 2 1\n");
    assert_eq!(stdout(&abi(&["latinsquare", "3"])).lines().count(), 6);
    assert!(!abi(&["latinsquare", "1"]).status.success());
}

#[test]
fn run_then_stats_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("walk.csv");
    let csv = csv.to_str().unwrap();
    stdout(&abi(&["run", "walkline", "--lanes", "8,16", "--selection-time", "1", "--trials", "5", "--runs", "2", "--seed", "4", "--out", csv]));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("technique,lanes,selection_time,target,success,tct,"));
    assert_eq!(text.lines().count(), 1 + 2 * 5 * 2);

    let stats_path = dir.path().join("stats.csv");
    let stats = stdout(&abi(&["stats", csv, "--group-by", "lanes", "--metric", "success"]));
    let mut lines = stats.lines();
    assert_eq!(lines.next(), Some("lanes,metric,n,mean,sd,se,ci_lo,ci_hi"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("10")));
    stdout(&abi(&["stats", csv, "--group-by", "lanes", "--out", stats_path.to_str().unwrap()]));
    assert_eq!(std::fs::read_to_string(&stats_path).unwrap(), stats);
}

#[test]
fn seed_from_environment() {
    let run = |seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_abi"))
            .args(["run", "proximity", "--trials", "3"])
            .env("ABI_SEED", seed)
            .output()
            .unwrap();
        stdout(&out)
    };
    assert_eq!(run("8"), run("8"));
    assert_ne!(run("8"), run("9"));
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"technique":"walkline","bogus":1}"#).unwrap();
    let out = abi(&["run", "walkline", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    std::fs::write(&cfg, r#"{"technique":"walkline"}"#).unwrap();
    assert!(!abi(&["run", "foottap", "--config", cfg.to_str().unwrap()]).status.success());
    assert!(!abi(&["run", "walkline", "--lanes", "7"]).status.success());
    assert!(!abi(&["stats", dir.path().join("missing.csv").to_str().unwrap()]).status.success());
}
