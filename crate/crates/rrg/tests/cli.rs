use std::path::PathBuf;
use std::process::{Command, Output};

fn rrg(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrg"))
        .args(args)
        .env("RRG_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = rrg(args, "1");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rrg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn words_csv() {
    let text = stdout(&["words", "--d", "2", "--k", "2"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("word,length,h,b,c,orbit_size"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.contains(&"p1.p1,2,2,2,2,2"));
    assert!(rows.contains(&"p1.P2,2,1,0,0,4"));
    assert!(!text.contains('\r'));
}

#[test]
fn simulate_is_deterministic_across_worker_counts() {
    let args = ["simulate", "--d", "2", "--T", "5", "--T0", "1", "--S0", "0.5", "--grid", "2x3", "--replicas", "6", "--kmax", "2", "--seed", "9"];
    let one = rrg(&args, "1");
    let three = rrg(&args, "3");
    assert!(one.status.success());
    assert_eq!(one.stdout, three.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    assert!(text.starts_with("replica,t,s,k,word,count\n"));
    // 6 classes of length ≤ 2 on 6 cells per replica
    let rows = text.lines().count() - 1;
    assert_eq!(rows % 36, 0);
    assert!(rows >= 5 * 36);
    let other = rrg(&[&args[..15], &["10"]].concat(), "1");
    assert_ne!(text.as_bytes(), &other.stdout[..]);
}

#[test]
fn limit_is_deterministic_and_writes_files() {
    let path = scratch("limit.csv");
    let p = path.to_str().unwrap();
    let args = ["limit", "--d", "2", "--K", "2", "--T0", "1", "--S0", "1", "--grid", "3x3", "--replicas", "5", "--seed", "4", "--out", p];
    assert!(rrg(&args, "1").status.success());
    let first = std::fs::read(&path).unwrap();
    assert!(rrg(&args, "2").status.success());
    assert_eq!(first, std::fs::read(&path).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("replica,t,s,word,count\n"));
    assert_eq!(text.lines().count() - 1, 5 * 9 * 6);
}

#[test]
fn cov_modes() {
    let path = scratch("points.csv");
    std::fs::write(&path, "t1,s1,t2,s2\n0,0,0,0\n0,0,0,0.3\n-0.5,0,0,0\n").unwrap();
    let p = path.to_str().unwrap();
    let text = stdout(&["cov", "--mode", "finite", "--d", "2", "--j", "2", "--points", p]);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(5).map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[0][4], 3.0);
    assert!(rows[1][4] < 3.0 && rows[2][4] < 3.0);

    let text = stdout(&["cov", "--mode", "finite", "--d", "2", "--j", "1", "--k", "2", "--points", p]);
    let last = text.lines().last().unwrap();
    assert!(last.ends_with(",,0.0,2.0"), "{last}");

    let text = stdout(&["cov", "--mode", "U", "--j", "3", "--points", p]);
    assert!(text.lines().nth(1).unwrap().ends_with(",6.0,,"));
    let text = stdout(&["cov", "--mode", "G", "--j", "1", "--points", p]);
    assert_eq!(text.lines().count(), 4);

    std::fs::write(&path, "t1,s1,t2,s2\n0.5,0,0,0\n").unwrap();
    let out = rrg(&["cov", "--mode", "finite", "--j", "1", "--points", p], "1");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectra_rows() {
    let text = stdout(&["spectra", "--d", "2", "--n", "60", "--kmax", "6", "--seed", "3"]);
    assert!(text.starts_with("k,trace_gamma,cnbw,residual,f_trace,cycle_count,tangle_free\n"));
    for line in text.lines().skip(1) {
        let residual: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(residual.abs() < 1e-8);
    }
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn config_file_supplies_defaults() {
    let cfg = scratch("exp.toml");
    std::fs::write(&cfg, "d = 3\nk_max = 1\nseed = 5\n").unwrap();
    let text = stdout(&["words", "--config", cfg.to_str().unwrap()]);
    assert_eq!(text.lines().count(), 1 + 3);
    std::fs::write(&cfg, "d = 3\nunknown = 1\n").unwrap();
    assert_eq!(rrg(&["words", "--config", cfg.to_str().unwrap()], "1").status.code(), Some(2));
}

#[test]
fn bad_arguments_fail_cleanly() {
    assert_eq!(rrg(&["words", "--d", "0", "--k", "2"], "1").status.code(), Some(2));
    assert_eq!(rrg(&["simulate", "--T", "1", "--T0", "2"], "1").status.code(), Some(2));
    assert_eq!(rrg(&["limit", "--K", "3", "--L", "2"], "1").status.code(), Some(2));
    assert!(!rrg(&["validate", "--criterion", "10"], "1").status.success());
}

#[test]
fn validate_exact_suite_summary() {
    let path = scratch("summary.json");
    let out = rrg(&["validate", "--suite", "exact", "--criterion", "1", "--criterion", "7", "--out", path.to_str().unwrap()], "2");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["experiment"], "validate-exact");
    assert_eq!(v["params"]["pass"], true);
    let reports = v["reports"].as_array().unwrap();
    assert!(!reports.is_empty());
    for r in reports {
        let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["estimate", "name", "pass", "reference", "se", "z"]);
    }
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("criterion 1: PASS") && stderr.contains("criterion 7: PASS"));
}
