use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ecsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecsim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--model", "regular_bipartite", "--n", "16", "--delta", "3", "--seed", "1", "--out"];
    for f in ["a.txt", "b.txt"] {
        let o = ecsim(dir.path(), &[&args[..], &[f]].concat());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read(dir.path().join("a.txt")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.txt")).unwrap());
    assert!(String::from_utf8(a).unwrap().starts_with("32 48"));
}

#[test]
fn run_general_in_congest_writes_ok_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&ecsim(d, &["gen", "--n", "60", "--delta", "6", "--seed", "3", "--out", "g.txt"])), 0);
    let o = ecsim(
        d,
        &["run", "--alg", "cong-gen", "--eps", "0.5", "--mode", "congest:64", "--graph", "g.txt", "--out", "r.json", "--coloring-out", "c.txt"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(r["ok"], true);
    assert_eq!(r["algorithm"], "cong-gen");
    assert_eq!(r["oracle_rounds"], 0);
    for key in ["n", "m", "delta", "bar_delta", "eps", "rounds", "colors_used", "max_defect", "max_message_bits", "seed", "beta_used", "fallback_triggered"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(code(&ecsim(d, &["verify", "--graph", "g.txt", "--coloring", "c.txt"])), 0);
}

#[test]
fn verify_flags_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("g.txt"), "3 2\n0 1\n1 2\n").unwrap();
    fs::write(d.join("c.txt"), "0 1\n1 1\n").unwrap();
    let o = ecsim(d, &["verify", "--graph", "g.txt", "--coloring", "c.txt"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], false);
}

#[test]
fn bad_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ecsim(dir.path(), &["run", "--bogus"])), 2);
    assert_eq!(code(&ecsim(dir.path(), &["gen", "--model", "nope", "--out", "x"])), 2);
    fs::write(dir.path().join("g.txt"), "2 1\n0 1\n").unwrap();
    assert_eq!(code(&ecsim(dir.path(), &["run", "--alg", "cong-gen", "--graph", "g.txt", "--eps", "3"])), 2);
}

#[test]
fn list_coloring_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = ecsim(d, &["gen", "--n", "80", "--delta", "10", "--seed", "2", "--out", "g.txt", "--lists-out", "l.txt"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    fs::write(d.join("run.conf"), "alg = list-d1\ngraph = g.txt\nlists = l.txt\namplify_mode = fast\nseed = 9\n").unwrap();
    // The flag wins over the file.
    let o = ecsim(d, &["run", "--config", "run.conf", "--amplify-mode", "reference", "--out", "r.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(r["seed"], 9);
    assert_eq!(r["ok"], true);
    assert!(r["oracle_rounds"].as_u64().unwrap() > 0);
}

#[test]
fn token_game_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("g.txt"), "4 3\n0 1\n1 2\n2 3\n").unwrap();
    fs::write(d.join("t.txt"), "0 4 1\n1 0 1\n2 4 1\n3 0 1\n").unwrap();
    let o = ecsim(d, &["run", "--alg", "token", "--graph", "g.txt", "--tokens", "t.txt", "--k", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["ok"], true);
}

#[test]
fn sweep_and_report_emit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["sweep", "--algs", "cong-bip,greedy", "--n", "30", "--deltas", "4,6", "--eps", "1/2", "--seeds", "2", "--reports-dir", "reps"];
    let a = ecsim(d, &args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = ecsim(d, &args);
    assert_eq!(a.stdout, b.stdout);
    let csv = String::from_utf8(a.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alg,n,m,delta,eps,seed,rounds,oracle_rounds,colors,ok"));
    assert_eq!(lines.count(), 8);
    let reps: Vec<_> = fs::read_dir(d.join("reps")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(reps.len(), 8);
    let mut args = vec!["report".to_string()];
    args.extend(reps.iter().map(|p| p.display().to_string()));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = ecsim(d, &args);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 9);
}
