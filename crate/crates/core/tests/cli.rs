use std::path::Path;
use std::process::{Command, Output};

fn hanabi(args: &[&str], out_root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hanabi"))
        .args(args)
        .env("HANABI_OUT_DIR", out_root)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn zero_epoch_train_writes_manifest_and_header() {
    let root = tempfile::tempdir().unwrap();
    let o = hanabi(&["train", "--algo", "spg", "--seed", "3", "--epochs", "0"], root.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let run = root.path().join("spg-seed3");
    assert!(run.join("manifest.json").is_file());
    let csv = std::fs::read_to_string(run.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("epoch,env_steps,"));
    assert!(!run.join("checkpoints").join("final.ckpt").exists());
}

#[test]
fn unknown_algorithm_exits_one() {
    let root = tempfile::tempdir().unwrap();
    let o = hanabi(&["train", "--algo", "dqn"], root.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn verify_length_and_table() {
    let root = tempfile::tempdir().unwrap();
    let o = hanabi(&["verify", "length", "--players", "2", "--games", "200"], root.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("sigma0=89 achieved=89 ok=true"), "{s}");

    let o = hanabi(&["verify", "table6", "--players", "3", "--games", "200"], root.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mismatches=0 ok=true"));
}

#[test]
fn verify_perfect_writes_replayable_files() {
    let root = tempfile::tempdir().unwrap();
    let o = hanabi(&["verify", "perfect"], root.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("turns=71 score=25 ok=true"));
    let dir = root.path().join("verify");
    let deck = hanabi::engine::read_deck_file(dir.join("perfect.deck")).unwrap();
    let actions: Vec<hanabi::engine::Action> = std::fs::read_to_string(dir.join("perfect.actions"))
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    let trace = hanabi::length_analysis::replay_script(&deck, &actions).unwrap();
    assert_eq!((trace.len(), trace.final_state().score()), (71, 25));
}

#[test]
fn train_then_eval_is_reproducible() {
    let root = tempfile::tempdir().unwrap();
    let o = hanabi(
        &["train", "--algo", "ppo", "--epochs", "2", "--batch-min-steps", "200", "--checkpoint-every", "1"],
        root.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let run = root.path().join("ppo-seed1");
    assert!(run.join("checkpoints/epoch-000001.ckpt").is_file());
    let ckpt = run.join("checkpoints/final.ckpt");
    let ckpt = ckpt.to_str().unwrap();
    let a = root.path().join("a.json");
    let b = root.path().join("b.json");
    for p in [&a, &b] {
        let o = hanabi(&["eval", "--checkpoint", ckpt, "--games", "50", "--seed", "9", "--out", p.to_str().unwrap()], root.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let ra = std::fs::read(&a).unwrap();
    assert_eq!(ra, std::fs::read(&b).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["n_games"], 50);

    let o = hanabi(&["eval", "--checkpoint", ckpt, "--games", "0"], root.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn corrupt_checkpoint_is_rejected() {
    let root = tempfile::tempdir().unwrap();
    let bad = root.path().join("bad.ckpt");
    std::fs::write(&bad, b"not a checkpoint").unwrap();
    let o = hanabi(&["eval", "--checkpoint", bad.to_str().unwrap(), "--games", "5"], root.path());
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn simulate_prints_trace_and_summary() {
    let root = tempfile::tempdir().unwrap();
    let o = hanabi(&["simulate", "--seed", "5"], root.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.lines().next().unwrap().contains(','));
    let last = s.lines().last().unwrap();
    assert!(last.starts_with("turns=") && last.contains("score="), "{last}");
}

#[test]
fn grad_check_subcommand_passes() {
    let root = tempfile::tempdir().unwrap();
    let o = hanabi(&["grad-check", "--batches", "2"], root.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for name in ["spg", "vpg", "ppo", "value_mse"] {
        assert!(s.contains(&format!("objective={name} ")), "{s}");
    }
    assert!(!s.contains("ok=false"));
}
