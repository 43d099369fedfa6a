mod support;

use std::process::{Command, Output};

use dynsched_service::ServiceConfig;
use support::*;

fn dynsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynsched"))
        .args(args)
        .env_remove("DYNSCHED_CONFIG")
        .env_remove("DYNSCHED_FIXTURE")
        .env_remove("DYNSCHED_SESSIONS")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = dynsched(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(rel: &str) -> String {
    data_dir().join(rel).display().to_string()
}

#[test]
fn solve_prints_a_grid() {
    let out = ok(&["solve", "--kind", "nsp", "--instance", &path("instances/nsp_eval.json")]);
    assert!(out.starts_with("nurse"));
    assert!(out.contains("status: Optimal  objective: 2"), "{out}");
    let csv = ok(&["export", "--kind", "gsp", "--instance", &path("instances/gsp_eval.json"), "--format", "csv"]);
    assert_eq!(csv.lines().count(), 4);
    let json = ok(&["solve", "--kind", "nsp", "--instance", &path("instances/nsp_eval.json"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["report"]["objective"], 2);
}

#[test]
fn constrain_with_patch_text_and_fixture() {
    let inst = path("instances/static_nurse_desk.json");
    let out = ok(&[
        "constrain",
        "--kind",
        "static_nurse",
        "--instance",
        &inst,
        "--dsl",
        "param A\nconstraint forall s in 0..S: X[A, 0, s] == 0",
        "--set",
        "A=2",
        "--accept",
    ]);
    assert!(out.contains("attempts: 1"), "{out}");
    let row = out.lines().find(|l| l.trim_start().starts_with("2 ")).unwrap();
    assert_eq!(row.split_whitespace().nth(1), Some("."));

    let fixture = path("fixtures/motivating.json");
    let out = ok(&[
        "--fixture",
        &fixture,
        "constrain",
        "--kind",
        "static_nurse",
        "--instance",
        &inst,
        "--nl",
        motivating::UNAVAILABLE,
        "--set",
        "A=1",
        "--set",
        "D1=2",
        "--set",
        "D2=4",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["attempts"], 2);

    let out = dynsched(&["constrain", "--kind", "static_nurse", "--instance", &inst, "--nl", "anything"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("BackendError"));
}

#[test]
fn sessions_persist_between_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let sessions = dir.path().display().to_string();
    let out = dynsched(&[
        "--sessions",
        &sessions,
        "--seed",
        "3",
        "solve",
        "--kind",
        "static_nurse",
        "--instance",
        &path("instances/static_nurse_desk.json"),
        "--save",
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let id = stderr.lines().find_map(|l| l.strip_prefix("session ")).unwrap().trim().to_string();
    ok(&["--sessions", &sessions, "constrain", "--session", &id, "--dsl", "constraint X[0, 0, 0] == 0", "--accept"]);
    let grid = ok(&["--sessions", &sessions, "export", "--session", &id]);
    let row0 = grid.lines().nth(1).unwrap();
    assert_ne!(row0.split_whitespace().nth(1), Some("0"), "{grid}");
    let out = dynsched(&["export", "--session", &id]);
    assert!(!out.status.success());
}

#[test]
fn eval_replays_the_strong_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("records.json");
    let out = ok(&[
        "--data",
        &data_dir().display().to_string(),
        "eval",
        "--replay",
        "gpt4-replay",
        "--out",
        &report.display().to_string(),
    ]);
    let gsp = out.lines().find(|l| l.starts_with("GSP")).unwrap();
    let cols: Vec<&str> = gsp.split_whitespace().skip(1).collect();
    assert_eq!(&cols[..5], ["0", "0", "0", "6", "29"]);
    let records: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(records["records"].as_array().unwrap().len(), 70);
}

#[test]
fn paraphrase_verb() {
    let fixture = dynsched_agents::Fixture::load(data_dir().join("fixtures/paraphrase-replay.json")).unwrap();
    let record = fixture.records.iter().find(|r| r.response.lines().count() >= 4).unwrap();
    let request = record.prompt_excerpt.split(" | ").nth(1).unwrap();
    let out = ok(&["--fixture", &path("fixtures/paraphrase-replay.json"), "paraphrase", request, "-n", "4"]);
    assert_eq!(out.lines().count(), 4);
    assert!(out.starts_with("1. "));
}

#[test]
fn config_file_then_environment() {
    let cfg = ServiceConfig::from_toml(
        r#"
bind = "0.0.0.0:9000"
time_limit_secs = 3.5
seed = 11

[agent]
backend = "fixture"
fixture = "data/fixtures/motivating.json"
max_attempts = 2
"#,
    )
    .unwrap();
    assert_eq!(cfg.bind, "0.0.0.0:9000");
    assert_eq!(cfg.limits().time_limit, 3.5);
    assert_eq!(cfg.engine_options().max_attempts, 2);
    assert_eq!(cfg.engine_options().seed, Some(11));

    let mut cfg = cfg;
    let env = |k: &str| match k {
        "DYNSCHED_TIME_LIMIT" => Some("1".to_string()),
        "DYNSCHED_NODE_LIMIT" => Some("500".to_string()),
        "DYNSCHED_SESSIONS" => Some("/tmp/s".to_string()),
        "DYNSCHED_MAX_ATTEMPTS" => Some("4".to_string()),
        _ => None,
    };
    cfg.apply_env(env).unwrap();
    assert_eq!(cfg.limits().time_limit, 1.0);
    assert_eq!(cfg.limits().node_limit, Some(500));
    assert_eq!(cfg.sessions_dir.as_deref(), Some(std::path::Path::new("/tmp/s")));
    assert_eq!(cfg.agent.max_attempts, 4);
    assert_eq!(cfg.bind, "0.0.0.0:9000");
    assert!(cfg.apply_env(|k| (k == "DYNSCHED_SEED").then(|| "x".to_string())).is_err());
    assert!(ServiceConfig::from_toml("bind = 3").is_err());
    assert_eq!(ServiceConfig::load(None).unwrap(), ServiceConfig::default());

    // The file is read by the binary too.
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dynsched.toml");
    std::fs::write(&file, format!("[agent]\nfixture = {:?}\n", path("fixtures/motivating.json"))).unwrap();
    let out = ok(&[
        "--config",
        &file.display().to_string(),
        "constrain",
        "--kind",
        "static_nurse",
        "--instance",
        &path("instances/static_nurse_desk.json"),
        "--nl",
        motivating::UNAVAILABLE,
        "--set",
        "A=1",
        "--set",
        "D1=2",
        "--set",
        "D2=4",
    ]);
    assert!(out.contains("attempts: 2"), "{out}");
}
