//! CLI behavior: artifact-only stdout, JSON error envelopes on stderr with
//! nonzero exit, and the bundled demo run end to end.

use std::path::PathBuf;
use std::process::{Command, Output};

fn conclave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conclave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(path: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(path)
        .to_str()
        .unwrap()
        .to_string()
}

fn stderr_envelope(output: &Output) -> serde_json::Value {
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    serde_json::from_str(stderr.lines().last().expect("error envelope on stderr"))
        .unwrap_or_else(|e| panic!("stderr is not a JSON envelope: {e}\n{stderr}"))
}

#[test]
fn vote_prints_the_winner() {
    let output = conclave(&["vote", "--rule", "borda", "--profile", &data("profiles/p1.json")]);
    assert!(output.status.success());
    assert_eq!(String::from_utf8_lossy(&output.stdout), "B\n");

    let output = conclave(&["vote", "--rule", "irv", "--profile", &data("profiles/p1.json")]);
    assert_eq!(String::from_utf8_lossy(&output.stdout), "A\n");
}

#[test]
fn vote_details_exposes_tally_and_trace() {
    let output = conclave(&[
        "vote",
        "--rule",
        "ranked_pairs",
        "--profile",
        &data("profiles/p1.json"),
        "--details",
    ]);
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["winner"], "A");
    assert_eq!(value["tiebreak_applied"], true);
    assert!(value["trace"]
        .as_array()
        .unwrap()
        .iter()
        .any(|t| t.as_str().unwrap().starts_with("lock")));
}

#[test]
fn vote_rejects_unknown_rules() {
    let output =
        conclave(&["vote", "--rule", "schulze", "--profile", &data("profiles/p1.json")]);
    let envelope = stderr_envelope(&output);
    assert_eq!(envelope["error"], "rule");
}

#[test]
fn anneal_prints_exact_schedule() {
    let output = conclave(&["anneal", "--total", "100", "--steps", "0,50,100"]);
    assert!(output.status.success());
    assert_eq!(
        String::from_utf8_lossy(&output.stdout),
        "0,1.0,0.0\n50,0.5,0.5\n100,0.0,1.0\n"
    );
}

#[test]
fn anneal_rejects_out_of_range_steps() {
    let output = conclave(&["anneal", "--total", "10", "--steps", "11"]);
    let envelope = stderr_envelope(&output);
    assert_eq!(envelope["error"], "anneal");
}

#[test]
fn ach_parse_emits_report_json() {
    let output = conclave(&["ach-parse", "--input", &data("samples/think_full.txt")]);
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["final_decision"], "H1");
    assert_eq!(report["tentative_selection"], "H1");
    assert!(report["matrix"]["cells"].is_array());
}

#[test]
fn ach_parse_reports_unparseable_input() {
    let dir = std::env::temp_dir().join(format!("conclave-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("garbage.txt");
    std::fs::write(&path, "free-form rambling with no sections").unwrap();
    let output = conclave(&["ach-parse", "--input", path.to_str().unwrap()]);
    let envelope = stderr_envelope(&output);
    assert_eq!(envelope["error"], "ach_parse");
}

#[test]
fn score_emits_scored_jsonl_for_both_stages() {
    for stage in ["stage1", "stage2"] {
        let output = conclave(&[
            "score",
            "--input",
            &data("fixtures/rollouts50.jsonl"),
            "--stage",
            stage,
        ]);
        assert!(output.status.success(), "{stage} failed");
        let stdout = String::from_utf8_lossy(&output.stdout);
        assert_eq!(stdout.lines().count(), 50);
        for line in stdout.lines() {
            let record: serde_json::Value = serde_json::from_str(line).unwrap();
            let b = &record["breakdown"];
            let sum = b["format_score"].as_f64().unwrap()
                + b["answer_score"].as_f64().unwrap()
                + b["ach_score"].as_f64().unwrap();
            assert_eq!(b["total"].as_f64().unwrap(), sum);
        }
    }
}

#[test]
fn eval_demo_reproduces_the_golden_table() {
    let out_dir = std::env::temp_dir().join(format!("conclave-eval-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&out_dir);
    let output = conclave(&[
        "eval",
        "--config",
        &data("configs/eval_demo.json"),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));

    let golden = std::fs::read_to_string(data("golden/eval_demo_table.txt")).unwrap();
    assert_eq!(String::from_utf8_lossy(&output.stdout), golden);
    assert_eq!(std::fs::read_to_string(out_dir.join("table.txt")).unwrap(), golden);

    let decisions = std::fs::read_to_string(out_dir.join("decisions.jsonl")).unwrap();
    assert_eq!(decisions.lines().count(), 60, "3 strategies x 20 items");

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "eval");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 16);
    assert!(manifest["seeds"]["pool"].is_number());
    assert!(manifest["engine_version"].is_string());

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn missing_config_yields_config_error_envelope() {
    let output = conclave(&["eval", "--config", "does-not-exist.json"]);
    let envelope = stderr_envelope(&output);
    assert_eq!(envelope["error"], "config");
    assert!(envelope["message"].as_str().unwrap().contains("does-not-exist.json"));
}

#[test]
fn stdout_stays_clean_on_failure() {
    let output = conclave(&["eval", "--config", "does-not-exist.json"]);
    assert!(output.stdout.is_empty(), "errors must not pollute stdout");
}

fn live_config() -> String {
    let dir = std::env::temp_dir().join(format!("conclave-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("live.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "dataset": data("synthetic20.jsonl"),
            "executors": [{
                "id": "live-1",
                "role": "executor",
                "backend": {
                    "type": "http",
                    "endpoint": "http://127.0.0.1:1/v1/chat/completions",
                    "model": "m",
                    "auth_env": "CONCLAVE_TEST_LIVE_TOKEN",
                },
            }],
            "strategies": [{"type": "single_agent", "agent": "live-1"}],
        })
        .to_string(),
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn live_runs_require_auth_env() {
    let config = live_config();
    let output = Command::new(env!("CARGO_BIN_EXE_conclave"))
        .args(["eval", "--config", &config, "--out", "/tmp/never-used"])
        .env_remove("CONCLAVE_TEST_LIVE_TOKEN")
        .output()
        .unwrap();
    let envelope = stderr_envelope(&output);
    assert_eq!(envelope["error"], "live_guard");
    assert!(envelope["message"].as_str().unwrap().contains("CONCLAVE_TEST_LIVE_TOKEN"));
}

#[test]
fn live_runs_require_explicit_consent() {
    let config = live_config();
    let output = Command::new(env!("CARGO_BIN_EXE_conclave"))
        .args(["eval", "--config", &config, "--out", "/tmp/never-used"])
        .env("CONCLAVE_TEST_LIVE_TOKEN", "token")
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&output.stderr).to_string();
    let envelope = stderr_envelope(&output);
    assert_eq!(envelope["error"], "live_guard");
    assert!(stderr.contains("projected live requests"), "stderr: {stderr}");
    assert!(envelope["message"].as_str().unwrap().contains("--yes"));
}
