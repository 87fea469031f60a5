use std::net::SocketAddr;
use std::path::Path;
use std::process::{Command, Output};

use newscog::dialogue::SessionReport;
use newscog::ingest::bundled_news_dir;
use newscog_service::{api, pipeline, ServiceConfig};
use serde_json::{json, Value};

fn newscog(store: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_newscog"))
        .arg("--store")
        .arg(store)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SHEET: &str = r#"{"user_id": "c1", "age": 81, "tech_skills": true, "hearing_problems": false,
  "education": "superior", "impairment": "absent", "frame_of_mind": "normal",
  "stressed": false, "focused": true}"#;
const ANSWERS: &str = "summary\tdone\nq1\tyes\nq1.1\tThe minister for ecology\nq2\tthe executive power\nq3\tIt will extend the electricity social bonds\nq4\tno\n";

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bare = Command::new(env!("CARGO_BIN_EXE_newscog"))
        .output()
        .unwrap();
    assert_eq!(bare.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bare.stderr).contains("Usage"));
    assert_eq!(newscog(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        newscog(dir.path(), &["evaluate", "--fold", "3"])
            .status
            .code(),
        Some(2)
    );
    let missing = newscog(
        dir.path(),
        &[
            "run",
            "--sheet",
            "nope.json",
            "--answers",
            "a",
            "--news",
            "x",
        ],
    );
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.json"));
}

#[test]
fn evaluate_prints_the_results_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    pipeline::save_dataset(&pipeline::synthetic_dataset(3).unwrap(), &csv).unwrap();
    let out = stdout(&newscog(
        dir.path(),
        &[
            "evaluate",
            "--dataset",
            csv.to_str().unwrap(),
            "--folds",
            "10",
            "--seed",
            "7",
        ],
    ));
    assert!(out.contains("F-measure") && out.contains("Recall"), "{out}");
    assert!(out.contains("present") && out.contains("absent"));
    assert!(out.contains("(") && out.contains("/30)"), "{out}");

    let trained = stdout(&newscog(
        dir.path(),
        &[
            "train",
            "--dataset",
            csv.to_str().unwrap(),
            "--max-depth",
            "2",
        ],
    ));
    assert!(trained.contains("tree (depth"));
    assert!(dir.path().join("ml/tree.json").exists());
}

#[test]
fn run_then_score_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    stdout(&newscog(
        &store,
        &["ingest", "--source", bundled_news_dir().to_str().unwrap()],
    ));
    std::fs::write(dir.path().join("sheet.json"), SHEET).unwrap();
    std::fs::write(dir.path().join("answers.tsv"), ANSWERS).unwrap();
    let out_dir = dir.path().join("out");
    let printed = stdout(&newscog(
        &store,
        &[
            "run",
            "--sheet",
            dir.path().join("sheet.json").to_str().unwrap(),
            "--answers",
            dir.path().join("answers.tsv").to_str().unwrap(),
            "--news",
            "2021-06-03-politics-bonds",
            "--seed",
            "25",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ],
    ));
    let report: SessionReport = serde_json::from_str(&printed).unwrap();
    let transcript = out_dir.join("transcript.json");
    let script = out_dir.join("script.json");
    let table = stdout(&newscog(
        &store,
        &[
            "score",
            "--transcript",
            transcript.to_str().unwrap(),
            "--script",
            script.to_str().unwrap(),
        ],
    ));
    for (q, sim) in &report.sims {
        assert!(
            table.contains(&format!("{sim:.2}")) && table.contains(q.as_str()),
            "{table}"
        );
    }
    let json = stdout(&newscog(
        &store,
        &[
            "score",
            "--json",
            "--transcript",
            transcript.to_str().unwrap(),
            "--script",
            script.to_str().unwrap(),
            "--sheet",
            dir.path().join("sheet.json").to_str().unwrap(),
        ],
    ));
    assert_eq!(json, printed);

    let script_json = stdout(&newscog(
        &store,
        &[
            "gen-session",
            "--news",
            "2021-06-03-politics-bonds",
            "--seed",
            "25",
        ],
    ));
    assert_eq!(
        script_json.trim(),
        std::fs::read_to_string(&script).unwrap().trim()
    );
}

fn without_session_id(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("session_id");
    v
}

#[tokio::test]
async fn cli_and_api_agree_on_identical_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    let ingest = newscog(
        &store,
        &["ingest", "--source", bundled_news_dir().to_str().unwrap()],
    );
    stdout(&ingest);
    std::fs::write(dir.path().join("sheet.json"), SHEET).unwrap();
    std::fs::write(dir.path().join("answers.tsv"), ANSWERS).unwrap();
    let cli_report: Value = serde_json::from_str(&stdout(&newscog(
        &store,
        &[
            "run",
            "--sheet",
            dir.path().join("sheet.json").to_str().unwrap(),
            "--answers",
            dir.path().join("answers.tsv").to_str().unwrap(),
            "--news",
            "2021-06-03-politics-bonds",
            "--seed",
            "25",
        ],
    )))
    .unwrap();

    let any: SocketAddr = "127.0.0.1:0".parse().unwrap();
    let h = api::spawn(&ServiceConfig::with_store(&store), any)
        .await
        .unwrap();
    let base = format!("http://{}", h.addr);
    let client = reqwest::Client::new();
    let sheet: Value = serde_json::from_str(SHEET).unwrap();
    let created: Value = client
        .post(format!("{base}/sessions"))
        .json(&json!({"sheet": sheet, "news_id": "2021-06-03-politics-bonds", "seed": 25}))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    let id = created["session_id"].as_str().unwrap();
    let answers: std::collections::HashMap<&str, &str> =
        ANSWERS.lines().filter_map(|l| l.split_once('\t')).collect();
    let mut api_report = Value::Null;
    loop {
        let prompt: Value = client
            .get(format!("{base}/sessions/{id}/next"))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        let Some(q) = prompt["question_id"].as_str() else {
            break;
        };
        let ack: Value = client
            .post(format!("{base}/sessions/{id}/answer"))
            .json(&json!({"text": answers.get(q).copied().unwrap_or("")}))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        if !ack["report"].is_null() {
            api_report = ack["report"].clone();
        }
    }
    h.shutdown().await.unwrap();
    assert_eq!(
        without_session_id(cli_report),
        without_session_id(api_report)
    );
}
