use std::net::SocketAddr;
use std::path::Path;

use newscog::dialogue::{report_bytes, Prompt, SessionEngine, SessionReport, SessionStore};
use newscog::ingest::{bundled_news, NewsItem, NewsStore};
use newscog::lexicon::Lexicon;
use newscog_service::api::{self, ErrorBody, ServiceHandle, StartupError};
use newscog_service::ServiceConfig;
use reqwest::{Client, StatusCode};
use serde_json::{json, Value};

const BONDS: &str = "2021-06-03-politics-bonds";

async fn start(store: &Path) -> ServiceHandle {
    NewsStore::open(store.join("news"))
        .unwrap()
        .put_all(&bundled_news())
        .unwrap();
    let any: SocketAddr = "127.0.0.1:0".parse().unwrap();
    api::spawn(&ServiceConfig::with_store(store), any)
        .await
        .unwrap()
}

fn sheet(user: &str, impairment: &str) -> Value {
    json!({
        "user_id": user, "age": 72, "tech_skills": false, "hearing_problems": false,
        "education": "superior", "impairment": impairment, "frame_of_mind": "happy",
        "stressed": false, "focused": true
    })
}

struct Api {
    client: Client,
    base: String,
}

impl Api {
    fn new(h: &ServiceHandle) -> Self {
        Api {
            client: Client::new(),
            base: format!("http://{}", h.addr),
        }
    }

    async fn get(&self, path: &str) -> (StatusCode, Value) {
        let r = self
            .client
            .get(format!("{}{path}", self.base))
            .send()
            .await
            .unwrap();
        (r.status(), r.json().await.unwrap())
    }

    async fn post(&self, path: &str, body: Value) -> (StatusCode, Value) {
        let r = self
            .client
            .post(format!("{}{path}", self.base))
            .json(&body)
            .send()
            .await
            .unwrap();
        (r.status(), r.json().await.unwrap())
    }

    async fn create(&self, user: &str, impairment: &str, news: &str, seed: u64) -> String {
        let (status, body) = self
            .post(
                "/sessions",
                json!({"sheet": sheet(user, impairment), "news_id": news, "seed": seed}),
            )
            .await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        body["session_id"].as_str().unwrap().to_string()
    }

    /// Answers every prompt with `answer(question_id)` and returns the final ack.
    async fn finish(&self, id: &str, answer: impl Fn(&str) -> String) -> Value {
        let mut last = Value::Null;
        loop {
            let (status, prompt) = self.get(&format!("/sessions/{id}/next")).await;
            assert_eq!(status, StatusCode::OK);
            let prompt: Prompt = serde_json::from_value(prompt).unwrap();
            let Some(q) = prompt.question_id() else {
                return last;
            };
            let (status, ack) = self
                .post(
                    &format!("/sessions/{id}/answer"),
                    json!({"text": answer(q)}),
                )
                .await;
            assert_eq!(status, StatusCode::OK, "{ack}");
            last = ack;
        }
    }
}

fn answers(q: &str) -> String {
    match q {
        "summary" => "ok",
        "q1" => "yes, I know her",
        "q2" => "the state administration",
        "q3" => "They will extend the electricity social bonds",
        _ => "a little",
    }
    .to_string()
}

#[tokio::test]
async fn readiness_and_news_queries() {
    let dir = tempfile::tempdir().unwrap();
    let h = start(dir.path()).await;
    let api = Api::new(&h);
    let (status, body) = api.get("/ready").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    assert!(body["lexicon_entries"].as_u64().unwrap() > 0);

    let (status, body) = api.get("/news?topic=society").await;
    assert_eq!(status, StatusCode::OK);
    let items: Vec<NewsItem> = serde_json::from_value(body).unwrap();
    assert_eq!(items.len(), 1);
    let (_, body) = api.get("/news?from=2021-06-04").await;
    assert_eq!(body.as_array().unwrap().len(), 2);
    let (status, body) = api.get("/news?topic=gossip").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "validation");
    let (status, _) = api.get("/news?from=yesterday").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    h.shutdown().await.unwrap();
}

#[tokio::test]
async fn full_session_and_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let h = start(dir.path()).await;
    let api = Api::new(&h);

    let (status, body) = api
        .post(
            "/sessions",
            json!({"sheet": sheet("u", "absent"), "news_id": "missing", "seed": 1}),
        )
        .await;
    assert_eq!(status, StatusCode::NOT_FOUND, "{body}");
    let mut young = sheet("u", "absent");
    young["age"] = json!(40);
    let (status, _) = api
        .post(
            "/sessions",
            json!({"sheet": young, "news_id": BONDS, "seed": 1}),
        )
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = api.post("/sessions", json!({"news_id": BONDS})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = api.get("/sessions/nope/next").await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let id = api.create("u", "absent", BONDS, 25).await;
    let (status, body) = api.get(&format!("/sessions/{id}/report")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let _: ErrorBody = serde_json::from_value(body).unwrap();

    let ack = api.finish(&id, answers).await;
    assert_eq!(ack["next"]["type"], "completed");
    let (status, body) = api
        .post(&format!("/sessions/{id}/answer"), json!({"text": "more"}))
        .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "protocol");

    let raw = Client::new()
        .get(format!("http://{}/sessions/{id}/report", h.addr))
        .send()
        .await
        .unwrap()
        .bytes()
        .await
        .unwrap();
    let report: SessionReport = serde_json::from_slice(&raw).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), ack["report"]);
    assert!(report.completed);
    h.shutdown().await.unwrap();

    // re-scoring the stored transcript reproduces the served bytes
    let engine = SessionEngine::new(
        SessionStore::open(dir.path()).unwrap(),
        std::sync::Arc::new(Lexicon::bundled()),
        Default::default(),
    );
    assert_eq!(
        report_bytes(&engine.replay(&id).unwrap()).unwrap(),
        raw.to_vec()
    );
}

#[tokio::test]
async fn retried_requests_are_applied_once() {
    let dir = tempfile::tempdir().unwrap();
    let h = start(dir.path()).await;
    let api = Api::new(&h);
    let body =
        json!({"sheet": sheet("r", "mild"), "news_id": BONDS, "seed": 2, "request_id": "create-1"});
    let (s1, first) = api.post("/sessions", body.clone()).await;
    let (s2, second) = api.post("/sessions", body).await;
    assert_eq!((s1, s2), (StatusCode::CREATED, StatusCode::CREATED));
    assert_eq!(first, second);
    let id = first["session_id"].as_str().unwrap();

    let path = format!("/sessions/{id}/answer");
    let answer = json!({"text": "ok", "request_id": "a-1"});
    let (r1, r2) = tokio::join!(
        api.post(&path, answer.clone()),
        api.post(&path, answer.clone())
    );
    assert_eq!(r1, r2);
    let (_, again) = api.post(&path, answer).await;
    assert_eq!(again, r1.1);
    // only the summary turn was recorded, so the next prompt is q1
    let (_, next) = api.get(&format!("/sessions/{id}/next")).await;
    assert_eq!(next["question_id"], "q1");
    h.shutdown().await.unwrap();
}

#[tokio::test]
async fn two_clients_progress_independently() {
    let dir = tempfile::tempdir().unwrap();
    let h = start(dir.path()).await;
    let (a, b) = (Api::new(&h), Api::new(&h));
    let id_a = a.create("alice", "absent", BONDS, 25).await;
    let id_b = b
        .create("bob", "severe", "2021-06-04-society-drugs", 7)
        .await;
    let (ack_a, ack_b) = tokio::join!(a.finish(&id_a, answers), b.finish(&id_b, |_| String::new()));
    let (ra, rb): (SessionReport, SessionReport) = (
        serde_json::from_value(ack_a["report"].clone()).unwrap(),
        serde_json::from_value(ack_b["report"].clone()).unwrap(),
    );
    assert_eq!((ra.user_id.as_str(), rb.user_id.as_str()), ("alice", "bob"));
    assert_eq!(ra.news_id, BONDS);
    assert!(ra.attention_sim > 0.5);
    assert_eq!(rb.attention_sim, 0.0);
    assert_eq!(rb.avg_answer_length_chars, 0.0);
    h.shutdown().await.unwrap();
}

#[tokio::test]
async fn dataset_training_and_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let h = start(dir.path()).await;
    let api = Api::new(&h);
    let (status, _) = api.post("/ml/train", json!({})).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let news: Vec<String> = bundled_news().into_iter().map(|n| n.id).collect();
    let users = [
        ("p1", "mild"),
        ("p2", "severe"),
        ("a1", "absent"),
        ("a2", "absent"),
    ];
    for (user, impairment) in users {
        for (s, news_id) in news.iter().enumerate() {
            let id = api.create(user, impairment, news_id, s as u64).await;
            let talkative = impairment == "absent";
            api.finish(&id, |q| if talkative { answers(q) } else { String::new() })
                .await;
        }
    }
    let partial = api.create("late", "absent", BONDS, 0).await;
    api.finish(&partial, answers).await;

    let (status, summary) = api.post("/dataset/build", json!({})).await;
    assert_eq!(status, StatusCode::OK, "{summary}");
    assert_eq!(summary["users"], 4);
    assert_eq!(summary["skipped"].as_array().unwrap().len(), 1);

    let (status, trained) = api.post("/ml/train", json!({"max_depth": 3})).await;
    assert_eq!(status, StatusCode::OK, "{trained}");
    assert!(trained["depth"].as_u64().unwrap() <= 3);
    assert!(dir.path().join("ml/tree.json").exists());

    let (status, eval) = api.post("/ml/evaluate", json!({"k": 2, "seed": 7})).await;
    assert_eq!(status, StatusCode::OK, "{eval}");
    assert_eq!(eval["report"]["total"], 4);
    assert!(eval["rendered"].as_str().unwrap().contains("Accuracy:"));
    let (status, _) = api.post("/ml/evaluate", json!({"k": 10, "seed": 7})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    h.shutdown().await.unwrap();
}

#[tokio::test]
async fn startup_failures_name_the_cause() {
    let dir = tempfile::tempdir().unwrap();
    let any: SocketAddr = "127.0.0.1:0".parse().unwrap();
    let config = ServiceConfig {
        lexicon: Some(dir.path().join("missing.jsonl")),
        ..ServiceConfig::with_store(dir.path())
    };
    let err = api::spawn(&config, any).await.err().unwrap();
    assert!(matches!(err, StartupError::Config(_)));
    assert!(err.to_string().contains("missing.jsonl"));

    let h = start(dir.path()).await;
    let err = api::spawn(&ServiceConfig::with_store(dir.path()), h.addr)
        .await
        .err()
        .unwrap();
    assert!(matches!(err, StartupError::Bind { .. }));
    h.shutdown().await.unwrap();
}
