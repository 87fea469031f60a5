//! Starts the API on an ephemeral port, plays one session over HTTP and
//! prints each exchange followed by the stored report.

use newscog::ingest::{bundled_news, NewsStore};
use newscog_service::{api, ServiceConfig};
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let store = std::env::temp_dir().join(format!("newscog-api-{}", std::process::id()));
    NewsStore::open(store.join("news"))?.put_all(&bundled_news())?;
    let server = api::spawn(&ServiceConfig::with_store(&store), "127.0.0.1:0".parse()?).await?;
    let base = format!("http://{}", server.addr);
    let http = reqwest::Client::new();

    let news: Value = http
        .get(format!("{base}/news?topic=sports"))
        .send()
        .await?
        .json()
        .await?;
    let news_id = news[0]["id"].as_str().unwrap_or_default().to_string();
    let sheet = json!({
        "user_id": "visitor", "age": 68, "tech_skills": true, "hearing_problems": false,
        "education": "superior", "impairment": "absent", "frame_of_mind": "normal",
        "stressed": false, "focused": true
    });
    let created: Value = http
        .post(format!("{base}/sessions"))
        .json(&json!({"sheet": sheet, "news_id": news_id, "seed": 4}))
        .send()
        .await?
        .json()
        .await?;
    let id = created["session_id"].as_str().unwrap_or_default();

    let replies = [
        "yes",
        "yes",
        "I like the sea",
        "a group of persons",
        "Celta",
        "yes",
    ];
    for (turn, reply) in replies.iter().enumerate() {
        let prompt: Value = http
            .get(format!("{base}/sessions/{id}/next"))
            .send()
            .await?
            .json()
            .await?;
        if prompt["type"] == "completed" {
            break;
        }
        println!(
            "[{turn}] {}\n    > {reply}",
            prompt["text"].as_str().unwrap_or_default()
        );
        http.post(format!("{base}/sessions/{id}/answer"))
            .json(&json!({"text": reply, "request_id": format!("{id}-{turn}")}))
            .send()
            .await?;
    }
    let report = http
        .get(format!("{base}/sessions/{id}/report"))
        .send()
        .await?
        .text()
        .await?;
    println!("\n{report}");
    server.shutdown().await?;
    Ok(())
}
