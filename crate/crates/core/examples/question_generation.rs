//! Builds a session script for every bundled news item.
//!
//!     cargo run -p newscog --example question_generation -- [seed]

use newscog::ingest::bundled_news;
use newscog::lexicon::Lexicon;
use newscog::questgen::{build_session_script, Gazetteer};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(25);
    let (lex, gazetteer) = (Lexicon::bundled(), Gazetteer::bundled());
    for news in bundled_news() {
        println!("== {} ({})", news.title, news.id);
        let script = match build_session_script(&news, &lex, &gazetteer, seed) {
            Ok(s) => s,
            Err(e) => {
                println!("   {e}");
                continue;
            }
        };
        println!(
            "   entity: {} [{}]",
            script.entity.surface, script.entity.kind
        );
        println!("   Q1: {}", script.q1().text);
        for (outcome, q) in &script.followups {
            println!("   Q1 if {outcome}: {}", q.text);
        }
        for q in [&script.q2, &script.q_attention, &script.q_interest] {
            let gold = q.gold.as_ref().map(|g| g.display()).unwrap_or_default();
            println!("   {}: {}  [{gold}]", q.id, q.text);
        }
    }
}
