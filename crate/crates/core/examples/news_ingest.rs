//! Fetches the bundled documents into a store and runs a few queries.

use newscog::ingest::{
    bundled_news_dir, fetch_news, NewsQuery, NewsStore, SourceDescriptor, Topic,
};

fn main() -> newscog::Result<()> {
    let source = SourceDescriptor::Directory {
        path: bundled_news_dir(),
    };
    let fetched = fetch_news(&source, None, None)?;
    println!(
        "fetched {} items, {} warnings",
        fetched.items.len(),
        fetched.warnings.len()
    );

    let root = std::env::temp_dir().join(format!("newscog-news-{}", std::process::id()));
    let store = NewsStore::open(&root)?;
    store.put_all(&fetched.items)?;

    for item in store.query(&NewsQuery::default())? {
        println!(
            "{}  {:<9} {}",
            item.published,
            item.topic.as_str(),
            item.title
        );
    }
    let sports = store.query(&NewsQuery {
        topic: Some(Topic::Sports),
        ..Default::default()
    })?;
    println!("\nsports lead: {}", sports[0].summary);
    Ok(())
}
