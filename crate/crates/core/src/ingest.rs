//! News acquisition, lead-paragraph summaries and a date/topic indexed store.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topic {
    Economy,
    Politics,
    Science,
    Society,
    Sports,
}

impl Topic {
    pub const ALL: [Topic; 5] = [
        Topic::Economy,
        Topic::Politics,
        Topic::Science,
        Topic::Society,
        Topic::Sports,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Topic::Economy => "economy",
            Topic::Politics => "politics",
            Topic::Science => "science",
            Topic::Society => "society",
            Topic::Sports => "sports",
        }
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Topic::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim().to_lowercase())
            .ok_or_else(|| Error::validation(format!("unknown topic '{s}'")))
    }
}

/// On-disk and on-the-wire news document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewsDocument {
    pub id: String,
    pub topic: Topic,
    pub title: String,
    pub body: String,
    pub published: NaiveDate,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewsItem {
    pub id: String,
    pub topic: Topic,
    pub title: String,
    pub paragraphs: Vec<String>,
    pub summary: String,
    pub published: NaiveDate,
    pub source: String,
}

/// Splits on blank lines, trimming each paragraph.
pub fn split_paragraphs(body: &str) -> Vec<String> {
    let mut paragraphs = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in body.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                paragraphs.push(current.join("\n"));
                current.clear();
            }
        } else {
            current.push(line.trim());
        }
    }
    if !current.is_empty() {
        paragraphs.push(current.join("\n"));
    }
    paragraphs
}

/// First paragraph after the title, unmodified.
pub fn summarize_lead(item: &NewsItem) -> Result<String> {
    item.paragraphs
        .first()
        .cloned()
        .ok_or_else(|| Error::validation(format!("news item '{}' has no body paragraphs", item.id)))
}

impl TryFrom<NewsDocument> for NewsItem {
    type Error = Error;

    fn try_from(doc: NewsDocument) -> Result<Self> {
        if doc.id.trim().is_empty() {
            return Err(Error::validation("news item without id"));
        }
        let mut item = NewsItem {
            id: doc.id,
            topic: doc.topic,
            title: doc.title,
            paragraphs: split_paragraphs(&doc.body),
            summary: String::new(),
            published: doc.published,
            source: doc.source,
        };
        item.summary = summarize_lead(&item)?;
        Ok(item)
    }
}

impl NewsItem {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<NewsDocument>(text)?.try_into()
    }

    pub fn to_document(&self) -> NewsDocument {
        NewsDocument {
            id: self.id.clone(),
            topic: self.topic,
            title: self.title.clone(),
            body: self.paragraphs.join("\n\n"),
            published: self.published,
            source: self.source.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SourceDescriptor {
    /// A directory of `*.json` news documents.
    Directory { path: PathBuf },
    /// An HTTP endpoint answering with a JSON array of news documents.
    Remote {
        base_url: String,
        topic_param: String,
        date_param: String,
    },
}

#[derive(Debug, Default)]
pub struct FetchOutcome {
    pub items: Vec<NewsItem>,
    /// One message per skipped item.
    pub warnings: Vec<String>,
}

/// Fetches items, optionally restricted to a topic and a first publication date.
pub fn fetch_news(
    source: &SourceDescriptor,
    topic: Option<Topic>,
    since: Option<NaiveDate>,
) -> Result<FetchOutcome> {
    let mut outcome = match source {
        SourceDescriptor::Directory { path } => fetch_directory(path)?,
        SourceDescriptor::Remote {
            base_url,
            topic_param,
            date_param,
        } => fetch_remote(base_url, topic_param, date_param, topic, since)?,
    };
    outcome
        .items
        .retain(|i| topic.is_none_or(|t| i.topic == t) && since.is_none_or(|d| i.published >= d));
    for w in &outcome.warnings {
        log::warn!("{w}");
    }
    Ok(outcome)
}

fn fetch_directory(dir: &Path) -> Result<FetchOutcome> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut outcome = FetchOutcome::default();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        match NewsItem::from_json(&text) {
            Ok(item) => outcome.items.push(item),
            Err(e) => outcome
                .warnings
                .push(format!("skipping {}: {e}", path.display())),
        }
    }
    Ok(outcome)
}

fn fetch_remote(
    base_url: &str,
    topic_param: &str,
    date_param: &str,
    topic: Option<Topic>,
    since: Option<NaiveDate>,
) -> Result<FetchOutcome> {
    let transport = |message: String| Error::Transport {
        url: base_url.to_string(),
        message,
    };
    let mut request = ureq::get(base_url);
    if let Some(t) = topic {
        request = request.query(topic_param, t.as_str());
    }
    if let Some(d) = since {
        request = request.query(date_param, d.to_string());
    }
    let mut response = request.call().map_err(|e| transport(e.to_string()))?;
    let body = response
        .body_mut()
        .read_to_string()
        .map_err(|e| transport(e.to_string()))?;
    let values: Vec<serde_json::Value> = serde_json::from_str(&body)?;
    let mut outcome = FetchOutcome::default();
    for (i, value) in values.into_iter().enumerate() {
        match serde_json::from_value::<NewsDocument>(value)
            .map_err(Error::from)
            .and_then(NewsItem::try_from)
        {
            Ok(item) => outcome.items.push(item),
            Err(e) => outcome
                .warnings
                .push(format!("skipping remote item {i}: {e}")),
        }
    }
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub id: String,
    pub topic: Topic,
    pub published: NaiveDate,
}

/// Directory store: one JSON file per item plus `index.json`.
#[derive(Debug, Clone)]
pub struct NewsStore {
    root: PathBuf,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NewsQuery {
    pub topic: Option<Topic>,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
}

impl NewsStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("items")).map_err(|e| Error::io(&root, e))?;
        Ok(NewsStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn item_path(&self, id: &str) -> PathBuf {
        self.root
            .join("items")
            .join(format!("{}.json", file_safe(id)))
    }

    fn index_path(&self) -> PathBuf {
        self.root.join("index.json")
    }

    pub fn index(&self) -> Result<Vec<IndexEntry>> {
        let path = self.index_path();
        match fs::read_to_string(&path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    /// Stores items (replacing same ids) and publishes a new index.
    pub fn put_all(&self, items: &[NewsItem]) -> Result<()> {
        let mut index = self.index()?;
        for item in items {
            write_atomic(&self.item_path(&item.id), &serde_json::to_vec_pretty(item)?)?;
            index.retain(|e| e.id != item.id);
            index.push(IndexEntry {
                id: item.id.clone(),
                topic: item.topic,
                published: item.published,
            });
        }
        sort_entries(&mut index);
        write_atomic(&self.index_path(), &serde_json::to_vec_pretty(&index)?)
    }

    pub fn get(&self, id: &str) -> Result<NewsItem> {
        let path = self.item_path(id);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Err(Error::NotFound(format!("news item '{id}'")))
            }
            Err(e) => Err(Error::io(path, e)),
        }
    }

    /// Items matching every given filter, newest first then by id.
    pub fn query(&self, query: &NewsQuery) -> Result<Vec<NewsItem>> {
        self.index()?
            .into_iter()
            .filter(|e| {
                query.topic.is_none_or(|t| e.topic == t)
                    && query.from.is_none_or(|d| e.published >= d)
                    && query.to.is_none_or(|d| e.published <= d)
            })
            .map(|e| self.get(&e.id))
            .collect()
    }
}

/// Same as [`NewsStore::query`].
pub fn query_index(store: &NewsStore, query: &NewsQuery) -> Result<Vec<NewsItem>> {
    store.query(query)
}

fn sort_entries(index: &mut [IndexEntry]) {
    index.sort_by(|a, b| b.published.cmp(&a.published).then_with(|| a.id.cmp(&b.id)));
}

fn file_safe(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes through a temporary sibling and renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp-{}", uuid::Uuid::new_v4().simple()));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Fixture documents shipped with the crate.
pub fn bundled_news() -> Vec<NewsItem> {
    const DOCS: &[&str] = &[
        include_str!("../data/news/2021-06-01-economy-aid.json"),
        include_str!("../data/news/2021-06-02-science-virus.json"),
        include_str!("../data/news/2021-06-03-politics-bonds.json"),
        include_str!("../data/news/2021-06-04-society-drugs.json"),
        include_str!("../data/news/2021-06-05-sports-celta.json"),
    ];
    DOCS.iter()
        .map(|d| NewsItem::from_json(d).expect("bundled news is valid"))
        .collect()
}

/// Directory holding the bundled fixture documents.
pub fn bundled_news_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join("news")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: &str, topic: Topic, date: &str, body: &str) -> NewsItem {
        NewsDocument {
            id: id.into(),
            topic,
            title: "t".into(),
            body: body.into(),
            published: date.parse().unwrap(),
            source: "test".into(),
        }
        .try_into()
        .unwrap()
    }

    #[test]
    fn paragraphs_and_lead() {
        let i = item(
            "a",
            Topic::Science,
            "2021-01-01",
            "One.\n\n\nTwo\nlines.\n\nThree.",
        );
        assert_eq!(i.paragraphs, ["One.", "Two\nlines.", "Three."]);
        assert_eq!(summarize_lead(&i).unwrap(), "One.");
        let doc = NewsDocument {
            body: "   \n".into(),
            ..i.to_document()
        };
        assert!(matches!(NewsItem::try_from(doc), Err(Error::Validation(_))));
    }

    #[test]
    fn topics_parse() {
        assert_eq!("Sports".parse::<Topic>().unwrap(), Topic::Sports);
        assert!("weather".parse::<Topic>().is_err());
    }

    #[test]
    fn bundled_items_have_leads() {
        let news = bundled_news();
        assert_eq!(news.len(), 5);
        let drugs = news.iter().find(|i| i.topic == Topic::Society).unwrap();
        assert!(drugs.summary.starts_with("National Police has dismantled"));
    }

    #[test]
    fn store_orders_newest_first() {
        let dir = tempfile::tempdir().unwrap();
        let store = NewsStore::open(dir.path()).unwrap();
        assert!(store.query(&NewsQuery::default()).unwrap().is_empty());
        store
            .put_all(&[
                item("b", Topic::Sports, "2021-06-05", "x"),
                item("a", Topic::Society, "2021-06-05", "y"),
                item("c", Topic::Society, "2021-06-01", "z"),
            ])
            .unwrap();
        let ids: Vec<_> = store
            .query(&NewsQuery::default())
            .unwrap()
            .into_iter()
            .map(|i| i.id)
            .collect();
        assert_eq!(ids, ["a", "b", "c"]);
        let society = store
            .query(&NewsQuery {
                topic: Some(Topic::Society),
                from: Some("2021-06-02".parse().unwrap()),
                to: None,
            })
            .unwrap();
        assert_eq!(society.len(), 1);
        assert_eq!(society[0].id, "a");
        assert!(matches!(store.get("nope"), Err(Error::NotFound(_))));
    }
}
