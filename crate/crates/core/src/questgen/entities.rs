//! Gazetteer lookup plus a capitalization heuristic for named entities.

use std::fmt;
use std::io::BufRead;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{split_sentences, tokenize, FunctionWords, RawKind, RawToken};
use crate::error::{Error, Result};
use crate::text::{is_capitalized, normalize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Person,
    Location,
    Organisation,
}

impl FromStr for EntityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "person" => Ok(EntityKind::Person),
            "location" => Ok(EntityKind::Location),
            "organisation" | "organization" => Ok(EntityKind::Organisation),
            other => Err(Error::validation(format!("unknown entity kind '{other}'"))),
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::Person => "person",
            EntityKind::Location => "location",
            EntityKind::Organisation => "organisation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub surface: String,
    pub kind: EntityKind,
    /// Byte offsets into the searched text.
    pub span: Range<usize>,
}

#[derive(Debug, Clone)]
struct GazetteerEntry {
    tokens: Vec<String>,
    kind: EntityKind,
}

/// Known names, matched on normalized token sequences.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    // Longest entries first so the first hit is the longest match.
    entries: Vec<GazetteerEntry>,
}

const BUNDLED: &str = include_str!("../../data/gazetteer.tsv");

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bundled() -> Self {
        Self::load(BUNDLED.as_bytes()).expect("bundled gazetteer is valid")
    }

    /// Reads `kind<TAB>surface` lines; blank lines and `#` comments are skipped.
    pub fn load(reader: impl BufRead) -> Result<Self> {
        let mut gazetteer = Gazetteer::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((kind, surface)) = line.split_once('\t') else {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "expected kind<TAB>surface".into(),
                });
            };
            let kind = kind.parse().map_err(|e: Error| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            gazetteer.insert(kind, surface.trim());
        }
        Ok(gazetteer)
    }

    pub fn load_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::load(std::io::BufReader::new(file))
    }

    pub fn insert(&mut self, kind: EntityKind, surface: &str) {
        let tokens: Vec<String> = tokenize(surface)
            .iter()
            .map(|t| normalize(t.text))
            .collect();
        if tokens.is_empty() {
            return;
        }
        let at = self
            .entries
            .partition_point(|e| e.tokens.len() >= tokens.len());
        self.entries.insert(at, GazetteerEntry { tokens, kind });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn longest_match(&self, normalized: &[String]) -> Option<(usize, EntityKind)> {
        self.entries
            .iter()
            .find(|e| normalized.starts_with(&e.tokens))
            .map(|e| (e.tokens.len(), e.kind))
    }

    pub fn find_entities(&self, text: &str) -> Vec<Entity> {
        find_entities(text, self)
    }
}

/// Gazetteer matches (longest first) plus capitalized multi-word sequences
/// that do not open a sentence; the latter default to persons.
pub fn find_entities(text: &str, gazetteer: &Gazetteer) -> Vec<Entity> {
    let words = FunctionWords::default();
    let mut entities = Vec::new();
    for sentence in split_sentences(tokenize(text)) {
        let normalized: Vec<String> = sentence.iter().map(|t| normalize(t.text)).collect();
        let mut i = 0;
        while i < sentence.len() {
            if let Some((len, kind)) = gazetteer.longest_match(&normalized[i..]) {
                entities.push(entity(text, &sentence[i..i + len], kind));
                i += len;
                continue;
            }
            let run = capitalized_run(&sentence[i..]);
            if run == 0 {
                i += 1;
                continue;
            }
            // A capitalized sentence opener is only a name if something
            // other than a function word follows the article.
            let mut start = i;
            if start == 0 {
                if words.category(&normalized[0]).is_none() {
                    i += run;
                    continue;
                }
                start += 1;
            }
            let end = i + run;
            // Stop early if a gazetteer name begins inside the run.
            let end = (start..end)
                .find(|&j| j > start && gazetteer.longest_match(&normalized[j..]).is_some())
                .unwrap_or(end);
            if end - start >= 2 {
                entities.push(entity(text, &sentence[start..end], EntityKind::Person));
            }
            i = end;
        }
    }
    entities
}

fn capitalized_run(tokens: &[RawToken<'_>]) -> usize {
    tokens
        .iter()
        .take_while(|t| t.kind == RawKind::Word && is_capitalized(t.text))
        .count()
}

fn entity(text: &str, tokens: &[RawToken<'_>], kind: EntityKind) -> Entity {
    let span = tokens[0].span.start..tokens[tokens.len() - 1].span.end;
    Entity {
        surface: text[span.clone()].to_string(),
        kind,
        span,
    }
}
