//! Lexical resource: entries with semantic categories and relations, plus the
//! relation graph used to measure conceptual distance between two words.
//!
//! The on-disk format is one JSON object per line. Relation targets are written
//! as `"lemma#pos"` strings and must name another record in the same file.
//! Lines starting with `#` are comments.
//!
//! ```text
//! {"lemma":"montaña","pos":"noun","stem":"montañ","surface_forms":["montañas"],
//!  "wordnet_domain":"object","adimen_sumo":"LandArea","top_ontology":["geography"],
//!  "synonyms":["monte#noun"],"hypernyms":["elevación#noun"], ...}
//! ```

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::text::normalize;

const BUNDLED_LEXICON: &str = include_str!("../data/lexicon.jsonl");

/// Default maximum number of taxonomy hops explored before a pair is unreachable.
pub const DEFAULT_PATH_CAP: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adjective => "adjective",
            Pos::Adverb => "adverb",
        }
    }

    /// Nouns and verbs carry the full set of hierarchies and relations.
    pub fn is_major(self) -> bool {
        matches!(self, Pos::Noun | Pos::Verb)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "noun" => Ok(Pos::Noun),
            "verb" => Ok(Pos::Verb),
            "adjective" => Ok(Pos::Adjective),
            "adverb" => Ok(Pos::Adverb),
            other => Err(format!("unknown part of speech {other:?}")),
        }
    }
}

/// Identity of a lexical entry: the lemma as written plus its category.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexKey {
    pub lemma: String,
    pub pos: Pos,
}

impl LexKey {
    pub fn new(lemma: impl Into<String>, pos: Pos) -> Self {
        LexKey {
            lemma: lemma.into(),
            pos,
        }
    }
}

impl fmt::Display for LexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.lemma, self.pos)
    }
}

impl FromStr for LexKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lemma, pos) = s
            .rsplit_once('#')
            .ok_or_else(|| format!("relation reference {s:?} is not of the form lemma#pos"))?;
        if lemma.trim().is_empty() {
            return Err(format!("relation reference {s:?} has an empty lemma"));
        }
        Ok(LexKey::new(lemma, pos.parse()?))
    }
}

impl Serialize for LexKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LexKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Ways two entries can be directly linked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Synonym,
    Hypernym,
    Hyponym,
    Holonym,
    Meronym,
    Related,
    /// Same Adimen SUMO label (nouns, verbs) or a common top-ontology label
    /// (adjectives, adverbs).
    SharedCategory,
    /// An entry compared with itself.
    SynonymReflexive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexEntry {
    pub lemma: String,
    pub pos: Pos,
    pub stem: String,
    #[serde(default)]
    pub surface_forms: BTreeSet<String>,
    #[serde(default)]
    pub wordnet_domain: Option<String>,
    #[serde(default)]
    pub adimen_sumo: Option<String>,
    #[serde(default)]
    pub top_ontology: BTreeSet<String>,
    #[serde(default)]
    pub synonyms: BTreeSet<LexKey>,
    #[serde(default)]
    pub hypernyms: BTreeSet<LexKey>,
    #[serde(default)]
    pub hyponyms: BTreeSet<LexKey>,
    #[serde(default)]
    pub holonyms: BTreeSet<LexKey>,
    #[serde(default)]
    pub meronyms: BTreeSet<LexKey>,
    #[serde(default)]
    pub related: BTreeSet<LexKey>,
}

impl LexEntry {
    pub fn new(lemma: impl Into<String>, pos: Pos, stem: impl Into<String>) -> Self {
        LexEntry {
            lemma: lemma.into(),
            pos,
            stem: stem.into(),
            surface_forms: BTreeSet::new(),
            wordnet_domain: None,
            adimen_sumo: None,
            top_ontology: BTreeSet::new(),
            synonyms: BTreeSet::new(),
            hypernyms: BTreeSet::new(),
            hyponyms: BTreeSet::new(),
            holonyms: BTreeSet::new(),
            meronyms: BTreeSet::new(),
            related: BTreeSet::new(),
        }
    }

    pub fn key(&self) -> LexKey {
        LexKey::new(self.lemma.clone(), self.pos)
    }

    fn relation_sets(&self) -> [(Relation, &BTreeSet<LexKey>); 6] {
        [
            (Relation::Synonym, &self.synonyms),
            (Relation::Hypernym, &self.hypernyms),
            (Relation::Hyponym, &self.hyponyms),
            (Relation::Holonym, &self.holonyms),
            (Relation::Meronym, &self.meronyms),
            (Relation::Related, &self.related),
        ]
    }
}

/// Strips the longest matching suffix from a normalized word. Used to stem
/// out-of-vocabulary words; in-vocabulary stems come from the lexicon file.
#[derive(Debug, Clone)]
pub struct SuffixStemmer {
    suffixes: Vec<String>,
    min_root: usize,
}

impl SuffixStemmer {
    pub fn new<I, S>(suffixes: I, min_root: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut suffixes: Vec<String> = suffixes
            .into_iter()
            .map(|s| normalize(s.as_ref()))
            .filter(|s| !s.is_empty())
            .collect();
        suffixes.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
        suffixes.dedup();
        SuffixStemmer { suffixes, min_root }
    }

    pub fn stem(&self, word: &str) -> String {
        let word = normalize(word);
        let len = word.chars().count();
        for suffix in &self.suffixes {
            if word.ends_with(suffix.as_str()) && len - suffix.chars().count() >= self.min_root {
                return word[..word.len() - suffix.len()].to_string();
            }
        }
        word
    }
}

impl Default for SuffixStemmer {
    fn default() -> Self {
        SuffixStemmer::new(
            [
                "amiento", "imiento", "aciones", "ación", "ciones", "ción", "istas", "ista",
                "eros", "eras", "ero", "era", "ería", "mente", "idad", "ness", "ment", "tion",
                "ers", "er", "ing", "ed", "es", "s", "os", "as", "o", "a", "e",
            ],
            3,
        )
    }
}

/// Undirected relation graph over the loaded entries.
///
/// Hypernym/hyponym edges cost one hop each. Synonym edges cost nothing, so a
/// word and its synonyms share a position in the taxonomy. The remaining
/// relations are kept as adjacency for inspection but do not shorten paths.
#[derive(Debug, Clone)]
pub struct LexicalGraph {
    taxonomy: Vec<Vec<usize>>,
    synonym: Vec<Vec<usize>>,
    relation: Vec<Vec<usize>>,
    path_cap: u32,
}

impl LexicalGraph {
    fn build(entries: &[LexEntry], index: &HashMap<LexKey, usize>, path_cap: u32) -> Self {
        let n = entries.len();
        let mut taxonomy = vec![Vec::new(); n];
        let mut synonym = vec![Vec::new(); n];
        let mut relation = vec![Vec::new(); n];
        for (i, entry) in entries.iter().enumerate() {
            for key in entry.hypernyms.iter().chain(&entry.hyponyms) {
                taxonomy[i].push(index[key]);
            }
            for key in &entry.synonyms {
                synonym[i].push(index[key]);
            }
            for key in entry
                .holonyms
                .iter()
                .chain(&entry.meronyms)
                .chain(&entry.related)
            {
                let j = index[key];
                relation[i].push(j);
                relation[j].push(i);
            }
        }
        for adj in taxonomy.iter_mut().chain(&mut synonym).chain(&mut relation) {
            adj.sort_unstable();
            adj.dedup();
        }
        LexicalGraph {
            taxonomy,
            synonym,
            relation,
            path_cap,
        }
    }

    pub fn node_count(&self) -> usize {
        self.taxonomy.len()
    }

    pub fn path_cap(&self) -> u32 {
        self.path_cap
    }

    pub fn taxonomy_neighbors(&self, node: usize) -> &[usize] {
        &self.taxonomy[node]
    }

    pub fn relation_neighbors(&self, node: usize) -> &[usize] {
        &self.relation[node]
    }

    /// Minimum number of taxonomy edges between two nodes, or `None` beyond the cap.
    pub fn hops(&self, from: usize, to: usize) -> Option<u32> {
        if from == to {
            return Some(0);
        }
        // 0-1 breadth-first search: synonym edges are free, taxonomy edges cost one.
        let mut dist = vec![u32::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        dist[from] = 0;
        queue.push_back(from);
        while let Some(node) = queue.pop_front() {
            let d = dist[node];
            if node == to {
                return Some(d);
            }
            for &next in &self.synonym[node] {
                if d < dist[next] {
                    dist[next] = d;
                    queue.push_front(next);
                }
            }
            if d == self.path_cap {
                continue;
            }
            for &next in &self.taxonomy[node] {
                if d + 1 < dist[next] {
                    dist[next] = d + 1;
                    queue.push_back(next);
                }
            }
        }
        None
    }
}

/// An immutable, validated lexical resource.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    index: HashMap<LexKey, usize>,
    forms: HashMap<String, Vec<usize>>,
    graph: LexicalGraph,
    stemmer: SuffixStemmer,
}

impl Lexicon {
    /// Reads line-delimited records and validates them.
    pub fn load(source: impl BufRead) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in source.lines().enumerate() {
            let line_no = n + 1;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let entry: LexEntry = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            entries.push(entry);
        }
        Self::from_entries(entries)
    }

    pub fn load_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::load(std::io::BufReader::new(file))
    }

    /// The fixture lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Self::load(BUNDLED_LEXICON.as_bytes()).expect("bundled lexicon is valid")
    }

    pub fn from_entries(entries: Vec<LexEntry>) -> Result<Self> {
        Self::with_path_cap(entries, DEFAULT_PATH_CAP)
    }

    pub fn with_path_cap(mut entries: Vec<LexEntry>, path_cap: u32) -> Result<Self> {
        entries.sort_by_key(LexEntry::key);
        let mut index = HashMap::with_capacity(entries.len());
        for (i, entry) in entries.iter().enumerate() {
            if entry.lemma.trim().is_empty() {
                return Err(Error::validation("entry with an empty lemma"));
            }
            if index.insert(entry.key(), i).is_some() {
                return Err(Error::validation(format!(
                    "duplicate entry {}",
                    entry.key()
                )));
            }
        }
        for entry in &entries {
            validate_entry(entry, &index)?;
        }
        symmetrize(&mut entries, &index);
        for entry in &entries {
            if !entry.pos.is_major() {
                check_minor_shape(entry)?;
            }
        }

        let mut forms: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, entry) in entries.iter().enumerate() {
            let keys = std::iter::once(&entry.lemma).chain(&entry.surface_forms);
            for form in keys {
                let ids = forms.entry(normalize(form)).or_default();
                if !ids.contains(&i) {
                    ids.push(i);
                }
            }
        }

        let graph = LexicalGraph::build(&entries, &index, path_cap);
        Ok(Lexicon {
            entries,
            index,
            forms,
            graph,
            stemmer: SuffixStemmer::default(),
        })
    }

    pub fn with_stemmer(mut self, stemmer: SuffixStemmer) -> Self {
        self.stemmer = stemmer;
        self
    }

    /// Writes every entry (with symmetrized relations) in the load format.
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for entry in &self.entries {
            serde_json::to_writer(&mut out, entry)?;
            out.write_all(b"\n")
                .map_err(|e| Error::io("<lexicon output>", e))?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn graph(&self) -> &LexicalGraph {
        &self.graph
    }

    pub fn get(&self, key: &LexKey) -> Option<&LexEntry> {
        self.index.get(key).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, key: &LexKey) -> bool {
        self.index.contains_key(key)
    }

    fn node(&self, key: &LexKey) -> Result<usize> {
        self.index
            .get(key)
            .copied()
            .ok_or_else(|| Error::NotFound(format!("lexical entry {key}")))
    }

    /// Entries whose lemma or a surface form matches the normalized token,
    /// ordered noun, verb, adjective, adverb.
    pub fn lookup(&self, token: &str, pos_hint: Option<Pos>) -> Vec<&LexEntry> {
        let key = normalize(token.trim());
        if key.is_empty() {
            return Vec::new();
        }
        let mut found: Vec<&LexEntry> = self
            .forms
            .get(&key)
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
            .filter(|e| pos_hint.is_none_or(|p| e.pos == p))
            .collect();
        found.sort_by(|a, b| a.pos.cmp(&b.pos).then_with(|| a.lemma.cmp(&b.lemma)));
        found
    }

    /// Stem from the lexicon when the word is known, otherwise from the
    /// fallback suffix stripper.
    pub fn stem_of(&self, token: &str) -> String {
        match self.lookup(token, None).first() {
            Some(entry) => normalize(&entry.stem),
            None => self.stemmer.stem(token),
        }
    }

    /// Every relation linking `a` and `b`, from `a`'s point of view.
    pub fn direct_relation(&self, a: &LexKey, b: &LexKey) -> Result<BTreeSet<Relation>> {
        let ea = &self.entries[self.node(a)?];
        let eb = &self.entries[self.node(b)?];
        let mut out = BTreeSet::new();
        if a == b {
            out.insert(Relation::SynonymReflexive);
        }
        for (relation, set) in ea.relation_sets() {
            if set.contains(b) {
                out.insert(relation);
            }
        }
        // Relations are stored symmetrically except `related`, which may point
        // across categories.
        if eb.related.contains(a) {
            out.insert(Relation::Related);
        }
        if shares_category(ea, eb) {
            out.insert(Relation::SharedCategory);
        }
        Ok(out)
    }

    /// Conceptual distance `d`: zero for directly related pairs, otherwise the
    /// number of intermediate concepts on the shortest taxonomy path
    /// (`hops - 1`). `None` when no path exists within the hop cap.
    pub fn shortest_path(&self, a: &LexKey, b: &LexKey) -> Result<Option<u32>> {
        let (ia, ib) = (self.node(a)?, self.node(b)?);
        if !self.direct_relation(a, b)?.is_empty() {
            return Ok(Some(0));
        }
        Ok(self.graph.hops(ia, ib).map(|h| h.saturating_sub(1)))
    }

    /// Raw taxonomy hop count between two entries.
    pub fn taxonomy_hops(&self, a: &LexKey, b: &LexKey) -> Result<Option<u32>> {
        Ok(self.graph.hops(self.node(a)?, self.node(b)?))
    }
}

fn shares_category(a: &LexEntry, b: &LexEntry) -> bool {
    match (a.pos.is_major(), b.pos.is_major()) {
        (true, true) => a.adimen_sumo.is_some() && a.adimen_sumo == b.adimen_sumo,
        (false, false) => a
            .top_ontology
            .intersection(&b.top_ontology)
            .next()
            .is_some(),
        _ => false,
    }
}

fn validate_entry(entry: &LexEntry, index: &HashMap<LexKey, usize>) -> Result<()> {
    let key = entry.key();
    for (relation, set) in entry.relation_sets() {
        for target in set {
            if !index.contains_key(target) {
                return Err(Error::validation(format!(
                    "{key} lists {relation:?} {target}, which is not in the lexicon"
                )));
            }
            if relation != Relation::Related && target.pos != entry.pos {
                return Err(Error::validation(format!(
                    "{key} lists {relation:?} {target} of a different category"
                )));
            }
            if relation != Relation::Related && *target == key {
                return Err(Error::validation(format!(
                    "{key} lists itself as {relation:?}"
                )));
            }
        }
    }
    if !entry.pos.is_major() {
        check_minor_shape(entry)?;
    }
    Ok(())
}

/// Adjectives and adverbs carry only top-ontology labels and synonyms.
fn check_minor_shape(entry: &LexEntry) -> Result<()> {
    let extra = entry.wordnet_domain.is_some()
        || entry.adimen_sumo.is_some()
        || !entry.hypernyms.is_empty()
        || !entry.hyponyms.is_empty()
        || !entry.holonyms.is_empty()
        || !entry.meronyms.is_empty()
        || !entry.related.is_empty();
    if extra {
        return Err(Error::validation(format!(
            "{} is an {} and may only carry top_ontology and synonyms",
            entry.key(),
            entry.pos
        )));
    }
    Ok(())
}

fn symmetrize(entries: &mut [LexEntry], index: &HashMap<LexKey, usize>) {
    let mut additions: Vec<(usize, Relation, LexKey)> = Vec::new();
    for entry in entries.iter() {
        let key = entry.key();
        for (relation, set) in entry.relation_sets() {
            let inverse = match relation {
                Relation::Synonym => Relation::Synonym,
                Relation::Hypernym => Relation::Hyponym,
                Relation::Hyponym => Relation::Hypernym,
                Relation::Holonym => Relation::Meronym,
                Relation::Meronym => Relation::Holonym,
                _ => continue,
            };
            for target in set {
                additions.push((index[target], inverse, key.clone()));
            }
        }
    }
    for (i, relation, key) in additions {
        let entry = &mut entries[i];
        let set = match relation {
            Relation::Synonym => &mut entry.synonyms,
            Relation::Hypernym => &mut entry.hypernyms,
            Relation::Hyponym => &mut entry.hyponyms,
            Relation::Holonym => &mut entry.holonyms,
            Relation::Meronym => &mut entry.meronyms,
            _ => unreachable!(),
        };
        set.insert(key);
    }
}
