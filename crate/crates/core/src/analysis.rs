//! Rule-based shallow analysis: tokenization, sentence splitting, category
//! tagging from the lexicon and closed-class word lists, noun-phrase chunks,
//! verb groups and quantities.
//!
//! Tagging priority for words with several lexicon entries is
//! noun > verb > adjective > adverb. Unknown capitalized words are tagged as
//! proper nouns; other unknown words as [`Category::Other`].

use std::collections::HashMap;
use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{LexKey, Lexicon, Pos};
use crate::similarity::{NumberMention, Qualifier};
use crate::text::{is_capitalized, normalize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Number,
    Determiner,
    Pronoun,
    Preposition,
    Conjunction,
    Auxiliary,
    Punctuation,
    Other,
}

impl Category {
    pub fn pos(self) -> Option<Pos> {
        match self {
            Category::Noun => Some(Pos::Noun),
            Category::Verb => Some(Pos::Verb),
            Category::Adjective => Some(Pos::Adjective),
            Category::Adverb => Some(Pos::Adverb),
            _ => None,
        }
    }

    pub fn is_verbal(self) -> bool {
        matches!(self, Category::Verb | Category::Auxiliary)
    }
}

impl From<Pos> for Category {
    fn from(pos: Pos) -> Self {
        match pos {
            Pos::Noun => Category::Noun,
            Pos::Verb => Category::Verb,
            Pos::Adjective => Category::Adjective,
            Pos::Adverb => Category::Adverb,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub category: Category,
    /// Entry chosen by the priority rule, when the word is in the lexicon.
    pub lemma: Option<LexKey>,
    /// Every entry the word form matched.
    pub candidates: Vec<LexKey>,
    /// Unknown capitalized word treated as a proper noun.
    pub proper: bool,
    pub number: Option<NumberMention>,
    /// Byte offsets into the analyzed text.
    pub span: Range<usize>,
}

impl Token {
    pub fn is_content(&self) -> bool {
        matches!(
            self.category,
            Category::Noun
                | Category::Verb
                | Category::Adjective
                | Category::Adverb
                | Category::Number
        )
    }

    pub fn in_vocabulary(&self) -> bool {
        self.lemma.is_some()
    }

    /// Lexicon key, or a synthetic key from the normalized form for unknown
    /// content words.
    pub fn key(&self) -> Option<LexKey> {
        match (&self.lemma, self.category.pos()) {
            (Some(key), _) => Some(key.clone()),
            (None, Some(pos)) => Some(LexKey::new(self.normalized.clone(), pos)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzedSentence {
    pub text: String,
    pub tokens: Vec<Token>,
    /// Token index ranges of noun phrases, ordered and non-overlapping.
    pub np_chunks: Vec<Range<usize>>,
    /// Token index ranges of `auxiliary* adverb* verb` groups.
    pub verb_groups: Vec<Range<usize>>,
    pub finite_verb_index: Option<usize>,
    pub numbers: Vec<NumberMention>,
    pub source_span: Range<usize>,
}

impl AnalyzedSentence {
    /// Original text covered by a token range.
    pub fn slice(&self, tokens: Range<usize>) -> &str {
        if tokens.is_empty() {
            return "";
        }
        let start = self.tokens[tokens.start].span.start - self.source_span.start;
        let end = self.tokens[tokens.end - 1].span.end - self.source_span.start;
        &self.text[start..end]
    }

    /// Noun-phrase chunk ending right before `token`, if any.
    pub fn chunk_ending_at(&self, token: usize) -> Option<Range<usize>> {
        self.np_chunks.iter().find(|c| c.end == token).cloned()
    }

    pub fn chunk_containing(&self, token: usize) -> Option<Range<usize>> {
        self.np_chunks.iter().find(|c| c.contains(&token)).cloned()
    }

    /// Merges several sentences into one token stream (for scoring).
    pub fn merge(sentences: &[AnalyzedSentence]) -> AnalyzedSentence {
        let Some(first) = sentences.first() else {
            return AnalyzedSentence::empty();
        };
        let last = sentences.last().unwrap();
        let mut merged = AnalyzedSentence {
            text: String::new(),
            tokens: Vec::new(),
            np_chunks: Vec::new(),
            verb_groups: Vec::new(),
            finite_verb_index: None,
            numbers: Vec::new(),
            source_span: first.source_span.start..last.source_span.end,
        };
        for s in sentences {
            let offset = merged.tokens.len();
            let shift = |r: &Range<usize>| r.start + offset..r.end + offset;
            merged.np_chunks.extend(s.np_chunks.iter().map(shift));
            merged.verb_groups.extend(s.verb_groups.iter().map(shift));
            if merged.finite_verb_index.is_none() {
                merged.finite_verb_index = s.finite_verb_index.map(|i| i + offset);
            }
            merged.numbers.extend(s.numbers.iter().copied());
            merged.tokens.extend(s.tokens.iter().cloned());
        }
        let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
        merged.text = texts.join(" ");
        // The joined text no longer lines up with the original offsets.
        merged.source_span = 0..merged.text.len();
        let mut cursor = 0;
        let mut idx = 0;
        for s in sentences {
            let base = s.source_span.start;
            for _ in &s.tokens {
                let t = &mut merged.tokens[idx];
                t.span = t.span.start - base + cursor..t.span.end - base + cursor;
                idx += 1;
            }
            cursor += s.text.len() + 1;
        }
        merged
    }

    pub fn empty() -> AnalyzedSentence {
        AnalyzedSentence {
            text: String::new(),
            tokens: Vec::new(),
            np_chunks: Vec::new(),
            verb_groups: Vec::new(),
            finite_verb_index: None,
            numbers: Vec::new(),
            source_span: 0..0,
        }
    }

    pub fn content_word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_content()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RawKind {
    Word,
    Number,
    Punct,
}

#[derive(Debug, Clone)]
pub(crate) struct RawToken<'t> {
    pub text: &'t str,
    pub kind: RawKind,
    pub span: Range<usize>,
}

static TOKEN_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?x)
        (?P<num>\d{1,3}(?:[.,]\d{3})+(?:st|nd|rd|th)?\b|\d+(?:st|nd|rd|th)?\b|\d+)
        |(?P<word>\p{L}[\p{L}\p{M}]*(?:-\p{L}[\p{L}\p{M}]*)*)
        |(?P<punct>[^\s\p{L}\p{N}])",
    )
    .expect("token pattern compiles")
});

pub(crate) fn tokenize(text: &str) -> Vec<RawToken<'_>> {
    TOKEN_RE
        .captures_iter(text)
        .map(|c| {
            let (m, kind) = if let Some(m) = c.name("num") {
                (m, RawKind::Number)
            } else if let Some(m) = c.name("word") {
                (m, RawKind::Word)
            } else {
                (c.name("punct").unwrap(), RawKind::Punct)
            };
            RawToken {
                text: m.as_str(),
                kind,
                span: m.range(),
            }
        })
        .collect()
}

pub(crate) fn is_terminal(token: &str) -> bool {
    matches!(token, "." | "!" | "?" | "…")
}

/// Splits raw tokens into sentences on terminal punctuation.
pub(crate) fn split_sentences<'t>(tokens: Vec<RawToken<'t>>) -> Vec<Vec<RawToken<'t>>> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for token in tokens {
        let terminal = token.kind == RawKind::Punct && is_terminal(token.text);
        current.push(token);
        if terminal {
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

/// Parses `2569`, `1,000`, `500.000` and ordinals such as `15th`.
pub fn parse_numeral(text: &str) -> Option<u64> {
    let digits = text.trim_end_matches(|c: char| c.is_ascii_alphabetic());
    let cleaned: String = digits.chars().filter(|c| c.is_ascii_digit()).collect();
    if cleaned.is_empty() {
        return None;
    }
    cleaned.parse().ok()
}

/// Closed-class vocabularies consulted before the lexicon.
#[derive(Debug, Clone)]
pub struct FunctionWords {
    words: HashMap<String, Category>,
    number_words: HashMap<String, u64>,
    over: Vec<Vec<String>>,
    under: Vec<Vec<String>>,
}

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "these", "those", "some", "any", "each", "every", "his", "her",
    "their", "its", "my", "your", "our", "el", "la", "los", "las", "un", "una", "unos", "unas",
    "su", "sus", "mi", "mis", "tu", "tus", "del", "al", "este", "esta", "estos", "estas", "ese",
    "esa", "esos", "esas", "lo",
];
const PRONOUNS: &[&str] = &[
    "i",
    "you",
    "he",
    "she",
    "it",
    "we",
    "they",
    "me",
    "him",
    "them",
    "us",
    "who",
    "whom",
    "which",
    "what",
    "that",
    "something",
    "anything",
    "nothing",
    "yo",
    "tu",
    "el",
    "ella",
    "nosotros",
    "vosotros",
    "ellos",
    "ellas",
    "que",
    "quien",
    "quienes",
    "le",
    "les",
    "se",
    "me",
    "te",
    "nos",
    "esto",
    "eso",
    "algo",
    "nada",
];
const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "of", "to", "for", "with", "from", "by", "until", "about", "into", "over",
    "under", "against", "during", "since", "after", "before", "through", "between", "due", "like",
    "than", "above", "below", "en", "de", "a", "con", "por", "para", "desde", "hasta", "sin",
    "sobre", "entre", "hacia", "segun", "tras",
];
const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "nor", "so", "because", "if", "y", "e", "o", "u", "pero", "ni", "porque",
    "si", "aunque",
];
const AUXILIARIES: &[&str] = &[
    "has", "have", "had", "having", "will", "would", "is", "are", "was", "were", "be", "been",
    "being", "am", "do", "does", "did", "can", "could", "shall", "should", "may", "might", "must",
    "ha", "han", "he", "hemos", "habia", "habian", "fue", "fueron", "sera", "es", "son", "era",
    "va", "van", "ser", "estar", "esta", "estan",
];
const NUMBER_WORDS: &[(&str, u64)] = &[
    ("zero", 0),
    ("one", 1),
    ("two", 2),
    ("three", 3),
    ("four", 4),
    ("five", 5),
    ("six", 6),
    ("seven", 7),
    ("eight", 8),
    ("nine", 9),
    ("ten", 10),
    ("eleven", 11),
    ("twelve", 12),
    ("twenty", 20),
    ("hundred", 100),
    ("thousand", 1000),
    ("cero", 0),
    ("uno", 1),
    ("dos", 2),
    ("tres", 3),
    ("cuatro", 4),
    ("cinco", 5),
    ("seis", 6),
    ("siete", 7),
    ("ocho", 8),
    ("nueve", 9),
    ("diez", 10),
    ("once", 11),
    ("doce", 12),
    ("veinte", 20),
    ("cien", 100),
    ("mil", 1000),
];

impl Default for FunctionWords {
    fn default() -> Self {
        let mut words = HashMap::new();
        // Later lists win on overlap ("el" ends up a pronoun, "a" a preposition).
        for (list, category) in [
            (PRONOUNS, Category::Pronoun),
            (DETERMINERS, Category::Determiner),
            (PREPOSITIONS, Category::Preposition),
            (CONJUNCTIONS, Category::Conjunction),
            (AUXILIARIES, Category::Auxiliary),
        ] {
            for w in list {
                words.insert(normalize(w), category);
            }
        }
        // English "a" is far more common as an article in the news feed.
        words.insert("a".into(), Category::Determiner);
        words.insert("that".into(), Category::Pronoun);
        let phrases = |xs: &[&str]| -> Vec<Vec<String>> {
            xs.iter()
                .map(|p| p.split_whitespace().map(normalize).collect())
                .collect()
        };
        FunctionWords {
            words,
            number_words: NUMBER_WORDS
                .iter()
                .map(|(w, n)| (normalize(w), *n))
                .collect(),
            over: phrases(&[
                "over",
                "more than",
                "above",
                "más de",
                "más que",
                "at least",
            ]),
            under: phrases(&[
                "under",
                "less than",
                "fewer than",
                "below",
                "menos de",
                "menos que",
            ]),
        }
    }
}

impl FunctionWords {
    pub fn category(&self, normalized: &str) -> Option<Category> {
        self.words.get(normalized).copied()
    }

    pub fn insert(&mut self, word: &str, category: Category) {
        self.words.insert(normalize(word), category);
    }

    /// Adds a phrase that marks the following quantity as a lower bound.
    pub fn add_over_phrase(&mut self, phrase: &str) {
        self.over
            .push(phrase.split_whitespace().map(normalize).collect());
    }

    pub fn add_under_phrase(&mut self, phrase: &str) {
        self.under
            .push(phrase.split_whitespace().map(normalize).collect());
    }

    pub fn number_word(&self, normalized: &str) -> Option<u64> {
        self.number_words.get(normalized).copied()
    }

    /// Qualifier of the numeral at `index`, looking back at most two tokens.
    fn qualifier(&self, normalized: &[String], index: usize) -> Qualifier {
        let window_start = index.saturating_sub(2);
        let matches = |phrases: &[Vec<String>]| {
            phrases.iter().any(|p| {
                (window_start..index).any(|end| {
                    let end = end + 1;
                    end >= p.len()
                        && end - p.len() >= window_start
                        && normalized[end - p.len()..end] == p[..]
                })
            })
        };
        if matches(&self.over) {
            Qualifier::Over
        } else if matches(&self.under) {
            Qualifier::Under
        } else {
            Qualifier::None
        }
    }
}

/// Analyzes text against a lexicon.
#[derive(Debug, Clone)]
pub struct Analyzer<'a> {
    lexicon: &'a Lexicon,
    words: FunctionWords,
}

impl<'a> Analyzer<'a> {
    pub fn new(lexicon: &'a Lexicon) -> Self {
        Analyzer {
            lexicon,
            words: FunctionWords::default(),
        }
    }

    pub fn with_function_words(lexicon: &'a Lexicon, words: FunctionWords) -> Self {
        Analyzer { lexicon, words }
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.lexicon
    }

    pub fn function_words(&self) -> &FunctionWords {
        &self.words
    }

    /// Splits and analyzes text. Empty text violates the contract.
    pub fn analyze(&self, text: &str) -> Result<Vec<AnalyzedSentence>> {
        if text.trim().is_empty() {
            return Err(Error::contract("cannot analyze empty text"));
        }
        Ok(self.analyze_lenient(text))
    }

    /// Like [`analyze`](Self::analyze) but returns nothing for empty text.
    pub fn analyze_lenient(&self, text: &str) -> Vec<AnalyzedSentence> {
        split_sentences(tokenize(text))
            .into_iter()
            .map(|raw| self.sentence(text, raw))
            .collect()
    }

    /// Analyzes a free-text answer as a single token stream.
    pub fn analyze_answer(&self, text: &str) -> AnalyzedSentence {
        AnalyzedSentence::merge(&self.analyze_lenient(text))
    }

    fn sentence(&self, text: &str, raw: Vec<RawToken<'_>>) -> AnalyzedSentence {
        let source_span = raw.first().unwrap().span.start..raw.last().unwrap().span.end;
        let normalized: Vec<String> = raw.iter().map(|t| normalize(t.text)).collect();
        let mut tokens: Vec<Token> = raw
            .iter()
            .zip(&normalized)
            .map(|(t, n)| self.tag(t, n))
            .collect();

        let mut numbers = Vec::new();
        for (i, token) in tokens.iter_mut().enumerate() {
            if let Some(number) = token.number.as_mut() {
                number.qualifier = self.words.qualifier(&normalized, i);
                numbers.push(*number);
            }
        }

        let np_chunks = chunk_noun_phrases(&tokens);
        let verb_groups = find_verb_groups(&tokens);
        let finite_verb_index = verb_groups.first().map(|g| g.start);
        AnalyzedSentence {
            text: text[source_span.clone()].to_string(),
            tokens,
            np_chunks,
            verb_groups,
            finite_verb_index,
            numbers,
            source_span,
        }
    }

    fn tag(&self, raw: &RawToken<'_>, normalized: &str) -> Token {
        let mut token = Token {
            surface: raw.text.to_string(),
            normalized: normalized.to_string(),
            category: Category::Other,
            lemma: None,
            candidates: Vec::new(),
            proper: false,
            number: None,
            span: raw.span.clone(),
        };
        match raw.kind {
            RawKind::Punct => token.category = Category::Punctuation,
            RawKind::Number => {
                token.category = Category::Number;
                token.number = parse_numeral(raw.text).map(NumberMention::new);
                if token.number.is_none() {
                    token.category = Category::Other;
                }
            }
            RawKind::Word => {
                if let Some(n) = self.words.number_word(normalized) {
                    token.category = Category::Number;
                    token.number = Some(NumberMention::new(n));
                } else if let Some(category) = self.words.category(normalized) {
                    token.category = category;
                } else {
                    let entries = self.lexicon.lookup(raw.text, None);
                    if let Some(first) = entries.first() {
                        token.category = first.pos.into();
                        token.lemma = Some(first.key());
                        token.candidates = entries.iter().map(|e| e.key()).collect();
                    } else if is_capitalized(raw.text) {
                        token.category = Category::Noun;
                        token.proper = true;
                    }
                }
            }
        }
        token
    }
}

/// Maximal `determiner? adjective* noun+ adjective*` runs.
fn chunk_noun_phrases(tokens: &[Token]) -> Vec<Range<usize>> {
    let is = |i: usize, c: Category| tokens.get(i).is_some_and(|t| t.category == c);
    let mut chunks = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let start = i;
        let mut j = i;
        if is(j, Category::Determiner) {
            j += 1;
        }
        while is(j, Category::Adjective) {
            j += 1;
        }
        let nouns_start = j;
        while is(j, Category::Noun) {
            j += 1;
        }
        if j == nouns_start {
            i += 1;
            continue;
        }
        while is(j, Category::Adjective) {
            j += 1;
        }
        chunks.push(start..j);
        i = j;
    }
    chunks
}

/// `auxiliary* adverb* verb` runs, or auxiliary runs on their own.
fn find_verb_groups(tokens: &[Token]) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !tokens[i].category.is_verbal() {
            i += 1;
            continue;
        }
        let start = i;
        let mut last_verbal = i;
        let mut j = i + 1;
        while j < tokens.len() {
            match tokens[j].category {
                Category::Auxiliary | Category::Verb => last_verbal = j,
                Category::Adverb => {}
                _ => break,
            }
            // A main verb closes the group.
            if tokens[j].category == Category::Verb {
                break;
            }
            j += 1;
        }
        if tokens[start].category == Category::Verb {
            last_verbal = start;
        }
        groups.push(start..last_verbal + 1);
        i = last_verbal + 1;
    }
    groups
}
