//! Answer scoring: word-level similarity over the lexical graph, a rounding
//! tolerant channel for quantities, and the weighted sentence score `sim`.
//!
//! Word similarity is `(1 - gamma) * alpha * beta^d + gamma`, where `alpha`
//! rewards synonymy, `beta` decays with the taxonomy distance `d`, and `gamma`
//! lifts pairs that share a stem or a WordNet domain. The sentence score
//! weights nouns and verbs (and quantities) against adjectives and adverbs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{AnalyzedSentence, Category, Token};
use crate::error::{Error, Result};
use crate::lexicon::{LexKey, Lexicon, Pos, Relation};
use crate::text::normalize;

/// Tunable constants of the scoring formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub alpha_syn: f64,
    pub alpha_other: f64,
    pub beta: f64,
    pub gamma_domain: f64,
    pub gamma_stem: f64,
    pub weight_nv: f64,
    pub weight_aa: f64,
    pub num_round: f64,
    pub num_qualified: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            alpha_syn: 0.9,
            alpha_other: 0.85,
            beta: 0.7,
            gamma_domain: 0.25,
            gamma_stem: 0.5,
            weight_nv: 0.8,
            weight_aa: 0.2,
            num_round: 0.7,
            num_qualified: 0.9,
        }
    }
}

impl SimParams {
    /// Parses `key = value` lines; unspecified keys keep their defaults.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let params: SimParams = toml::from_str(text)
            .map_err(|e| Error::validation(format!("similarity config: {e}")))?;
        params.validate()?;
        Ok(params)
    }

    pub fn from_config_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_config_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha_syn", self.alpha_syn),
            ("alpha_other", self.alpha_other),
            ("beta", self.beta),
            ("gamma_domain", self.gamma_domain),
            ("gamma_stem", self.gamma_stem),
            ("weight_nv", self.weight_nv),
            ("weight_aa", self.weight_aa),
            ("num_round", self.num_round),
            ("num_qualified", self.num_qualified),
        ];
        for (name, value) in fields {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::validation(format!(
                    "{name} = {value} is outside [0, 1]"
                )));
            }
        }
        if (self.weight_nv + self.weight_aa - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!(
                "weight_nv + weight_aa must be 1, got {}",
                self.weight_nv + self.weight_aa
            )));
        }
        Ok(())
    }
}

/// Which correction lifted a word score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gamma {
    #[default]
    None,
    Domain,
    Stem,
}

impl Gamma {
    pub fn value(self, params: &SimParams) -> f64 {
        match self {
            Gamma::None => 0.0,
            Gamma::Domain => params.gamma_domain,
            Gamma::Stem => params.gamma_stem,
        }
    }
}

/// Applies a correction: `(1 - gamma) * base + gamma`.
pub fn gamma_correct(base: f64, gamma: f64) -> f64 {
    (1.0 - gamma) * base + gamma
}

/// The facts about a word pair that the similarity formula depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairEvidence {
    pub synonymous: bool,
    /// Conceptual distance; `None` when unreachable.
    pub distance: Option<u32>,
    pub same_stem: bool,
    pub same_domain: bool,
}

impl PairEvidence {
    pub fn gather(lexicon: &Lexicon, a: &LexKey, b: &LexKey) -> Result<Self> {
        let ea = lexicon
            .get(a)
            .ok_or_else(|| Error::NotFound(format!("lexical entry {a}")))?;
        let eb = lexicon
            .get(b)
            .ok_or_else(|| Error::NotFound(format!("lexical entry {b}")))?;
        let relations = lexicon.direct_relation(a, b)?;
        Ok(PairEvidence {
            synonymous: relations.contains(&Relation::Synonym),
            distance: lexicon.shortest_path(a, b)?,
            same_stem: normalize(&ea.stem) == normalize(&eb.stem),
            same_domain: ea.wordnet_domain.is_some() && ea.wordnet_domain == eb.wordnet_domain,
        })
    }

    /// `alpha * beta^d`, or zero when the pair is unreachable.
    pub fn base(&self, params: &SimParams) -> f64 {
        let alpha = if self.synonymous {
            params.alpha_syn
        } else {
            params.alpha_other
        };
        match self.distance {
            Some(d) => alpha * params.beta.powi(d as i32),
            None => 0.0,
        }
    }

    /// Stem correction for non-synonymous word families, otherwise the
    /// shared-domain correction.
    pub fn gamma(&self) -> Gamma {
        if self.same_stem && !self.synonymous {
            Gamma::Stem
        } else if self.same_domain {
            Gamma::Domain
        } else {
            Gamma::None
        }
    }
}

/// Similarity from an already known base value and the applicable correction.
pub fn score_from_base(base: f64, gamma: Gamma, params: &SimParams) -> f64 {
    gamma_correct(base, gamma.value(params)).clamp(0.0, 1.0)
}

/// Coarse class of a scored item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordClass {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Number,
}

impl From<Pos> for WordClass {
    fn from(pos: Pos) -> Self {
        match pos {
            Pos::Noun => WordClass::Noun,
            Pos::Verb => WordClass::Verb,
            Pos::Adjective => WordClass::Adjective,
            Pos::Adverb => WordClass::Adverb,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordScore {
    pub ideal: String,
    pub class: WordClass,
    pub matched: Option<String>,
    pub value: f64,
    pub gamma: Gamma,
    pub distance: Option<u32>,
}

/// Similarity of two words of the same category.
///
/// Identical keys score 1.0. Keys missing from the lexicon fall back to
/// comparing normalized lemmas (1.0 or 0.0).
pub fn word_similarity(
    a: &LexKey,
    b: &LexKey,
    lexicon: &Lexicon,
    params: &SimParams,
) -> Result<WordScore> {
    if a.pos != b.pos {
        return Err(Error::contract(format!(
            "cannot compare {a} with {b}: different lexical categories"
        )));
    }
    let mut score = WordScore {
        ideal: a.to_string(),
        class: a.pos.into(),
        matched: None,
        value: 0.0,
        gamma: Gamma::None,
        distance: None,
    };
    if a == b {
        score.value = 1.0;
        score.distance = Some(0);
    } else if !lexicon.contains(a) || !lexicon.contains(b) {
        if normalize(&a.lemma) == normalize(&b.lemma) {
            score.value = 1.0;
        }
    } else {
        let evidence = PairEvidence::gather(lexicon, a, b)?;
        score.gamma = evidence.gamma();
        score.distance = evidence.distance;
        score.value = score_from_base(evidence.base(params), score.gamma, params);
    }
    if score.value > 0.0 {
        score.matched = Some(b.to_string());
    }
    Ok(score)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qualifier {
    Over,
    Under,
    #[default]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberMention {
    pub value: u64,
    #[serde(default)]
    pub qualifier: Qualifier,
}

impl NumberMention {
    pub fn new(value: u64) -> Self {
        NumberMention {
            value,
            qualifier: Qualifier::None,
        }
    }

    pub fn with_qualifier(value: u64, qualifier: Qualifier) -> Self {
        NumberMention { value, qualifier }
    }
}

impl fmt::Display for NumberMention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qualifier {
            Qualifier::Over => write!(f, "over {}", self.value),
            Qualifier::Under => write!(f, "under {}", self.value),
            Qualifier::None => write!(f, "{}", self.value),
        }
    }
}

/// Every value `n` rounds to at each power of ten below its magnitude,
/// excluding `n` itself.
pub fn round_candidates(n: u64) -> BTreeSet<u64> {
    let digits = n.checked_ilog10().unwrap_or(0) + 1;
    let mut out = BTreeSet::new();
    for k in 1..digits {
        let unit = 10u64.pow(k);
        let down = n / unit * unit;
        out.insert(down);
        out.insert(if down == n { n } else { down + unit });
    }
    out.remove(&n);
    out
}

/// Scores a quantity recalled by the user against the one in the gold answer.
pub fn number_score(ideal: &NumberMention, answer: &NumberMention, params: &SimParams) -> f64 {
    if answer.value == ideal.value {
        let consistent = answer.qualifier == Qualifier::None || answer.qualifier == ideal.qualifier;
        return if consistent { 1.0 } else { params.num_round };
    }
    if !round_candidates(ideal.value).contains(&answer.value) {
        return 0.0;
    }
    let qualified = match answer.qualifier {
        Qualifier::Over => ideal.value > answer.value,
        Qualifier::Under => ideal.value < answer.value,
        Qualifier::None => false,
    };
    if qualified {
        params.num_qualified
    } else {
        params.num_round
    }
}

/// The weighted sentence score and the per-word breakdown it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    pub value: f64,
    pub nv_scores: Vec<WordScore>,
    pub aa_scores: Vec<WordScore>,
    pub number_scores: Vec<WordScore>,
}

impl SentenceScore {
    /// Re-derives `value` from the breakdown.
    pub fn recompute(&self, params: &SimParams) -> f64 {
        let nv: Vec<f64> = self
            .nv_scores
            .iter()
            .chain(&self.number_scores)
            .map(|s| s.value)
            .collect();
        let aa: Vec<f64> = self.aa_scores.iter().map(|s| s.value).collect();
        combine(&nv, &aa, params).unwrap_or(0.0)
    }

    /// Value rounded half-up to two decimals, the reporting convention.
    pub fn rounded(&self) -> f64 {
        round2(self.value)
    }
}

/// Rounds half-up to two decimals; the small offset absorbs binary
/// representation error so that 0.575 reports as 0.58.
pub fn round2(x: f64) -> f64 {
    (x * 100.0 + 1e-9).round() / 100.0
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Weighted combination; a side with no items hands its weight to the other.
fn combine(nv: &[f64], aa: &[f64], params: &SimParams) -> Option<f64> {
    match (nv.is_empty(), aa.is_empty()) {
        (false, false) => Some(params.weight_nv * mean(nv) + params.weight_aa * mean(aa)),
        (false, true) => Some(mean(nv)),
        (true, false) => Some(mean(aa)),
        (true, true) => None,
    }
}

/// Scores a response against an ideal answer.
pub fn sentence_similarity(
    ideal: &AnalyzedSentence,
    response: &AnalyzedSentence,
    lexicon: &Lexicon,
    params: &SimParams,
) -> Result<SentenceScore> {
    score_tokens(&ideal.tokens, &response.tokens, lexicon, params)
}

/// Scores multi-sentence texts by pooling their tokens.
pub fn text_similarity(
    ideal: &[AnalyzedSentence],
    response: &[AnalyzedSentence],
    lexicon: &Lexicon,
    params: &SimParams,
) -> Result<SentenceScore> {
    let ideal: Vec<Token> = ideal
        .iter()
        .flat_map(|s| s.tokens.iter().cloned())
        .collect();
    let response: Vec<Token> = response
        .iter()
        .flat_map(|s| s.tokens.iter().cloned())
        .collect();
    score_tokens(&ideal, &response, lexicon, params)
}

fn score_tokens(
    ideal: &[Token],
    response: &[Token],
    lexicon: &Lexicon,
    params: &SimParams,
) -> Result<SentenceScore> {
    let mut nv_scores = Vec::new();
    let mut aa_scores = Vec::new();
    let mut number_scores = Vec::new();

    for token in ideal.iter().filter(|t| t.is_content()) {
        if let Some(ideal_number) = token.number {
            number_scores.push(best_number(token, &ideal_number, response, params));
            continue;
        }
        let Some(pos) = token.category.pos() else {
            continue;
        };
        let score = if token.in_vocabulary() {
            best_word(token, pos, response, lexicon, params)?
        } else {
            exact_only(token, pos, response)
        };
        if pos.is_major() {
            nv_scores.push(score);
        } else {
            aa_scores.push(score);
        }
    }

    if nv_scores.is_empty() && aa_scores.is_empty() && number_scores.is_empty() {
        return Err(Error::contract(
            "the ideal answer contains no content words",
        ));
    }
    let mut score = SentenceScore {
        value: 0.0,
        nv_scores,
        aa_scores,
        number_scores,
    };
    score.value = score.recompute(params).clamp(0.0, 1.0);
    Ok(score)
}

fn best_word(
    ideal: &Token,
    pos: Pos,
    response: &[Token],
    lexicon: &Lexicon,
    params: &SimParams,
) -> Result<WordScore> {
    let ideal_key = ideal.key().expect("content tokens have a key");
    let mut best = WordScore {
        ideal: ideal_key.to_string(),
        class: pos.into(),
        matched: None,
        value: 0.0,
        gamma: Gamma::None,
        distance: None,
    };
    for candidate in response.iter().filter(|t| t.category.pos() == Some(pos)) {
        let Some(key) = candidate.key() else { continue };
        let score = word_similarity(&ideal_key, &key, lexicon, params)?;
        if score.value > best.value {
            best = score;
        }
    }
    Ok(best)
}

/// Out-of-vocabulary ideal words only match the same normalized string.
fn exact_only(ideal: &Token, pos: Pos, response: &[Token]) -> WordScore {
    let hit = response
        .iter()
        .find(|t| t.category != Category::Punctuation && t.normalized == ideal.normalized);
    WordScore {
        ideal: ideal.normalized.clone(),
        class: pos.into(),
        matched: hit.map(|t| t.normalized.clone()),
        value: if hit.is_some() { 1.0 } else { 0.0 },
        gamma: Gamma::None,
        distance: None,
    }
}

fn best_number(
    token: &Token,
    ideal: &NumberMention,
    response: &[Token],
    params: &SimParams,
) -> WordScore {
    let mut best = WordScore {
        ideal: token.surface.clone(),
        class: WordClass::Number,
        matched: None,
        value: 0.0,
        gamma: Gamma::None,
        distance: None,
    };
    for answer in response.iter().filter_map(|t| t.number) {
        let value = number_score(ideal, &answer, params);
        if value > best.value {
            best.value = value;
            best.matched = Some(answer.to_string());
        }
    }
    best
}
