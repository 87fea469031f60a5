//! Question generation from news text: dichotomous openers with branching
//! followups, a word-meaning distractor, an attention question with a gold
//! answer, and a closing interest question.

pub mod entities;
pub mod templates;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{AnalyzedSentence, Analyzer, Category};
use crate::error::{Error, Result};
use crate::ingest::NewsItem;
use crate::lexicon::{LexKey, Lexicon, Pos};

pub use entities::{find_entities, Entity, EntityKind, Gazetteer};
pub use templates::{Template, Templates};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Dichotomous,
    Followup,
    Distractor,
    Attention,
    Interest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedKind {
    YesNo,
    FreeText,
}

/// Result of a dichotomous question; silence or an unclear reply is `Na`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Yes,
    No,
    Na,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Yes, Outcome::No, Outcome::Na];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Yes => "yes",
            Outcome::No => "no",
            Outcome::Na => "na",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.as_str() == s.trim().to_lowercase())
            .ok_or_else(|| Error::validation(format!("unknown outcome '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Gold {
    /// Reference phrase; `pronoun` is a display-only subject prefix.
    Text {
        text: String,
        pronoun: Option<String>,
    },
    Locations {
        places: Vec<String>,
    },
    SynonymSet {
        word: LexKey,
        terms: Vec<String>,
    },
}

impl Gold {
    /// The part of the gold answer that responses are scored against.
    pub fn scoring_text(&self) -> String {
        match self {
            Gold::Text { text, .. } => text.clone(),
            Gold::Locations { places } => places.join(", "),
            Gold::SynonymSet { terms, .. } => terms.join(", "),
        }
    }

    pub fn display(&self) -> String {
        match self {
            Gold::Text {
                text,
                pronoun: Some(p),
            } => format!("{p} {text}"),
            other => other.scoring_text(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub stage: Stage,
    pub text: String,
    pub expected_kind: ExpectedKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<Gold>,
}

impl Question {
    fn new(id: &str, stage: Stage, text: String) -> Self {
        let expected_kind = match stage {
            Stage::Dichotomous | Stage::Interest => ExpectedKind::YesNo,
            _ => ExpectedKind::FreeText,
        };
        Question {
            id: id.to_string(),
            stage,
            text,
            expected_kind,
            gold: None,
        }
    }

    fn with_gold(mut self, gold: Gold) -> Self {
        self.gold = Some(gold);
        self
    }
}

pub const Q1: &str = "q1";
pub const Q2: &str = "q2";
pub const Q_ATTENTION: &str = "q3";
pub const Q_INTEREST: &str = "q4";

pub fn followup_id(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::Yes => "q1.1",
        Outcome::No => "q1.2",
        Outcome::Na => "q1.3",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionScript {
    pub id: String,
    pub news_id: String,
    pub summary_text: String,
    pub entity: Entity,
    pub q1_variants: Vec<Question>,
    /// Index of the variant actually asked.
    pub q1_selected: usize,
    pub followups: BTreeMap<Outcome, Question>,
    pub q2: Question,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q3_distractor: Option<Question>,
    pub q_attention: Question,
    pub q_interest: Question,
    pub rng_seed: u64,
}

impl SessionScript {
    pub fn q1(&self) -> &Question {
        &self.q1_variants[self.q1_selected]
    }

    pub fn followup(&self, outcome: Outcome) -> &Question {
        &self.followups[&outcome]
    }

    /// Every question that may be asked, by id.
    pub fn question(&self, id: &str) -> Option<&Question> {
        if id == Q1 {
            return Some(self.q1());
        }
        self.followups
            .values()
            .chain([&self.q2, &self.q_attention, &self.q_interest])
            .chain(self.q3_distractor.as_ref())
            .find(|q| q.id == id)
    }
}

fn person_or_location(entity: &Entity) -> Result<&'static str> {
    match entity.kind {
        EntityKind::Person => Ok("person"),
        EntityKind::Location => Ok("location"),
        EntityKind::Organisation => Err(Error::validation(format!(
            "no dichotomous templates for organisation '{}'",
            entity.surface
        ))),
    }
}

/// All four dichotomous variants for the entity's kind.
pub fn dichotomous_variants(entity: &Entity, templates: &Templates) -> Result<Vec<Question>> {
    let kind = person_or_location(entity)?;
    Ok(templates
        .select("dichotomous", kind, "")
        .into_iter()
        .map(|t| Question::new(Q1, Stage::Dichotomous, t.fill(&entity.surface)))
        .collect())
}

/// One variant picked with the given generator.
pub fn gen_dichotomous(
    entity: &Entity,
    templates: &Templates,
    rng: &mut impl Rng,
) -> Result<Question> {
    let mut variants = dichotomous_variants(entity, templates)?;
    let i = rng.random_range(0..variants.len());
    Ok(variants.swap_remove(i))
}

pub fn gen_followup(entity: &Entity, outcome: Outcome, templates: &Templates) -> Result<Question> {
    let kind = person_or_location(entity)?;
    let t = templates.one("followup", kind, outcome.as_str());
    Ok(Question::new(
        followup_id(outcome),
        Stage::Followup,
        t.fill(&entity.surface),
    ))
}

const MONTHS: &[&str] = &[
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
    "enero",
    "febrero",
    "marzo",
    "abril",
    "mayo",
    "junio",
    "julio",
    "agosto",
    "septiembre",
    "octubre",
    "noviembre",
    "diciembre",
];

/// `Month <number>` or `<number> de month` token ranges.
fn date_anchors(sentence: &AnalyzedSentence) -> Vec<Range<usize>> {
    let t = &sentence.tokens;
    let is_month = |i: usize| {
        t.get(i)
            .is_some_and(|x| MONTHS.contains(&x.normalized.as_str()))
    };
    let is_number = |i: usize| t.get(i).is_some_and(|x| x.number.is_some());
    let mut anchors = Vec::new();
    for i in 0..t.len() {
        if is_month(i) && is_number(i + 1) {
            anchors.push(i..i + 2);
        } else if is_number(i)
            && t.get(i + 1).is_some_and(|x| x.normalized == "de")
            && is_month(i + 2)
        {
            anchors.push(i..i + 3);
        }
    }
    anchors
}

/// End of the complement that follows a verb group.
fn complement_end(sentence: &AnalyzedSentence, from: usize) -> usize {
    sentence.tokens[from..]
        .iter()
        .position(|t| {
            matches!(
                t.category,
                Category::Preposition
                    | Category::Punctuation
                    | Category::Conjunction
                    | Category::Pronoun
                    | Category::Verb
                    | Category::Auxiliary
            )
        })
        .map_or(sentence.tokens.len(), |p| from + p)
}

fn overlapping<'e>(
    sentence: &AnalyzedSentence,
    chunk: &Range<usize>,
    entities: &'e [Entity],
) -> Option<&'e Entity> {
    let bytes = sentence.tokens[chunk.start].span.start..sentence.tokens[chunk.end - 1].span.end;
    entities
        .iter()
        .find(|e| e.span.start < bytes.end && bytes.start < e.span.end)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttentionKind {
    What,
    Who,
    Places,
}

fn what_candidates(
    sentences: &[AnalyzedSentence],
    entities: &[Entity],
    templates: &Templates,
) -> Vec<Question> {
    let mut out = Vec::new();
    for s in sentences {
        for anchor in date_anchors(s) {
            let group = s
                .verb_groups
                .iter()
                .rev()
                .find(|g| g.end <= anchor.start)
                .or_else(|| s.verb_groups.iter().find(|g| g.start >= anchor.end));
            let Some(group) = group.cloned() else {
                continue;
            };
            let end = complement_end(s, group.end);
            let future = s.tokens[group.clone()]
                .iter()
                .any(|t| t.normalized == "will");
            let pronoun = match s
                .chunk_ending_at(group.start)
                .and_then(|c| overlapping(s, &c, entities))
            {
                Some(e) if e.kind == EntityKind::Person => "They",
                _ => "It",
            };
            let template =
                templates.one("attention", "what", if future { "future" } else { "past" });
            out.push(
                Question::new(
                    Q_ATTENTION,
                    Stage::Attention,
                    template.fill(s.slice(anchor)),
                )
                .with_gold(Gold::Text {
                    text: s.slice(group.start..end).to_string(),
                    pronoun: Some(pronoun.to_string()),
                }),
            );
        }
    }
    out
}

fn who_candidates(
    sentences: &[AnalyzedSentence],
    entities: &[Entity],
    templates: &Templates,
) -> Vec<Question> {
    let mut out = Vec::new();
    for s in sentences {
        let Some(group) = s.verb_groups.first().cloned() else {
            continue;
        };
        let Some(subject) = s.chunk_ending_at(group.start) else {
            continue;
        };
        let is_agent = overlapping(s, &subject, entities)
            .is_some_and(|e| matches!(e.kind, EntityKind::Person | EntityKind::Organisation));
        if !is_agent {
            continue;
        }
        let end = complement_end(s, group.end);
        let template = templates.one("attention", "who", "");
        out.push(
            Question::new(
                Q_ATTENTION,
                Stage::Attention,
                template.fill(s.slice(group.start..end)),
            )
            .with_gold(Gold::Text {
                text: s.slice(subject).to_string(),
                pronoun: None,
            }),
        );
    }
    out
}

fn places_candidate(entities: &[Entity], templates: &Templates) -> Option<Question> {
    let mut places: Vec<String> = Vec::new();
    for e in entities.iter().filter(|e| e.kind == EntityKind::Location) {
        if !places
            .iter()
            .any(|p| crate::text::normalize(p) == crate::text::normalize(&e.surface))
        {
            places.push(e.surface.clone());
        }
    }
    if places.is_empty() {
        return None;
    }
    let template = templates.one("attention", "places", "");
    Some(
        Question::new(Q_ATTENTION, Stage::Attention, template.text.clone())
            .with_gold(Gold::Locations { places }),
    )
}

/// Every attention candidate, what-questions first, then who, then places.
pub fn gen_attention_questions(
    sentences: &[AnalyzedSentence],
    entities: &[Entity],
    templates: &Templates,
) -> Vec<(AttentionKind, Question)> {
    let tag = |kind| move |q| (kind, q);
    what_candidates(sentences, entities, templates)
        .into_iter()
        .map(tag(AttentionKind::What))
        .chain(
            who_candidates(sentences, entities, templates)
                .into_iter()
                .map(tag(AttentionKind::Who)),
        )
        .chain(places_candidate(entities, templates).map(tag(AttentionKind::Places)))
        .collect()
}

/// Asks for the meaning of a common noun that has synonyms or hypernyms.
pub fn gen_meaning_question(
    sentences: &[AnalyzedSentence],
    lexicon: &Lexicon,
    templates: &Templates,
    rng: &mut impl Rng,
) -> Result<Question> {
    let mut nouns: Vec<(&str, &LexKey)> = Vec::new();
    for token in sentences.iter().flat_map(|s| &s.tokens) {
        let Some(key) = token.lemma.as_ref().filter(|k| k.pos == Pos::Noun) else {
            continue;
        };
        if nouns.iter().any(|(_, k)| *k == key) {
            continue;
        }
        let entry = lexicon.get(key).expect("tagged lemmas exist");
        if !entry.synonyms.is_empty() || !entry.hypernyms.is_empty() {
            nouns.push((&token.surface, key));
        }
    }
    if nouns.is_empty() {
        return Err(Error::GenerationFailed(
            "no common noun with synonyms or hypernyms".into(),
        ));
    }
    let (surface, key) = nouns[rng.random_range(0..nouns.len())];
    let entry = lexicon.get(key).expect("tagged lemmas exist");
    let terms = entry
        .synonyms
        .iter()
        .chain(&entry.hypernyms)
        .map(|k| k.lemma.clone())
        .collect();
    let template = templates.one("distractor", "meaning", "");
    Ok(
        Question::new(Q2, Stage::Distractor, template.fill(surface)).with_gold(Gold::SynonymSet {
            word: key.clone(),
            terms,
        }),
    )
}

/// Builds session scripts from news items.
#[derive(Debug, Clone, Copy)]
pub struct ScriptBuilder<'a> {
    pub lexicon: &'a Lexicon,
    pub gazetteer: &'a Gazetteer,
    pub templates: &'a Templates,
}

impl<'a> ScriptBuilder<'a> {
    pub fn new(lexicon: &'a Lexicon, gazetteer: &'a Gazetteer, templates: &'a Templates) -> Self {
        ScriptBuilder {
            lexicon,
            gazetteer,
            templates,
        }
    }

    pub fn build(&self, news: &NewsItem, seed: u64) -> Result<SessionScript> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = news.summary.as_str();
        let sentences = Analyzer::new(self.lexicon).analyze(text)?;
        let entities = self.gazetteer.find_entities(text);

        let entity = entities
            .iter()
            .find(|e| matches!(e.kind, EntityKind::Person | EntityKind::Location))
            .cloned()
            .ok_or_else(|| {
                Error::GenerationFailed(format!("no person or location in '{}'", news.id))
            })?;
        let q1_variants = dichotomous_variants(&entity, self.templates)?;
        let q1_selected = rng.random_range(0..q1_variants.len());
        let followups = Outcome::ALL
            .into_iter()
            .map(|o| gen_followup(&entity, o, self.templates).map(|q| (o, q)))
            .collect::<Result<_>>()?;
        let q2 = gen_meaning_question(&sentences, self.lexicon, self.templates, &mut rng)?;
        let (_, q_attention) = gen_attention_questions(&sentences, &entities, self.templates)
            .into_iter()
            .next()
            .ok_or_else(|| {
                Error::GenerationFailed(format!("no attention question for '{}'", news.id))
            })?;
        let interest = self.templates.one("interest", "any", "");

        Ok(SessionScript {
            id: format!("{}-{seed}", news.id),
            news_id: news.id.clone(),
            summary_text: text.to_string(),
            entity,
            q1_variants,
            q1_selected,
            followups,
            q2,
            q3_distractor: None,
            q_attention,
            q_interest: Question::new(Q_INTEREST, Stage::Interest, interest.text.clone()),
            rng_seed: seed,
        })
    }
}

/// Builds a script with the bundled templates.
pub fn build_session_script(
    news: &NewsItem,
    lexicon: &Lexicon,
    gazetteer: &Gazetteer,
    seed: u64,
) -> Result<SessionScript> {
    let templates = Templates::bundled();
    ScriptBuilder::new(lexicon, gazetteer, &templates).build(news, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DRUGS: &str = "National Police has dismantled a dangerous drug trafficking ring that \
                         operated in Galicia, Madrid, and Alicante in an operation in which ten \
                         people with a wide criminal record have been arrested.";
    const BONDS: &str = "The Government will automatically extend the social electric bonds until \
                         September 15th.";

    fn attention(text: &str) -> Vec<(AttentionKind, Question)> {
        let lex = Lexicon::bundled();
        let sentences = Analyzer::new(&lex).analyze(text).unwrap();
        let entities = Gazetteer::bundled().find_entities(text);
        gen_attention_questions(&sentences, &entities, &Templates::bundled())
    }

    #[test]
    fn who_question_uses_subject() {
        let c = attention(DRUGS);
        let (kind, q) = &c[0];
        assert_eq!(*kind, AttentionKind::Who);
        assert_eq!(
            q.text,
            "Who has dismantled a dangerous drug trafficking ring?"
        );
        assert_eq!(
            q.gold,
            Some(Gold::Text {
                text: "National Police".into(),
                pronoun: None
            })
        );
    }

    #[test]
    fn places_question_lists_locations() {
        let c = attention(DRUGS);
        let (kind, q) = c.last().unwrap();
        assert_eq!(*kind, AttentionKind::Places);
        assert_eq!(
            q.gold,
            Some(Gold::Locations {
                places: vec!["Galicia".into(), "Madrid".into(), "Alicante".into()]
            })
        );
    }

    #[test]
    fn what_question_keeps_verb_and_complement() {
        let c = attention(BONDS);
        let (kind, q) = &c[0];
        assert_eq!(*kind, AttentionKind::What);
        assert_eq!(
            q.text,
            "What does the news say will happen on September 15th?"
        );
        let gold = q.gold.as_ref().unwrap();
        assert_eq!(
            gold.scoring_text(),
            "will automatically extend the social electric bonds"
        );
        assert_eq!(
            gold.display(),
            "It will automatically extend the social electric bonds"
        );
    }

    #[test]
    fn organisation_has_no_dichotomous_templates() {
        let e = Entity {
            surface: "Celta".into(),
            kind: EntityKind::Organisation,
            span: 0..5,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(gen_dichotomous(&e, &Templates::bundled(), &mut rng).is_err());
    }

    #[test]
    fn followups_follow_the_branch_table() {
        let t = Templates::bundled();
        let madrid = Entity {
            surface: "Madrid".into(),
            kind: EntityKind::Location,
            span: 0..6,
        };
        assert_eq!(
            gen_followup(&madrid, Outcome::No, &t).unwrap().text,
            "Why have you never been to Madrid?"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = gen_dichotomous(&madrid, &t, &mut rng).unwrap();
        assert!(dichotomous_variants(&madrid, &t).unwrap().contains(&q));
    }

    #[test]
    fn meaning_needs_known_noun() {
        let lex = Lexicon::bundled();
        let sentences = Analyzer::new(&lex).analyze("Zorblat quixed Vigo.").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = gen_meaning_question(&sentences, &lex, &Templates::bundled(), &mut rng);
        assert!(matches!(err, Err(Error::GenerationFailed(_))));
    }
}
