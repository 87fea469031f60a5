//! Session state machine, transcripts, scoring and the on-disk session store.
//!
//! A session runs through six turns in a fixed order: the news summary
//! (acknowledged), the dichotomous question, the followup chosen by its
//! outcome, the meaning question, the attention question and the interest
//! question.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, OpenOptions};
use std::io::{BufRead, Write as _};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::analysis::{Analyzer, RawKind};
use crate::error::{Error, Result};
use crate::ingest::write_atomic;
use crate::lexicon::Lexicon;
use crate::questgen::{ExpectedKind, Outcome, Question, SessionScript, Stage};
use crate::similarity::{text_similarity, SimParams};
use crate::text::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Education {
    Basic,
    Superior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Impairment {
    Absent,
    Mild,
    Severe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameOfMind {
    Happy,
    Normal,
    Sad,
}

pub const MIN_AGE: u32 = 60;

/// Caregiver-entered participant and session attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistrationSheet {
    pub user_id: String,
    pub age: u32,
    pub tech_skills: bool,
    pub hearing_problems: bool,
    pub education: Education,
    pub impairment: Impairment,
    pub frame_of_mind: FrameOfMind,
    pub stressed: bool,
    pub focused: bool,
    #[serde(default)]
    pub notes: String,
}

impl RegistrationSheet {
    pub fn validate(&self) -> Result<()> {
        if self.user_id.trim().is_empty() {
            return Err(Error::validation("user_id must not be empty"));
        }
        if self.age < MIN_AGE {
            return Err(Error::validation(format!(
                "participants must be at least {MIN_AGE} years old (got {})",
                self.age
            )));
        }
        Ok(())
    }

    /// Parses and validates; unknown enum values become validation errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let sheet: RegistrationSheet =
            serde_json::from_str(text).map_err(|e| Error::validation(e.to_string()))?;
        sheet.validate()?;
        Ok(sheet)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SessionState {
    Created,
    InProgress,
    Completed,
    Abandoned,
}

pub const SUMMARY_ID: &str = "summary";
pub const TURNS_PER_SESSION: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub question_id: String,
    pub prompt: String,
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub session_id: String,
    pub user_id: String,
    pub script_id: String,
    pub turns: Vec<Turn>,
    pub state: SessionState,
}

impl Transcript {
    pub fn new(session_id: &str, user_id: &str, script_id: &str) -> Self {
        Transcript {
            session_id: session_id.into(),
            user_id: user_id.into(),
            script_id: script_id.into(),
            turns: Vec::new(),
            state: SessionState::Created,
        }
    }

    pub fn answer_to(&self, question_id: &str) -> Option<&Turn> {
        self.turns.iter().find(|t| t.question_id == question_id)
    }

    fn refresh_state(&mut self) {
        if self.state == SessionState::Abandoned {
            return;
        }
        self.state = match self.turns.len() {
            0 => SessionState::Created,
            n if n >= TURNS_PER_SESSION => SessionState::Completed,
            _ => SessionState::InProgress,
        };
    }
}

/// What the participant is asked next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Prompt {
    /// The news summary to read; any reply acknowledges it.
    Summary {
        question_id: String,
        text: String,
    },
    Question {
        question_id: String,
        text: String,
        stage: Stage,
        expected_kind: ExpectedKind,
    },
    Completed,
}

impl Prompt {
    pub fn question_id(&self) -> Option<&str> {
        match self {
            Prompt::Summary { question_id, .. } | Prompt::Question { question_id, .. } => {
                Some(question_id)
            }
            Prompt::Completed => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            Prompt::Summary { text, .. } | Prompt::Question { text, .. } => Some(text),
            Prompt::Completed => None,
        }
    }

    fn question(q: &Question) -> Prompt {
        Prompt::Question {
            question_id: q.id.clone(),
            text: q.text.clone(),
            stage: q.stage,
            expected_kind: q.expected_kind,
        }
    }
}

/// The prompt due after the turns recorded so far.
pub fn next_prompt(script: &SessionScript, transcript: &Transcript) -> Prompt {
    if transcript.state == SessionState::Abandoned {
        return Prompt::Completed;
    }
    match transcript.turns.len() {
        0 => Prompt::Summary {
            question_id: SUMMARY_ID.into(),
            text: script.summary_text.clone(),
        },
        1 => Prompt::question(script.q1()),
        2 => {
            let outcome = transcript.turns[1].outcome.unwrap_or(Outcome::Na);
            Prompt::question(script.followup(outcome))
        }
        3 => Prompt::question(&script.q2),
        4 => Prompt::question(&script.q_attention),
        5 => Prompt::question(&script.q_interest),
        _ => Prompt::Completed,
    }
}

/// Keyword classifier for dichotomous answers: the first keyword wins,
/// nothing recognised means `na`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YesNoClassifier {
    pub affirmative: Vec<String>,
    pub negative: Vec<String>,
}

impl Default for YesNoClassifier {
    fn default() -> Self {
        let list = |xs: &[&str]| xs.iter().map(|s| normalize(s)).collect();
        YesNoClassifier {
            affirmative: list(&[
                "yes",
                "yeah",
                "yep",
                "sure",
                "of course",
                "certainly",
                "indeed",
                "absolutely",
                "sí",
                "claro",
                "vale",
                "por supuesto",
                "desde luego",
            ]),
            negative: list(&["no", "nope", "not", "never", "nunca", "tampoco", "jamás"]),
        }
    }
}

impl YesNoClassifier {
    pub fn classify(&self, answer: &str) -> Outcome {
        let words: Vec<String> = crate::analysis::tokenize(answer)
            .into_iter()
            .filter(|t| t.kind == RawKind::Word)
            .map(|t| normalize(t.text))
            .collect();
        let hit = |phrases: &[String], at: usize| {
            phrases.iter().any(|p| {
                let parts: Vec<&str> = p.split_whitespace().collect();
                words.len() >= at + parts.len()
                    && parts.iter().zip(&words[at..]).all(|(a, b)| a == b)
            })
        };
        for i in 0..words.len() {
            if hit(&self.affirmative, i) {
                return Outcome::Yes;
            }
            if hit(&self.negative, i) {
                return Outcome::No;
            }
        }
        Outcome::Na
    }
}

/// Records an answer to the outstanding prompt.
pub fn apply_answer(
    script: &SessionScript,
    transcript: &mut Transcript,
    answer: &str,
    classifier: &YesNoClassifier,
    now: DateTime<Utc>,
) -> Result<Turn> {
    let prompt = next_prompt(script, transcript);
    let (Some(question_id), Some(text)) = (prompt.question_id(), prompt.text()) else {
        return Err(Error::Protocol(format!(
            "session '{}' has no outstanding prompt",
            transcript.session_id
        )));
    };
    let outcome = match &prompt {
        Prompt::Question {
            expected_kind: ExpectedKind::YesNo,
            ..
        } => Some(classifier.classify(answer)),
        _ => None,
    };
    let turn = Turn {
        question_id: question_id.to_string(),
        prompt: text.to_string(),
        answer: answer.to_string(),
        outcome,
        timestamp: now,
    };
    transcript.turns.push(turn.clone());
    transcript.refresh_state();
    Ok(turn)
}

/// Flags copied from the registration sheet into a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetFlags {
    pub age: u32,
    pub tech_skills: bool,
    pub hearing_problems: bool,
    pub education: Education,
    pub impairment: Impairment,
    pub frame_of_mind: FrameOfMind,
    pub stressed: bool,
    pub focused: bool,
}

impl From<&RegistrationSheet> for SheetFlags {
    fn from(s: &RegistrationSheet) -> Self {
        SheetFlags {
            age: s.age,
            tech_skills: s.tech_skills,
            hearing_problems: s.hearing_problems,
            education: s.education,
            impairment: s.impairment,
            frame_of_mind: s.frame_of_mind,
            stressed: s.stressed,
            focused: s.focused,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub session_id: String,
    pub user_id: String,
    pub script_id: String,
    pub news_id: String,
    /// Similarity per scored question id (meaning and attention).
    pub sims: BTreeMap<String, f64>,
    pub meaning_sim: f64,
    pub attention_sim: f64,
    pub avg_answer_length_chars: f64,
    pub completed: bool,
    pub flags: SheetFlags,
}

fn score_answer(
    question: &Question,
    transcript: &Transcript,
    analyzer: &Analyzer<'_>,
    params: &SimParams,
) -> Result<f64> {
    let gold = question.gold.as_ref().ok_or_else(|| {
        Error::validation(format!("question '{}' has no gold answer", question.id))
    })?;
    let Some(turn) = transcript.answer_to(&question.id) else {
        return Ok(0.0);
    };
    let ideal = analyzer.analyze(&gold.scoring_text())?;
    let response = analyzer.analyze_lenient(&turn.answer);
    Ok(text_similarity(&ideal, &response, analyzer.lexicon(), params)?.value)
}

/// Scores the meaning and attention answers; unanswered questions score 0.
pub fn score_session(
    transcript: &Transcript,
    script: &SessionScript,
    sheet: &RegistrationSheet,
    lexicon: &Lexicon,
    params: &SimParams,
) -> Result<SessionReport> {
    if transcript.script_id != script.id {
        return Err(Error::validation(format!(
            "transcript belongs to script '{}', not '{}'",
            transcript.script_id, script.id
        )));
    }
    if transcript.user_id != sheet.user_id {
        return Err(Error::validation(format!(
            "transcript belongs to user '{}', not '{}'",
            transcript.user_id, sheet.user_id
        )));
    }
    for turn in &transcript.turns {
        if turn.question_id != SUMMARY_ID && script.question(&turn.question_id).is_none() {
            return Err(Error::validation(format!(
                "turn '{}' is not part of script '{}'",
                turn.question_id, script.id
            )));
        }
    }
    let analyzer = Analyzer::new(lexicon);
    let meaning_sim = score_answer(&script.q2, transcript, &analyzer, params)?;
    let attention_sim = score_answer(&script.q_attention, transcript, &analyzer, params)?;

    let lengths: Vec<usize> = transcript
        .turns
        .iter()
        .filter(|t| {
            script
                .question(&t.question_id)
                .is_some_and(|q| q.expected_kind == ExpectedKind::FreeText)
        })
        .map(|t| t.answer.trim().chars().count())
        .collect();
    let avg_answer_length_chars = if lengths.is_empty() {
        0.0
    } else {
        lengths.iter().sum::<usize>() as f64 / lengths.len() as f64
    };

    Ok(SessionReport {
        session_id: transcript.session_id.clone(),
        user_id: transcript.user_id.clone(),
        script_id: script.id.clone(),
        news_id: script.news_id.clone(),
        sims: BTreeMap::from([
            (script.q2.id.clone(), meaning_sim),
            (script.q_attention.id.clone(), attention_sim),
        ]),
        meaning_sim,
        attention_sim,
        avg_answer_length_chars,
        completed: transcript.state == SessionState::Completed,
        flags: sheet.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub session_id: String,
    pub created: DateTime<Utc>,
    pub sheet: RegistrationSheet,
    pub script: SessionScript,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRow {
    pub session_id: String,
    pub user_id: String,
    pub script_id: String,
    pub news_id: String,
    pub created: DateTime<Utc>,
}

/// Directory-backed store: `sessions/<id>/session.json`, an append-only
/// `turns.jsonl`, `report.json` once scored, and a top-level `index.json`.
#[derive(Debug, Clone)]
pub struct SessionStore {
    root: PathBuf,
    locks: Arc<Mutex<HashMap<String, Arc<Mutex<()>>>>>,
    index_lock: Arc<Mutex<()>>,
}

impl SessionStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("sessions")).map_err(|e| Error::io(&root, e))?;
        Ok(SessionStore {
            root,
            locks: Arc::default(),
            index_lock: Arc::default(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, id: &str) -> PathBuf {
        self.root.join("sessions").join(id)
    }

    fn lock(&self, id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|e| e.into_inner());
        locks.entry(id.to_string()).or_default().clone()
    }

    pub fn create(&self, sheet: RegistrationSheet, script: SessionScript) -> Result<String> {
        sheet.validate()?;
        let session_id = uuid::Uuid::new_v4().to_string();
        let dir = self.dir(&session_id);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let record = SessionRecord {
            session_id: session_id.clone(),
            created: Utc::now(),
            sheet,
            script,
        };
        write_atomic(
            &dir.join("session.json"),
            &serde_json::to_vec_pretty(&record)?,
        )?;
        let _guard = self.index_lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut index = self.index()?;
        index.push(IndexRow {
            session_id: session_id.clone(),
            user_id: record.sheet.user_id.clone(),
            script_id: record.script.id.clone(),
            news_id: record.script.news_id.clone(),
            created: record.created,
        });
        write_atomic(
            &self.root.join("index.json"),
            &serde_json::to_vec_pretty(&index)?,
        )?;
        Ok(session_id)
    }

    pub fn index(&self) -> Result<Vec<IndexRow>> {
        let path = self.root.join("index.json");
        match fs::read_to_string(&path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn record(&self, id: &str) -> Result<SessionRecord> {
        let path = self.dir(id).join("session.json");
        match fs::read_to_string(&path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Err(Error::NotFound(format!("session '{id}'")))
            }
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn transcript(&self, id: &str) -> Result<Transcript> {
        let record = self.record(id)?;
        self.transcript_of(&record)
    }

    fn transcript_of(&self, record: &SessionRecord) -> Result<Transcript> {
        let dir = self.dir(&record.session_id);
        let mut transcript =
            Transcript::new(&record.session_id, &record.sheet.user_id, &record.script.id);
        let path = dir.join("turns.jsonl");
        match fs::File::open(&path) {
            Ok(file) => {
                for line in std::io::BufReader::new(file).lines() {
                    let line = line.map_err(|e| Error::io(&path, e))?;
                    if !line.trim().is_empty() {
                        transcript.turns.push(serde_json::from_str(&line)?);
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(Error::io(path, e)),
        }
        if dir.join("abandoned").exists() {
            transcript.state = SessionState::Abandoned;
        }
        transcript.refresh_state();
        Ok(transcript)
    }

    pub fn next_prompt(&self, id: &str) -> Result<Prompt> {
        let record = self.record(id)?;
        Ok(next_prompt(&record.script, &self.transcript_of(&record)?))
    }

    /// Appends an answer to the outstanding prompt, serialized per session.
    pub fn submit_answer(
        &self,
        id: &str,
        answer: &str,
        classifier: &YesNoClassifier,
    ) -> Result<(Turn, Transcript)> {
        let lock = self.lock(id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let record = self.record(id)?;
        let mut transcript = self.transcript_of(&record)?;
        let turn = apply_answer(
            &record.script,
            &mut transcript,
            answer,
            classifier,
            Utc::now(),
        )?;
        let path = self.dir(id).join("turns.jsonl");
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        let mut line = serde_json::to_vec(&turn)?;
        line.push(b'\n');
        file.write_all(&line).map_err(|e| Error::io(&path, e))?;
        Ok((turn, transcript))
    }

    pub fn abandon(&self, id: &str) -> Result<()> {
        self.record(id)?;
        let path = self.dir(id).join("abandoned");
        fs::write(&path, b"").map_err(|e| Error::io(&path, e))
    }

    pub fn write_report(&self, report: &SessionReport) -> Result<()> {
        write_atomic(
            &self.dir(&report.session_id).join("report.json"),
            &report_bytes(report)?,
        )
    }

    pub fn report_bytes(&self, id: &str) -> Result<Option<Vec<u8>>> {
        self.record(id)?;
        let path = self.dir(id).join("report.json");
        match fs::read(&path) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn report(&self, id: &str) -> Result<Option<SessionReport>> {
        self.report_bytes(id)?
            .map(|b| serde_json::from_slice(&b).map_err(Error::from))
            .transpose()
    }

    /// Stored reports with their sheets, grouped by user in creation order.
    pub fn reports_by_user(
        &self,
    ) -> Result<BTreeMap<String, (RegistrationSheet, Vec<SessionReport>)>> {
        let mut rows = self.index()?;
        rows.sort_by(|a, b| {
            a.created
                .cmp(&b.created)
                .then_with(|| a.session_id.cmp(&b.session_id))
        });
        let mut out: BTreeMap<String, (RegistrationSheet, Vec<SessionReport>)> = BTreeMap::new();
        for row in rows {
            let Some(report) = self.report(&row.session_id)? else {
                continue;
            };
            let sheet = self.record(&row.session_id)?.sheet;
            out.entry(row.user_id)
                .or_insert_with(|| (sheet, Vec::new()))
                .1
                .push(report);
        }
        Ok(out)
    }
}

/// Canonical serialized form of a report (pretty JSON, trailing newline).
pub fn report_bytes(report: &SessionReport) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(report)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Store plus the shared scoring resources; scores sessions on completion.
#[derive(Debug, Clone)]
pub struct SessionEngine {
    pub store: SessionStore,
    pub lexicon: Arc<Lexicon>,
    pub params: SimParams,
    pub classifier: YesNoClassifier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerAck {
    pub turn: Turn,
    pub next: Prompt,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<SessionReport>,
}

impl SessionEngine {
    pub fn new(store: SessionStore, lexicon: Arc<Lexicon>, params: SimParams) -> Self {
        SessionEngine {
            store,
            lexicon,
            params,
            classifier: YesNoClassifier::default(),
        }
    }

    pub fn create_session(
        &self,
        sheet: RegistrationSheet,
        script: SessionScript,
    ) -> Result<String> {
        self.store.create(sheet, script)
    }

    pub fn next_prompt(&self, id: &str) -> Result<Prompt> {
        self.store.next_prompt(id)
    }

    pub fn submit_answer(&self, id: &str, answer: &str) -> Result<AnswerAck> {
        let (turn, transcript) = self.store.submit_answer(id, answer, &self.classifier)?;
        let record = self.store.record(id)?;
        let next = next_prompt(&record.script, &transcript);
        let report = if transcript.state == SessionState::Completed {
            let report = score_session(
                &transcript,
                &record.script,
                &record.sheet,
                &self.lexicon,
                &self.params,
            )?;
            self.store.write_report(&report)?;
            Some(report)
        } else {
            None
        };
        Ok(AnswerAck { turn, next, report })
    }

    /// Re-scores the stored transcript.
    pub fn replay(&self, id: &str) -> Result<SessionReport> {
        let record = self.store.record(id)?;
        let transcript = self.store.transcript_of(&record)?;
        score_session(
            &transcript,
            &record.script,
            &record.sheet,
            &self.lexicon,
            &self.params,
        )
    }
}

/// Answers for a non-interactive run, keyed by question id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptedAnswers {
    answers: BTreeMap<String, String>,
}

impl ScriptedAnswers {
    /// Reads `question_id<TAB>answer` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut answers = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (id, answer) = line.split_once('\t').unwrap_or((line, ""));
            let id = id.trim();
            if answers
                .insert(id.to_string(), answer.trim().to_string())
                .is_some()
            {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("duplicate answer for '{id}'"),
                });
            }
        }
        if !answers.contains_key(SUMMARY_ID) {
            return Err(Error::validation(format!(
                "scripted answers must acknowledge the summary with a '{SUMMARY_ID}' line"
            )));
        }
        Ok(ScriptedAnswers { answers })
    }

    pub fn load_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn insert(&mut self, question_id: &str, answer: &str) {
        self.answers.insert(question_id.into(), answer.into());
    }

    /// The answer for a question; silence when none was scripted.
    pub fn get(&self, question_id: &str) -> &str {
        self.answers.get(question_id).map_or("", String::as_str)
    }
}

/// Runs a whole session from scripted answers and returns its id and report.
pub fn run_batch(
    engine: &SessionEngine,
    sheet: RegistrationSheet,
    script: SessionScript,
    answers: &ScriptedAnswers,
) -> Result<(String, SessionReport)> {
    let id = engine.create_session(sheet, script)?;
    loop {
        let prompt = engine.next_prompt(&id)?;
        let Some(question_id) = prompt.question_id() else {
            break;
        };
        let ack = engine.submit_answer(&id, answers.get(question_id))?;
        if let Some(report) = ack.report {
            return Ok((id, report));
        }
    }
    Err(Error::Protocol(format!(
        "session '{id}' ended without a report"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sheet(age: u32) -> RegistrationSheet {
        RegistrationSheet {
            user_id: "u1".into(),
            age,
            tech_skills: true,
            hearing_problems: false,
            education: Education::Basic,
            impairment: Impairment::Absent,
            frame_of_mind: FrameOfMind::Happy,
            stressed: false,
            focused: true,
            notes: String::new(),
        }
    }

    #[test]
    fn sheet_rules() {
        assert!(sheet(60).validate().is_ok());
        assert!(matches!(sheet(59).validate(), Err(Error::Validation(_))));
        let json = serde_json::to_string(&sheet(70))
            .unwrap()
            .replace("basic", "phd");
        assert!(matches!(
            RegistrationSheet::from_json(&json),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn yes_no_keywords() {
        let c = YesNoClassifier::default();
        assert_eq!(c.classify("sí, claro"), Outcome::Yes);
        assert_eq!(c.classify("Of course I have"), Outcome::Yes);
        assert_eq!(c.classify("no, nunca"), Outcome::No);
        assert_eq!(c.classify("well, not really, yes"), Outcome::No);
        assert_eq!(c.classify(""), Outcome::Na);
        assert_eq!(c.classify("hmm"), Outcome::Na);
    }

    #[test]
    fn scripted_answers_need_summary_ack() {
        assert!(ScriptedAnswers::parse("q1\tyes\n").is_err());
        let a = ScriptedAnswers::parse("summary\tcontinue\nq1\tyes\n# c\nq3\n").unwrap();
        assert_eq!(a.get("q1"), "yes");
        assert_eq!(a.get("q3"), "");
        assert_eq!(a.get("q2"), "");
        assert!(ScriptedAnswers::parse("summary\tok\nq1\ta\nq1\tb\n").is_err());
    }
}
