//! Question templates with an `{ENTITY}` slot.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

pub const SLOT: &str = "{ENTITY}";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub stage: String,
    pub kind: String,
    pub outcome: String,
    pub text: String,
}

impl Template {
    pub fn fill(&self, value: &str) -> String {
        self.text.replace(SLOT, value)
    }
}

/// Template table read from `stage<TAB>kind<TAB>outcome<TAB>text` lines.
#[derive(Debug, Clone)]
pub struct Templates {
    rows: Vec<Template>,
}

const BUNDLED: &str = include_str!("../../data/templates.tsv");

/// (stage, kind, outcome, count) every table must provide.
const REQUIRED: &[(&str, &str, &str, usize)] = &[
    ("dichotomous", "person", "", 4),
    ("dichotomous", "location", "", 4),
    ("followup", "person", "yes", 1),
    ("followup", "person", "no", 1),
    ("followup", "person", "na", 1),
    ("followup", "location", "yes", 1),
    ("followup", "location", "no", 1),
    ("followup", "location", "na", 1),
    ("distractor", "meaning", "", 1),
    ("attention", "who", "", 1),
    ("attention", "what", "future", 1),
    ("attention", "what", "past", 1),
    ("attention", "places", "", 1),
    ("interest", "any", "", 1),
];

impl Templates {
    pub fn bundled() -> Self {
        Self::load(BUNDLED.as_bytes()).expect("bundled templates are valid")
    }

    pub fn load(reader: impl BufRead) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let parse = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let line = line.map_err(|e| parse(e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [stage, kind, outcome, text] = fields[..] else {
                return Err(parse(format!(
                    "expected 4 tab-separated fields, got {}",
                    fields.len()
                )));
            };
            if text.trim().is_empty() {
                return Err(parse("empty template text".into()));
            }
            rows.push(Template {
                stage: stage.trim().to_string(),
                kind: kind.trim().to_string(),
                outcome: outcome.trim().to_string(),
                text: text.trim().to_string(),
            });
        }
        let templates = Templates { rows };
        for (stage, kind, outcome, count) in REQUIRED {
            let found = templates.select(stage, kind, outcome).len();
            if found != *count {
                return Err(Error::validation(format!(
                    "expected {count} template(s) for {stage}/{kind}/{outcome}, found {found}"
                )));
            }
        }
        Ok(templates)
    }

    pub fn load_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::load(std::io::BufReader::new(file))
    }

    pub fn select(&self, stage: &str, kind: &str, outcome: &str) -> Vec<&Template> {
        self.rows
            .iter()
            .filter(|t| t.stage == stage && t.kind == kind && t.outcome == outcome)
            .collect()
    }

    /// The single template for a slot; presence is checked at load time.
    pub fn one(&self, stage: &str, kind: &str, outcome: &str) -> &Template {
        self.select(stage, kind, outcome)[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_is_complete() {
        let t = Templates::bundled();
        assert_eq!(t.select("dichotomous", "person", "").len(), 4);
        assert_eq!(
            t.one("followup", "person", "yes").fill("Teresa Ribera"),
            "What facts do you know about Teresa Ribera's life?"
        );
    }

    #[test]
    fn missing_rows_are_rejected() {
        let only_one = "dichotomous\tperson\t\tHave you ever heard about {ENTITY}?\n";
        assert!(matches!(
            Templates::load(only_one.as_bytes()),
            Err(Error::Validation(_))
        ));
        let bad = "dichotomous\tperson\tHave you ever heard about {ENTITY}?\n";
        assert!(matches!(
            Templates::load(bad.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
