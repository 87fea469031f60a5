//! Per-user dataset construction, gain-ratio feature ranking, a depth-capped
//! decision tree and user-grouped cross-validation.

mod eval;
pub mod synthetic;
mod tree;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dialogue::{Education, Impairment, RegistrationSheet, SessionReport};
use crate::error::{Error, Result};

pub use eval::{evaluate, grouped_kfold, ClassMetrics, EvalReport};
pub use tree::{train_decision_tree, DecisionTree, Node, Prediction, Split, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Present,
    Absent,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Present, Label::Absent];

    pub fn index(self) -> usize {
        match self {
            Label::Present => 0,
            Label::Absent => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Present => "present",
            Label::Absent => "absent",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "present" => Ok(Label::Present),
            "absent" => Ok(Label::Absent),
            other => Err(Error::validation(format!("unknown label '{other}'"))),
        }
    }
}

impl From<Impairment> for Label {
    fn from(i: Impairment) -> Self {
        match i {
            Impairment::Absent => Label::Absent,
            Impairment::Mild | Impairment::Severe => Label::Present,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Boolean,
    Nominal,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Num(f64),
    Cat(String),
}

impl Value {
    /// Key used to group rows for boolean and nominal splits.
    pub(crate) fn category(&self) -> String {
        match self {
            Value::Bool(b) => b.to_string(),
            Value::Cat(c) => c.clone(),
            Value::Num(x) => x.to_string(),
        }
    }

    pub(crate) fn number(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
}

/// One row: a group id (the user), feature values and the label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub user_id: String,
    pub values: Vec<Option<Value>>,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<FeatureSpec>,
    pub rows: Vec<Example>,
}

impl Dataset {
    pub fn new(features: Vec<FeatureSpec>) -> Self {
        Dataset {
            features,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Example) -> Result<()> {
        if row.values.len() != self.features.len() {
            return Err(Error::contract(format!(
                "row for '{}' has {} values, schema has {}",
                row.user_id,
                row.values.len(),
                self.features.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// A column with every value present.
    pub fn column(&self, feature: usize) -> Result<Vec<Value>> {
        self.rows
            .iter()
            .map(|r| {
                r.values[feature].clone().ok_or_else(|| {
                    Error::Evaluation(format!(
                        "user '{}' lacks feature '{}'",
                        r.user_id, self.features[feature].name
                    ))
                })
            })
            .collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

pub const SESSIONS: usize = 5;

/// Per-user features: sheet flags, age bucket, mean answer length and the
/// attention similarity of each of the five sessions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub focus: bool,
    pub stress: bool,
    pub studies: bool,
    pub technology: bool,
    pub age_bucket: u8,
    pub num_chars: f64,
    pub sims: [f64; SESSIONS],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub user_id: String,
    pub features: FeatureVector,
    pub label: Label,
}

/// Buckets [60,70], (70,80], (80,90], (90,100] as 1..=4.
pub fn age_bucket(age: u32) -> Result<u8> {
    match age {
        60..=70 => Ok(1),
        71..=80 => Ok(2),
        81..=90 => Ok(3),
        91..=100 => Ok(4),
        _ => Err(Error::validation(format!("age {age} outside 60..=100"))),
    }
}

pub fn feature_schema() -> Vec<FeatureSpec> {
    let spec = |name: &str, kind| FeatureSpec {
        name: name.into(),
        kind,
    };
    let mut v = vec![
        spec("focus", FeatureKind::Boolean),
        spec("stress", FeatureKind::Boolean),
        spec("studies", FeatureKind::Boolean),
        spec("technology", FeatureKind::Boolean),
        spec("age", FeatureKind::Nominal),
        spec("num_chars", FeatureKind::Numeric),
    ];
    v.extend((1..=SESSIONS).map(|s| spec(&format!("sim_s{s}_q4"), FeatureKind::Numeric)));
    v
}

impl FeatureVector {
    pub fn values(&self) -> Vec<Option<Value>> {
        let mut v = vec![
            Some(Value::Bool(self.focus)),
            Some(Value::Bool(self.stress)),
            Some(Value::Bool(self.studies)),
            Some(Value::Bool(self.technology)),
            Some(Value::Cat(self.age_bucket.to_string())),
            Some(Value::Num(self.num_chars)),
        ];
        v.extend(self.sims.iter().map(|s| Some(Value::Num(*s))));
        v
    }
}

/// Aggregates a user's five session reports into one labeled example.
pub fn extract_features(
    sheet: &RegistrationSheet,
    reports: &[SessionReport],
) -> Result<LabeledExample> {
    if reports.len() != SESSIONS {
        return Err(Error::validation(format!(
            "user '{}' has {} session reports, expected {SESSIONS}",
            sheet.user_id,
            reports.len()
        )));
    }
    if let Some(r) = reports.iter().find(|r| r.user_id != sheet.user_id) {
        return Err(Error::validation(format!(
            "report '{}' belongs to user '{}'",
            r.session_id, r.user_id
        )));
    }
    let mut sims = [0.0; SESSIONS];
    for (slot, r) in sims.iter_mut().zip(reports) {
        *slot = r.attention_sim;
    }
    Ok(LabeledExample {
        user_id: sheet.user_id.clone(),
        features: FeatureVector {
            focus: sheet.focused,
            stress: sheet.stressed,
            studies: sheet.education == Education::Superior,
            technology: sheet.tech_skills,
            age_bucket: age_bucket(sheet.age)?,
            num_chars: reports
                .iter()
                .map(|r| r.avg_answer_length_chars)
                .sum::<f64>()
                / SESSIONS as f64,
            sims,
        },
        label: sheet.impairment.into(),
    })
}

impl From<&[LabeledExample]> for Dataset {
    fn from(examples: &[LabeledExample]) -> Self {
        Dataset {
            features: feature_schema(),
            rows: examples
                .iter()
                .map(|e| Example {
                    user_id: e.user_id.clone(),
                    values: e.features.values(),
                    label: e.label,
                })
                .collect(),
        }
    }
}

/// Writes `user_id,<features>,label` rows; missing values are empty cells.
pub fn write_csv(dataset: &Dataset, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["user_id".to_string()];
    header.extend(dataset.features.iter().map(|f| f.name.clone()));
    header.push("label".into());
    w.write_record(&header)?;
    for row in &dataset.rows {
        let mut record = vec![row.user_id.clone()];
        record.extend(row.values.iter().map(|v| match v {
            None => String::new(),
            Some(Value::Bool(b)) => b.to_string(),
            Some(Value::Num(x)) => x.to_string(),
            Some(Value::Cat(c)) => c.clone(),
        }));
        record.push(row.label.to_string());
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

/// Reads a dataset in the [`feature_schema`] layout.
pub fn read_csv(input: impl Read) -> Result<Dataset> {
    let schema = feature_schema();
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let mut expected = vec!["user_id".to_string()];
    expected.extend(schema.iter().map(|f| f.name.clone()));
    expected.push("label".into());
    if header != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}", expected.join(",")),
        });
    }
    let mut dataset = Dataset::new(schema.clone());
    for (i, record) in r.records().enumerate() {
        let line = i + 2;
        let record = record?;
        let parse = |message: String| Error::Parse { line, message };
        let mut values = Vec::with_capacity(schema.len());
        for (spec, cell) in schema.iter().zip(record.iter().skip(1)) {
            let cell = cell.trim();
            if cell.is_empty() {
                values.push(None);
                continue;
            }
            let value = match spec.kind {
                FeatureKind::Boolean => Value::Bool(
                    cell.parse()
                        .map_err(|_| parse(format!("{}: '{cell}' is not a boolean", spec.name)))?,
                ),
                FeatureKind::Numeric => Value::Num(
                    cell.parse()
                        .map_err(|_| parse(format!("{}: '{cell}' is not a number", spec.name)))?,
                ),
                FeatureKind::Nominal => Value::Cat(cell.to_string()),
            };
            values.push(Some(value));
        }
        let label = record
            .get(schema.len() + 1)
            .unwrap_or("")
            .parse()
            .map_err(|e: Error| parse(e.to_string()))?;
        dataset.push(Example {
            user_id: record.get(0).unwrap_or("").to_string(),
            values,
            label,
        })?;
    }
    Ok(dataset)
}

pub(crate) fn entropy(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn counts<'a>(labels: impl IntoIterator<Item = &'a Label>) -> [usize; 2] {
    let mut c = [0; 2];
    for l in labels {
        c[l.index()] += 1;
    }
    c
}

/// Information gain and split information of a partition of `labels`.
fn partition_scores(parts: &[[usize; 2]]) -> (f64, f64) {
    let total: [usize; 2] = parts
        .iter()
        .fold([0, 0], |acc, p| [acc[0] + p[0], acc[1] + p[1]]);
    let n = (total[0] + total[1]) as f64;
    let mut remainder = 0.0;
    let mut split_info = 0.0;
    for p in parts.iter().filter(|p| p[0] + p[1] > 0) {
        let w = (p[0] + p[1]) as f64 / n;
        remainder += w * entropy(*p);
        split_info -= w * w.log2();
    }
    (entropy(total) - remainder, split_info)
}

fn ratio(gain: f64, split_info: f64) -> f64 {
    if split_info <= 0.0 {
        0.0
    } else {
        gain / split_info
    }
}

/// Candidate split of one feature at a node.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Candidate {
    pub split: Split,
    pub gain: f64,
    pub gain_ratio: f64,
}

const TIE: f64 = 1e-12;

/// Best split of a column whose children all hold at least `min_child`
/// rows. Numeric thresholds are midpoints chosen by information gain, the
/// lowest threshold winning ties.
pub(crate) fn best_split(
    kind: FeatureKind,
    column: &[Value],
    labels: &[Label],
    min_child: usize,
) -> Result<Option<Candidate>> {
    match kind {
        FeatureKind::Boolean | FeatureKind::Nominal => {
            let mut groups: std::collections::BTreeMap<String, [usize; 2]> = Default::default();
            for (v, l) in column.iter().zip(labels) {
                groups.entry(v.category()).or_default()[l.index()] += 1;
            }
            if groups.len() < 2 || groups.values().any(|c| c[0] + c[1] < min_child) {
                return Ok(None);
            }
            let parts: Vec<[usize; 2]> = groups.values().copied().collect();
            let (gain, split_info) = partition_scores(&parts);
            Ok(Some(Candidate {
                split: Split::Categories(groups.into_keys().collect()),
                gain,
                gain_ratio: ratio(gain, split_info),
            }))
        }
        FeatureKind::Numeric => {
            let mut pairs: Vec<(f64, Label)> = Vec::with_capacity(column.len());
            for (v, l) in column.iter().zip(labels) {
                let x = v.number().ok_or_else(|| {
                    Error::contract(format!("non-numeric value {v:?} in numeric column"))
                })?;
                pairs.push((x, *l));
            }
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let total = counts(pairs.iter().map(|p| &p.1));
            let mut left = [0usize; 2];
            let mut best: Option<(f64, f64, f64)> = None;
            for i in 0..pairs.len().saturating_sub(1) {
                left[pairs[i].1.index()] += 1;
                if pairs[i].0 == pairs[i + 1].0 {
                    continue;
                }
                let n_left = i + 1;
                if n_left < min_child || pairs.len() - n_left < min_child {
                    continue;
                }
                let right = [total[0] - left[0], total[1] - left[1]];
                let (gain, split_info) = partition_scores(&[left, right]);
                if best.is_none_or(|(g, _, _)| gain > g + TIE) {
                    let threshold = (pairs[i].0 + pairs[i + 1].0) / 2.0;
                    best = Some((gain, split_info, threshold));
                }
            }
            Ok(best.map(|(gain, split_info, threshold)| Candidate {
                split: Split::Threshold(threshold),
                gain,
                gain_ratio: ratio(gain, split_info),
            }))
        }
    }
}

/// Gain ratio of one feature column against binary labels.
pub fn gain_ratio(kind: FeatureKind, column: &[Value], labels: &[Label]) -> Result<f64> {
    if column.len() != labels.len() {
        return Err(Error::contract(format!(
            "column has {} values but there are {} labels",
            column.len(),
            labels.len()
        )));
    }
    Ok(best_split(kind, column, labels, 1)?.map_or(0.0, |c| c.gain_ratio))
}

/// Features by gain ratio, highest first; ties keep declaration order.
pub fn rank_features(dataset: &Dataset) -> Result<Vec<(String, f64)>> {
    if dataset.is_empty() {
        return Err(Error::contract("cannot rank features of an empty dataset"));
    }
    let labels = dataset.labels();
    let mut ranked = Vec::with_capacity(dataset.features.len());
    for (i, spec) in dataset.features.iter().enumerate() {
        let gr = gain_ratio(spec.kind, &dataset.column(i)?, &labels)?;
        ranked.push((spec.name.clone(), gr));
    }
    // Stable sort keeps declaration order among equal ratios.
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Absent as A, Present as P};

    fn bools(xs: &[bool]) -> Vec<Value> {
        xs.iter().map(|&b| Value::Bool(b)).collect()
    }

    #[test]
    fn hand_example() {
        let labels = [P, P, P, A, A, A];
        let col = bools(&[true, true, false, false, false, false]);
        let gr = gain_ratio(FeatureKind::Boolean, &col, &labels).unwrap();
        assert!((gr - 0.5).abs() < 1e-6, "{gr}");
        let (gain, si) = partition_scores(&[[2, 0], [1, 3]]);
        assert!((gain - 0.4591).abs() < 5e-5);
        assert!((si - 0.9183).abs() < 5e-5);
    }

    #[test]
    fn identity_and_constant() {
        let labels = [P, A, P, A];
        let same = bools(&[true, false, true, false]);
        assert_eq!(
            gain_ratio(FeatureKind::Boolean, &same, &labels).unwrap(),
            1.0
        );
        let constant = bools(&[true; 4]);
        assert_eq!(
            gain_ratio(FeatureKind::Boolean, &constant, &labels).unwrap(),
            0.0
        );
        let nums: Vec<_> = [3.0; 4].iter().map(|&x| Value::Num(x)).collect();
        assert_eq!(
            gain_ratio(FeatureKind::Numeric, &nums, &labels).unwrap(),
            0.0
        );
        assert!(gain_ratio(FeatureKind::Boolean, &same[..3], &labels).is_err());
    }

    #[test]
    fn numeric_threshold_is_a_midpoint() {
        let labels = [A, A, P, P];
        let col: Vec<_> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x| Value::Num(x))
            .collect();
        let c = best_split(FeatureKind::Numeric, &col, &labels, 1)
            .unwrap()
            .unwrap();
        assert_eq!(c.split, Split::Threshold(3.0));
        assert_eq!(c.gain_ratio, 1.0);
    }

    #[test]
    fn age_buckets() {
        assert_eq!(age_bucket(60).unwrap(), 1);
        assert_eq!(age_bucket(70).unwrap(), 1);
        assert_eq!(age_bucket(75).unwrap(), 2);
        assert_eq!(age_bucket(80).unwrap(), 2);
        assert_eq!(age_bucket(81).unwrap(), 3);
        assert_eq!(age_bucket(100).unwrap(), 4);
        assert!(age_bucket(101).is_err());
        assert!(age_bucket(59).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let ex = LabeledExample {
            user_id: "u1".into(),
            features: FeatureVector {
                focus: true,
                stress: false,
                studies: true,
                technology: false,
                age_bucket: 2,
                num_chars: 54.2,
                sims: [0.39, 0.75, 0.12, 0.48, 0.34],
            },
            label: Label::Absent,
        };
        let ds = Dataset::from(std::slice::from_ref(&ex));
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("user_id,focus,stress,studies,technology,age,num_chars,sim_s1_q4"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), ds);
        let bad = text.replace("true,false,true", "yes,false,true");
        assert!(matches!(
            read_csv(bad.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
