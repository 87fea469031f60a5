//! Operations shared by the HTTP handlers and the command line, so both
//! paths produce the same artifacts from the same inputs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use newscog::dialogue::{run_batch, RegistrationSheet, ScriptedAnswers, SessionReport};
use newscog::ml::synthetic::{synthetic_cohort, CohortSpec};
use newscog::ml::{
    extract_features, rank_features, read_csv, train_decision_tree, write_csv, Dataset,
    DecisionTree, LabeledExample, TreeParams, SESSIONS,
};
use newscog::questgen::SessionScript;
use newscog::{Error, Result};

use crate::config::Resources;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub path: String,
    pub users: usize,
    /// Users left out, with the reason.
    pub skipped: Vec<String>,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

/// One row per user with exactly five scored sessions in the store.
pub fn build_dataset(res: &Resources) -> Result<(Dataset, DatasetSummary)> {
    let mut examples: Vec<LabeledExample> = Vec::new();
    let mut skipped = Vec::new();
    for (user, (sheet, reports)) in res.sessions.reports_by_user()? {
        if reports.len() != SESSIONS {
            skipped.push(format!(
                "{user}: {} scored sessions, need {SESSIONS}",
                reports.len()
            ));
            continue;
        }
        match extract_features(&sheet, &reports) {
            Ok(ex) => examples.push(ex),
            Err(e) => skipped.push(format!("{user}: {e}")),
        }
    }
    for s in &skipped {
        log::warn!("dataset: skipping {s}");
    }
    let dataset = Dataset::from(examples.as_slice());
    let path = res.dataset_path();
    save_dataset(&dataset, &path)?;
    let summary = DatasetSummary {
        path: path.display().to_string(),
        users: dataset.len(),
        skipped,
    };
    Ok((dataset, summary))
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    let file = fs::File::create(path).map_err(io(path))?;
    write_csv(dataset, file)
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    match fs::File::open(path) {
        Ok(file) => read_csv(file),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::Protocol(format!(
            "no dataset at {}; build one first",
            path.display()
        ))),
        Err(e) => Err(io(path)(e)),
    }
}

pub fn synthetic_dataset(seed: u64) -> Result<Dataset> {
    Ok(Dataset::from(
        synthetic_cohort(&CohortSpec::default(), seed)?.as_slice(),
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub tree: DecisionTree,
    pub depth: usize,
    pub rendered: String,
    pub ranking: Vec<(String, f64)>,
}

pub fn train(dataset: &Dataset, params: TreeParams) -> Result<TrainOutcome> {
    let tree = train_decision_tree(dataset, params)?;
    Ok(TrainOutcome {
        depth: tree.depth(),
        rendered: tree.render(),
        ranking: rank_features(dataset)?,
        tree,
    })
}

pub fn save_tree(tree: &DecisionTree, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    fs::write(path, serde_json::to_vec_pretty(tree)?).map_err(io(path))
}

pub fn script_for(res: &Resources, news_id: &str, seed: u64) -> Result<SessionScript> {
    let news = res.news.get(news_id)?;
    res.script_builder().build(&news, seed)
}

/// Non-interactive session over scripted answers.
pub fn run_scripted(
    res: &Resources,
    sheet: RegistrationSheet,
    news_id: &str,
    seed: u64,
    answers: &ScriptedAnswers,
) -> Result<(String, SessionReport)> {
    let script = script_for(res, news_id, seed)?;
    run_batch(&res.engine(), sheet, script, answers)
}
