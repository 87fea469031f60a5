use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{train_decision_tree, Dataset, Label, TreeParams};
use crate::error::{Error, Result};

/// Row indices per fold. Users are sorted, shuffled with `seed` and dealt
/// round-robin, so each user's rows share one fold.
pub fn grouped_kfold(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::validation(format!("need at least 2 folds, got {k}")));
    }
    let mut users: Vec<&str> = dataset
        .rows
        .iter()
        .map(|r| r.user_id.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if users.len() < k {
        return Err(Error::validation(format!(
            "{} users cannot fill {k} folds",
            users.len()
        )));
    }
    users.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let fold_of: std::collections::HashMap<&str, usize> =
        users.iter().enumerate().map(|(i, u)| (*u, i % k)).collect();
    let mut folds = vec![Vec::new(); k];
    for (i, row) in dataset.rows.iter().enumerate() {
        folds[fold_of[row.user_id.as_str()]].push(i);
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: Label,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub folds: usize,
    pub seed: u64,
    pub params: TreeParams,
    /// `confusion[actual][predicted]`, indexed by [`Label::index`].
    pub confusion: [[usize; 2]; 2],
    pub classes: Vec<ClassMetrics>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub mean_train_ms: f64,
    pub mean_test_ms: f64,
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

impl EvalReport {
    fn from_confusion(
        confusion: [[usize; 2]; 2],
        folds: usize,
        seed: u64,
        params: TreeParams,
        train_ms: f64,
        test_ms: f64,
    ) -> Self {
        let total: usize = confusion.iter().flatten().sum();
        let correct = confusion[0][0] + confusion[1][1];
        let classes = Label::ALL
            .into_iter()
            .map(|label| {
                let c = label.index();
                let tp = confusion[c][c] as f64;
                let actual = (confusion[c][0] + confusion[c][1]) as f64;
                let predicted = (confusion[0][c] + confusion[1][c]) as f64;
                let precision = safe_div(tp, predicted);
                let recall = safe_div(tp, actual);
                ClassMetrics {
                    label,
                    precision,
                    recall,
                    f_measure: safe_div(2.0 * precision * recall, precision + recall),
                }
            })
            .collect();
        EvalReport {
            folds,
            seed,
            params,
            confusion,
            classes,
            correct,
            total,
            accuracy: safe_div(correct as f64, total as f64),
            mean_train_ms: train_ms,
            mean_test_ms: test_ms,
        }
    }

    pub fn class(&self, label: Label) -> &ClassMetrics {
        &self.classes[label.index()]
    }

    /// Table with F-measure, recall and timings per class.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<4} {:<8} {:>10} {:>8} {:>11} {:>10}",
            "Alg.", "Class", "F-measure", "Recall", "Train (ms)", "Test (ms)"
        );
        for (i, c) in self.classes.iter().enumerate() {
            let alg = if i == 0 { "DT" } else { "" };
            let _ = writeln!(
                out,
                "{:<4} {:<8} {:>9.2}% {:>7.2}% {:>11.3} {:>10.3}",
                alg,
                c.label.as_str(),
                100.0 * c.f_measure,
                100.0 * c.recall,
                self.mean_train_ms,
                self.mean_test_ms
            );
        }
        let _ = writeln!(
            out,
            "Accuracy: {:.2}% ({}/{}), {}-fold grouped CV, seed {}, max depth {}",
            100.0 * self.accuracy,
            self.correct,
            self.total,
            self.folds,
            self.seed,
            self.params.max_depth
        );
        let [[pp, pa], [ap, aa]] = self.confusion;
        let _ = writeln!(
            out,
            "Confusion (rows actual, cols predicted: present, absent)"
        );
        let _ = writeln!(out, "  present {pp:>4} {pa:>4}");
        let _ = writeln!(out, "  absent  {ap:>4} {aa:>4}");
        out
    }
}

/// Grouped k-fold evaluation with a pooled confusion matrix.
pub fn evaluate(dataset: &Dataset, k: usize, seed: u64, params: TreeParams) -> Result<EvalReport> {
    let folds = grouped_kfold(dataset, k, seed)?;
    let mut confusion = [[0usize; 2]; 2];
    let (mut train_ms, mut test_ms) = (0.0, 0.0);
    for (f, test) in folds.iter().enumerate() {
        let train: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, rows)| rows.iter().copied())
            .collect();
        let start = Instant::now();
        let tree = train_decision_tree(&dataset.subset(&train), params)?;
        train_ms += start.elapsed().as_secs_f64() * 1e3;
        let start = Instant::now();
        for &i in test {
            let row = &dataset.rows[i];
            let predicted = tree.predict(&row.values)?.label;
            confusion[row.label.index()][predicted.index()] += 1;
        }
        test_ms += start.elapsed().as_secs_f64() * 1e3;
    }
    Ok(EvalReport::from_confusion(
        confusion,
        k,
        seed,
        params,
        train_ms / k as f64,
        test_ms / k as f64,
    ))
}
