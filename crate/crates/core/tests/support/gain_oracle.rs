//! Brute-force gain ratio written without the library's helpers.

use std::collections::HashMap;

use newscog::ml::{FeatureKind, Label, Value};

fn h(labels: &[Label]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let n = labels.len() as f64;
    let p = labels.iter().filter(|l| **l == Label::Present).count() as f64 / n;
    [p, 1.0 - p]
        .iter()
        .filter(|x| **x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

fn oracle_partition(groups: &[Vec<Label>], n: usize) -> (f64, f64) {
    let all: Vec<Label> = groups.iter().flatten().copied().collect();
    let mut ig = h(&all);
    let mut si = 0.0;
    for g in groups.iter().filter(|g| !g.is_empty()) {
        let w = g.len() as f64 / n as f64;
        ig -= w * h(g);
        si -= w * w.log2();
    }
    (ig, si)
}

pub fn gain_ratio(kind: FeatureKind, column: &[Value], labels: &[Label]) -> f64 {
    let n = labels.len();
    let ratio = |(ig, si): (f64, f64)| if si == 0.0 { 0.0 } else { ig / si };
    match kind {
        FeatureKind::Numeric => {
            let xs: Vec<f64> = column
                .iter()
                .map(|v| match v {
                    Value::Num(x) => *x,
                    _ => unreachable!(),
                })
                .collect();
            let mut distinct: Vec<f64> = xs.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            let mut best: Option<(f64, f64)> = None; // (gain, ratio)
            for pair in distinct.windows(2) {
                let t = (pair[0] + pair[1]) / 2.0;
                let below: Vec<Label> = (0..n).filter(|&i| xs[i] <= t).map(|i| labels[i]).collect();
                let above: Vec<Label> = (0..n).filter(|&i| xs[i] > t).map(|i| labels[i]).collect();
                let scores = oracle_partition(&[below, above], n);
                if best.is_none_or(|(g, _)| scores.0 > g + 1e-12) {
                    best = Some((scores.0, ratio(scores)));
                }
            }
            best.map_or(0.0, |b| b.1)
        }
        _ => {
            let mut groups: HashMap<String, Vec<Label>> = HashMap::new();
            for (v, l) in column.iter().zip(labels) {
                groups.entry(format!("{v:?}")).or_default().push(*l);
            }
            let groups: Vec<Vec<Label>> = groups.into_values().collect();
            ratio(oracle_partition(&groups, n))
        }
    }
}
