use serde::{Deserialize, Serialize};

use super::{best_split, Candidate, Dataset, FeatureSpec, Label, Value, TIE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    /// One child per category, in this order.
    Categories(Vec<String>),
    /// Left child takes values `<=` the threshold.
    Threshold(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        class: Label,
        /// Training rows per class, indexed by [`Label::index`].
        distribution: [usize; 2],
    },
    Internal {
        feature: usize,
        split: Split,
        children: Vec<Node>,
        distribution: [usize; 2],
    },
}

impl Node {
    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Internal { children, .. } => {
                1 + children.iter().map(Node::depth).max().unwrap_or(0)
            }
        }
    }

    pub fn distribution(&self) -> [usize; 2] {
        match self {
            Node::Leaf { distribution, .. } | Node::Internal { distribution, .. } => *distribution,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    /// Nodes with fewer rows than this are not split.
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 5,
            min_leaf: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub features: Vec<FeatureSpec>,
    pub root: Node,
    pub params: TreeParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub distribution: [usize; 2],
}

/// Majority class; a tie goes to `Present`.
fn majority(distribution: [usize; 2]) -> Label {
    if distribution[Label::Present.index()] >= distribution[Label::Absent.index()] {
        Label::Present
    } else {
        Label::Absent
    }
}

fn leaf(distribution: [usize; 2]) -> Node {
    Node::Leaf {
        class: majority(distribution),
        distribution,
    }
}

/// Top-down induction on the highest gain ratio split, ties going to the
/// earlier feature.
pub fn train_decision_tree(dataset: &Dataset, params: TreeParams) -> Result<DecisionTree> {
    if dataset.is_empty() {
        return Err(Error::contract("cannot train on an empty dataset"));
    }
    let columns = (0..dataset.features.len())
        .map(|i| dataset.column(i))
        .collect::<Result<Vec<_>>>()?;
    let labels = dataset.labels();
    let rows: Vec<usize> = (0..dataset.len()).collect();
    let root = grow(dataset, &columns, &labels, &rows, 0, params)?;
    Ok(DecisionTree {
        features: dataset.features.clone(),
        root,
        params,
    })
}

fn grow(
    dataset: &Dataset,
    columns: &[Vec<Value>],
    labels: &[Label],
    rows: &[usize],
    depth: usize,
    params: TreeParams,
) -> Result<Node> {
    let mut distribution = [0; 2];
    for &r in rows {
        distribution[labels[r].index()] += 1;
    }
    let pure = distribution.contains(&0);
    if pure || depth >= params.max_depth || rows.len() < params.min_leaf.max(2) {
        return Ok(leaf(distribution));
    }
    let node_labels: Vec<Label> = rows.iter().map(|&r| labels[r]).collect();
    let mut best: Option<(usize, Candidate)> = None;
    for (f, spec) in dataset.features.iter().enumerate() {
        let column: Vec<Value> = rows.iter().map(|&r| columns[f][r].clone()).collect();
        let Some(c) = best_split(spec.kind, &column, &node_labels, 1)? else {
            continue;
        };
        if best
            .as_ref()
            .is_none_or(|(_, b)| c.gain_ratio > b.gain_ratio + TIE)
        {
            best = Some((f, c));
        }
    }
    let Some((feature, candidate)) = best else {
        return Ok(leaf(distribution));
    };
    let branch = |value: &Value| route(&candidate.split, value);
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); arity(&candidate.split)];
    for &r in rows {
        let b = branch(&columns[feature][r]).expect("training values have a branch");
        parts[b].push(r);
    }
    let children = parts
        .iter()
        .map(|p| grow(dataset, columns, labels, p, depth + 1, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(Node::Internal {
        feature,
        split: candidate.split,
        children,
        distribution,
    })
}

fn arity(split: &Split) -> usize {
    match split {
        Split::Categories(c) => c.len(),
        Split::Threshold(_) => 2,
    }
}

/// Child index for a value; `None` for a category unseen in training.
fn route(split: &Split, value: &Value) -> Option<usize> {
    match split {
        Split::Categories(cats) => {
            let key = value.category();
            cats.iter().position(|c| *c == key)
        }
        Split::Threshold(t) => value.number().map(|x| if x <= *t { 0 } else { 1 }),
    }
}

impl DecisionTree {
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Root-to-leaf descent. Every feature must be present.
    pub fn predict(&self, values: &[Option<Value>]) -> Result<Prediction> {
        if values.len() != self.features.len() {
            return Err(Error::Evaluation(format!(
                "expected {} feature values, got {}",
                self.features.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(Option::is_none) {
            return Err(Error::Evaluation(format!(
                "missing value for feature '{}'",
                self.features[i].name
            )));
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf {
                    class,
                    distribution,
                } => {
                    return Ok(Prediction {
                        label: *class,
                        distribution: *distribution,
                    })
                }
                Node::Internal {
                    feature,
                    split,
                    children,
                    distribution,
                } => {
                    let value = values[*feature].as_ref().expect("checked above");
                    match route(split, value) {
                        Some(b) => node = &children[b],
                        None => {
                            return Ok(Prediction {
                                label: majority(*distribution),
                                distribution: *distribution,
                            })
                        }
                    }
                }
            }
        }
    }

    /// Indented text rendering of the tree.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_node(&self.root, 0, &mut out);
        out
    }

    fn render_node(&self, node: &Node, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match node {
            Node::Leaf {
                class,
                distribution,
            } => out.push_str(&format!(
                "{pad}-> {class} ({}/{})\n",
                distribution[0], distribution[1]
            )),
            Node::Internal {
                feature,
                split,
                children,
                ..
            } => {
                let name = &self.features[*feature].name;
                for (i, child) in children.iter().enumerate() {
                    let cond = match split {
                        Split::Categories(c) => format!("{name} = {}", c[i]),
                        Split::Threshold(t) if i == 0 => format!("{name} <= {t}"),
                        Split::Threshold(t) => format!("{name} > {t}"),
                    };
                    out.push_str(&format!("{pad}{cond}\n"));
                    self.render_node(child, indent + 1, out);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{Example, FeatureKind};

    fn xor() -> Dataset {
        let mut d = Dataset::new(vec![
            FeatureSpec {
                name: "a".into(),
                kind: FeatureKind::Boolean,
            },
            FeatureSpec {
                name: "b".into(),
                kind: FeatureKind::Boolean,
            },
        ]);
        for (i, (a, b)) in [(false, false), (false, true), (true, false), (true, true)]
            .into_iter()
            .enumerate()
        {
            d.push(Example {
                user_id: format!("u{i}"),
                values: vec![Some(Value::Bool(a)), Some(Value::Bool(b))],
                label: if a != b {
                    Label::Present
                } else {
                    Label::Absent
                },
            })
            .unwrap();
        }
        d
    }

    #[test]
    fn xor_is_learned_at_depth_two() {
        let d = xor();
        let tree = train_decision_tree(&d, TreeParams::default()).unwrap();
        assert_eq!(tree.depth(), 2);
        for row in &d.rows {
            assert_eq!(tree.predict(&row.values).unwrap().label, row.label);
        }
    }

    #[test]
    fn depth_zero_is_a_majority_leaf() {
        let mut d = xor();
        d.rows[0].label = Label::Present;
        let tree = train_decision_tree(
            &d,
            TreeParams {
                max_depth: 0,
                min_leaf: 2,
            },
        )
        .unwrap();
        assert_eq!(tree.depth(), 0);
        assert_eq!(
            tree.predict(&d.rows[3].values).unwrap(),
            Prediction {
                label: Label::Present,
                distribution: [3, 1]
            }
        );
    }

    #[test]
    fn ties_go_to_present() {
        assert_eq!(majority([2, 2]), Label::Present);
        assert_eq!(majority([1, 2]), Label::Absent);
    }

    #[test]
    fn pure_data_and_missing_values() {
        let mut d = xor();
        for r in &mut d.rows {
            r.label = Label::Absent;
        }
        let tree = train_decision_tree(&d, TreeParams::default()).unwrap();
        assert!(matches!(
            tree.root,
            Node::Leaf {
                class: Label::Absent,
                ..
            }
        ));
        assert!(matches!(
            tree.predict(&[Some(Value::Bool(true)), None]),
            Err(Error::Evaluation(_))
        ));
        assert!(
            train_decision_tree(&Dataset::new(d.features.clone()), TreeParams::default()).is_err()
        );
    }
}
