//! CART-style binary decision tree with Gini impurity and per-split random
//! feature subsets — the forest's weak learner.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ClassId, Dataset};
use crate::rng::{stream, StreamRng};
use crate::scalar::Scalar;

use rand::Rng;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("gini impurity of an empty node is undefined")]
    EmptyNode,
    #[error("input width {found} does not match training width {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed tree document: {0}")]
    Malformed(String),
}

/// Axis-aligned split: rows with `value <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRule<F> {
    pub feature_index: usize,
    pub threshold: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node<F> {
    Split {
        rule: SplitRule<F>,
        left: usize,
        right: usize,
    },
    Leaf {
        class_counts: [usize; 2],
    },
}

/// A fitted CART tree. Nodes are stored in an arena with the root at 0;
/// every leaf holds the class counts of the training rows that reached it.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<F> {
    nodes: Vec<Node<F>>,
    n_features: usize,
    max_features: usize,
    training_seed: u64,
}

/// Gini impurity of a two-class count pair: `1 - p0^2 - p1^2`.
///
/// Errors when both counts are zero.
pub fn gini(class_counts: [usize; 2]) -> Result<f64, TreeError> {
    let total = class_counts[0] + class_counts[1];
    if total == 0 {
        return Err(TreeError::EmptyNode);
    }
    Ok(gini_unchecked(class_counts, total as f64))
}

fn gini_unchecked(class_counts: [usize; 2], total: f64) -> f64 {
    let p0 = class_counts[0] as f64 / total;
    let p1 = class_counts[1] as f64 / total;
    1.0 - p0 * p0 - p1 * p1
}

/// Best `(feature, midpoint-threshold)` split over the candidate features by
/// weighted Gini decrease. Ties prefer the lower feature index, then the
/// lower threshold. Returns `None` when no split yields a strictly positive
/// decrease.
pub fn best_split<F: Scalar>(
    data: &Dataset<F>,
    rows: &[usize],
    candidate_features: &[usize],
) -> Option<(SplitRule<F>, f64)> {
    let n = rows.len();
    if n < 2 {
        return None;
    }
    let mut parent_counts = [0usize; 2];
    for &r in rows {
        parent_counts[data.label(r).index()] += 1;
    }
    if parent_counts[0] == 0 || parent_counts[1] == 0 {
        return None;
    }
    let n_f = n as f64;
    let parent_gini = gini_unchecked(parent_counts, n_f);

    let mut features: Vec<usize> = candidate_features.to_vec();
    features.sort_unstable();
    features.dedup();

    let mut best: Option<(SplitRule<F>, f64)> = None;
    let mut column: Vec<(F, ClassId)> = Vec::with_capacity(n);
    for feature_index in features {
        column.clear();
        column.extend(
            rows.iter()
                .map(|&r| (data.row(r)[feature_index], data.label(r))),
        );
        column.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

        let mut left_counts = [0usize; 2];
        for i in 0..n - 1 {
            left_counts[column[i].1.index()] += 1;
            if column[i].0 == column[i + 1].0 {
                continue;
            }
            let right_counts = [
                parent_counts[0] - left_counts[0],
                parent_counts[1] - left_counts[1],
            ];
            let n_left = (i + 1) as f64;
            let n_right = (n - i - 1) as f64;
            let decrease = parent_gini
                - (n_left * gini_unchecked(left_counts, n_left)
                    + n_right * gini_unchecked(right_counts, n_right))
                    / n_f;
            // Strictly-better acceptance plus ascending scan order realizes
            // the (lower feature, lower threshold) tie rule.
            if decrease > best.as_ref().map_or(0.0, |&(_, d)| d) {
                best = Some((
                    SplitRule {
                        feature_index,
                        threshold: midpoint(column[i].0, column[i + 1].0),
                    },
                    decrease,
                ));
            }
        }
    }
    best
}

// Midpoint of two adjacent distinct sorted values; falls back to the lower
// value when rounding would reach the upper one, keeping the split separating.
fn midpoint<F: Scalar>(a: F, b: F) -> F {
    let two = F::one() + F::one();
    let mid = a + (b - a) / two;
    if mid < b {
        mid
    } else {
        a
    }
}

impl<F: Scalar> DecisionTree<F> {
    /// Grows an unpruned CART tree: at every node `max_features` distinct
    /// features are drawn from the stream seeded by `seed`, the best split
    /// among them is taken, and growth stops at pure nodes, single-sample
    /// nodes, or nodes with no positive-gain split.
    ///
    /// Panics if `data` is empty.
    pub fn fit(data: &Dataset<F>, max_features: usize, seed: u64) -> Self {
        assert!(data.n_samples() > 0, "fit requires a nonempty dataset");
        let max_features = max_features.clamp(1, data.n_features());
        let mut rng = stream(seed);
        let rows: Vec<usize> = (0..data.n_samples()).collect();
        let mut nodes = Vec::new();
        grow(&mut nodes, data, rows, max_features, &mut rng);
        Self {
            nodes,
            n_features: data.n_features(),
            max_features,
            training_seed: seed,
        }
    }

    /// Routes `x` to a leaf and returns its class counts normalized to
    /// probabilities, indexed by class id.
    pub fn predict_proba(&self, x: &[F]) -> Result<[f64; 2], TreeError> {
        if x.len() != self.n_features {
            return Err(TreeError::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                Node::Split { rule, left, right } => {
                    node = if x[rule.feature_index] <= rule.threshold {
                        *left
                    } else {
                        *right
                    };
                }
                Node::Leaf { class_counts } => {
                    let total = (class_counts[0] + class_counts[1]) as f64;
                    return Ok([
                        class_counts[0] as f64 / total,
                        class_counts[1] as f64 / total,
                    ]);
                }
            }
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn max_features(&self) -> usize {
        self.max_features
    }

    pub fn training_seed(&self) -> u64 {
        self.training_seed
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Serializes the tree as a JSON document with nested node objects.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n_features": self.n_features,
            "max_features": self.max_features,
            "training_seed": self.training_seed,
            "root": self.node_to_json(0),
        })
    }

    fn node_to_json(&self, node: usize) -> serde_json::Value {
        match &self.nodes[node] {
            Node::Split { rule, left, right } => serde_json::json!({
                "split": {
                    "feature_index": rule.feature_index,
                    "threshold": rule.threshold,
                    "left": self.node_to_json(*left),
                    "right": self.node_to_json(*right),
                }
            }),
            Node::Leaf { class_counts } => serde_json::json!({
                "leaf": { "class_counts": class_counts }
            }),
        }
    }

    /// Rebuilds a tree from its nested JSON document.
    pub fn from_json(value: &serde_json::Value) -> Result<Self, TreeError> {
        let n_features = read_usize(value, "n_features")?;
        let max_features = read_usize(value, "max_features")?;
        let training_seed = value
            .get("training_seed")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| TreeError::Malformed("missing training_seed".into()))?;
        let root = value
            .get("root")
            .ok_or_else(|| TreeError::Malformed("missing root node".into()))?;
        let mut nodes = Vec::new();
        node_from_json(root, &mut nodes, n_features)?;
        Ok(Self {
            nodes,
            n_features,
            max_features,
            training_seed,
        })
    }
}

fn read_usize(value: &serde_json::Value, key: &str) -> Result<usize, TreeError> {
    value
        .get(key)
        .and_then(serde_json::Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| TreeError::Malformed(format!("missing {key}")))
}

fn node_from_json<F: Scalar>(
    value: &serde_json::Value,
    nodes: &mut Vec<Node<F>>,
    n_features: usize,
) -> Result<usize, TreeError> {
    let id = nodes.len();
    if let Some(split) = value.get("split") {
        let feature_index = read_usize(split, "feature_index")?;
        if feature_index >= n_features {
            return Err(TreeError::Malformed(format!(
                "feature index {feature_index} out of range"
            )));
        }
        let threshold = split
            .get("threshold")
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| TreeError::Malformed("missing threshold".into()))?;
        nodes.push(Node::Leaf { class_counts: [0, 0] }); // placeholder
        let left_value = split
            .get("left")
            .ok_or_else(|| TreeError::Malformed("split missing left child".into()))?;
        let right_value = split
            .get("right")
            .ok_or_else(|| TreeError::Malformed("split missing right child".into()))?;
        let left = node_from_json(left_value, nodes, n_features)?;
        let right = node_from_json(right_value, nodes, n_features)?;
        nodes[id] = Node::Split {
            rule: SplitRule {
                feature_index,
                threshold: F::from_f64_lossy(threshold),
            },
            left,
            right,
        };
        Ok(id)
    } else if let Some(leaf) = value.get("leaf") {
        let counts = leaf
            .get("class_counts")
            .and_then(serde_json::Value::as_array)
            .filter(|a| a.len() == 2)
            .ok_or_else(|| TreeError::Malformed("leaf missing class_counts".into()))?;
        let c0 = counts[0]
            .as_u64()
            .ok_or_else(|| TreeError::Malformed("bad class count".into()))?;
        let c1 = counts[1]
            .as_u64()
            .ok_or_else(|| TreeError::Malformed("bad class count".into()))?;
        if c0 + c1 == 0 {
            return Err(TreeError::Malformed("leaf with no training samples".into()));
        }
        nodes.push(Node::Leaf {
            class_counts: [c0 as usize, c1 as usize],
        });
        Ok(id)
    } else {
        Err(TreeError::Malformed(
            "node is neither a split nor a leaf".into(),
        ))
    }
}

fn grow<F: Scalar>(
    nodes: &mut Vec<Node<F>>,
    data: &Dataset<F>,
    rows: Vec<usize>,
    max_features: usize,
    rng: &mut StreamRng,
) -> usize {
    let mut class_counts = [0usize; 2];
    for &r in &rows {
        class_counts[data.label(r).index()] += 1;
    }
    let id = nodes.len();
    nodes.push(Node::Leaf { class_counts });
    if rows.len() < 2 || class_counts[0] == 0 || class_counts[1] == 0 {
        return id;
    }

    let candidates = draw_features(rng, data.n_features(), max_features);
    let Some((rule, _decrease)) = best_split(data, &rows, &candidates) else {
        return id;
    };

    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .into_iter()
        .partition(|&r| data.row(r)[rule.feature_index] <= rule.threshold);
    debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());

    let left = grow(nodes, data, left_rows, max_features, rng);
    let right = grow(nodes, data, right_rows, max_features, rng);
    nodes[id] = Node::Split { rule, left, right };
    id
}

// Uniform draw of `count` distinct feature indices, ascending.
fn draw_features(rng: &mut StreamRng, n_features: usize, count: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n_features).collect();
    for i in 0..count {
        let j = i + rng.random_range(0..n_features - i);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool.sort_unstable();
    pool
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn dataset_1d(values: &[f64], labels: &[u8]) -> Dataset<f64> {
        let class_labels = labels
            .iter()
            .map(|&l| ClassId::from_index(l as usize).unwrap())
            .collect();
        Dataset::new(
            Matrix::from_vec(values.to_vec(), 1),
            class_labels,
            vec!["x".into()],
            ["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini([5, 5]).unwrap(), 0.5);
        assert_eq!(gini([10, 0]).unwrap(), 0.0);
        assert_eq!(gini([3, 1]).unwrap(), 0.375);
        assert!(matches!(gini([0, 0]), Err(TreeError::EmptyNode)));
    }

    #[test]
    fn best_split_finds_the_perfect_separator() {
        let d = dataset_1d(&[0.0, 1.0, 10.0, 11.0], &[0, 0, 1, 1]);
        let rows = [0, 1, 2, 3];
        let (rule, decrease) = best_split(&d, &rows, &[0]).unwrap();
        assert_eq!(rule.feature_index, 0);
        assert_eq!(rule.threshold, 5.5);
        assert_eq!(decrease, 0.5);
    }

    #[test]
    fn best_split_none_on_constant_feature() {
        let d = dataset_1d(&[2.0, 2.0, 2.0, 2.0], &[0, 1, 0, 1]);
        assert!(best_split(&d, &[0, 1, 2, 3], &[0]).is_none());
    }

    #[test]
    fn best_split_none_on_pure_node() {
        let d = dataset_1d(&[1.0, 2.0, 3.0], &[0, 0, 0]);
        assert!(best_split(&d, &[0, 1, 2], &[0]).is_none());
    }

    fn separable_2d() -> Dataset<f64> {
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            values.extend_from_slice(&[i as f64 * 0.3, 1.0]);
            labels.push(ClassId::FIRST);
        }
        for i in 0..6 {
            values.extend_from_slice(&[10.0 + i as f64 * 0.3, -1.0]);
            labels.push(ClassId::SECOND);
        }
        Dataset::new(
            Matrix::from_vec(values, 2),
            labels,
            vec!["x".into(), "y".into()],
            ["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn separable_data_is_fit_perfectly() {
        let d = separable_2d();
        let tree = DecisionTree::fit(&d, d.n_features(), 3);
        for i in 0..d.n_samples() {
            let proba = tree.predict_proba(d.row(i)).unwrap();
            assert_eq!(proba[d.label(i).index()], 1.0, "row {i}");
        }
    }

    #[test]
    fn single_sample_is_a_single_leaf() {
        let d = dataset_1d(&[4.0], &[1]);
        let tree = DecisionTree::fit(&d, 1, 0);
        assert_eq!(tree.n_nodes(), 1);
        assert_eq!(tree.predict_proba(&[123.0]).unwrap(), [0.0, 1.0]);
    }

    #[test]
    fn fit_is_deterministic_per_seed() {
        let d = separable_2d();
        let a = DecisionTree::fit(&d, 1, 7);
        let b = DecisionTree::fit(&d, 1, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn leaf_probabilities_are_normalized_counts() {
        // Identical feature vectors with mixed labels cannot be split, so
        // the tree is a single leaf with fractional probabilities.
        let d = dataset_1d(&[1.0, 1.0, 1.0, 1.0], &[0, 0, 0, 1]);
        let tree = DecisionTree::fit(&d, 1, 0);
        assert_eq!(tree.n_nodes(), 1);
        assert_eq!(tree.predict_proba(&[1.0]).unwrap(), [0.75, 0.25]);
    }

    #[test]
    fn predict_rejects_wrong_width() {
        let d = separable_2d();
        let tree = DecisionTree::fit(&d, 2, 0);
        assert!(matches!(
            tree.predict_proba(&[1.0]),
            Err(TreeError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn json_round_trip() {
        let d = separable_2d();
        let tree = DecisionTree::fit(&d, 2, 99);
        let doc = tree.to_json();
        let back = DecisionTree::<f64>::from_json(&doc).unwrap();
        assert_eq!(back, tree);
    }

    #[test]
    fn malformed_json_is_rejected() {
        let doc = serde_json::json!({"n_features": 2, "max_features": 1, "training_seed": 0,
            "root": {"leaf": {"class_counts": [0, 0]}}});
        assert!(DecisionTree::<f64>::from_json(&doc).is_err());
    }

    #[test]
    fn every_split_strictly_reduces_weighted_gini() {
        let d = separable_2d();
        let tree = DecisionTree::fit(&d, 2, 5);
        for node in &tree.nodes {
            if let Node::Split { left, right, .. } = node {
                let counts = |id: usize| -> [usize; 2] {
                    fn collect<F: Scalar>(nodes: &[Node<F>], id: usize, acc: &mut [usize; 2]) {
                        match &nodes[id] {
                            Node::Leaf { class_counts } => {
                                acc[0] += class_counts[0];
                                acc[1] += class_counts[1];
                            }
                            Node::Split { left, right, .. } => {
                                collect(nodes, *left, acc);
                                collect(nodes, *right, acc);
                            }
                        }
                    }
                    let mut acc = [0, 0];
                    collect(&tree.nodes, id, &mut acc);
                    acc
                };
                let l = counts(*left);
                let r = counts(*right);
                let parent = [l[0] + r[0], l[1] + r[1]];
                let nl = (l[0] + l[1]) as f64;
                let nr = (r[0] + r[1]) as f64;
                let np = nl + nr;
                let weighted = (nl * gini(l).unwrap() + nr * gini(r).unwrap()) / np;
                assert!(weighted < gini(parent).unwrap());
            }
        }
    }
}
