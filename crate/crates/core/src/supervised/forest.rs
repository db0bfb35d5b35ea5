use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::features::FeatureMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Minimum bootstrap rows on each side of a split.
    pub min_leaf: usize,
    /// Candidate features per split; `None` means ⌈√d⌉.
    pub features_per_split: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 10,
            min_leaf: 2,
            features_per_split: None,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf {
        /// Fraction of fraud rows reaching the leaf.
        probability: f64,
        n: usize,
    },
    Split {
        feature: usize,
        /// Rows with value ≤ threshold go left.
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                Node::Leaf { probability, .. } => return *probability,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Visits every node depth-first.
    pub fn walk(&self, f: &mut impl FnMut(&Node)) {
        f(self);
        if let Node::Split { left, right, .. } = self {
            left.walk(f);
            right.walk(f);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Node>,
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub features_per_split: usize,
    pub seed: u64,
    pub n_features: usize,
}

/// Independent stream per tree, so trees can be built in any order.
pub fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// n row indices drawn with replacement.
pub fn bootstrap_indices(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct TreeBuilder<'a> {
    features: &'a FeatureMatrix,
    max_depth: usize,
    min_leaf: usize,
    features_per_split: usize,
}

struct BestSplit {
    decrease: f64,
    feature: usize,
    threshold: f64,
}

impl TreeBuilder<'_> {
    fn value(&self, row: usize, feature: usize) -> f64 {
        self.features.values[[row, feature]]
    }

    fn label(&self, row: usize) -> bool {
        self.features.target[row]
    }

    fn leaf(&self, rows: &[usize]) -> Node {
        let pos = rows.iter().filter(|&&r| self.label(r)).count();
        Node::Leaf {
            probability: if rows.is_empty() {
                0.0
            } else {
                pos as f64 / rows.len() as f64
            },
            n: rows.len(),
        }
    }

    fn best_split(&self, rows: &[usize], candidates: &[usize]) -> Option<BestSplit> {
        let n = rows.len();
        let total_pos = rows.iter().filter(|&&r| self.label(r)).count();
        let parent = gini(total_pos, n);
        let mut best: Option<BestSplit> = None;
        let mut sorted: Vec<(f64, bool)> = Vec::with_capacity(n);
        for &feature in candidates {
            sorted.clear();
            sorted.extend(
                rows.iter()
                    .map(|&r| (self.value(r, feature), self.label(r))),
            );
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_pos = 0;
            for i in 0..n - 1 {
                left_pos += usize::from(sorted[i].1);
                if sorted[i].0 == sorted[i + 1].0 {
                    continue;
                }
                let left_n = i + 1;
                let right_n = n - left_n;
                if left_n < self.min_leaf || right_n < self.min_leaf {
                    continue;
                }
                let child = (left_n as f64 * gini(left_pos, left_n)
                    + right_n as f64 * gini(total_pos - left_pos, right_n))
                    / n as f64;
                let decrease = parent - child;
                // Strict comparison keeps the lowest feature, then lowest threshold, on ties.
                if decrease > 0.0 && best.as_ref().is_none_or(|b| decrease > b.decrease) {
                    best = Some(BestSplit {
                        decrease,
                        feature,
                        threshold: 0.5 * (sorted[i].0 + sorted[i + 1].0),
                    });
                }
            }
        }
        best
    }

    fn build(&self, rows: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> Node {
        let pos = rows.iter().filter(|&&r| self.label(r)).count();
        if depth >= self.max_depth
            || rows.len() < 2 * self.min_leaf.max(1)
            || pos == 0
            || pos == rows.len()
        {
            return self.leaf(&rows);
        }
        let d = self.features.n_cols();
        let mut candidates =
            rand::seq::index::sample(rng, d, self.features_per_split.min(d)).into_vec();
        candidates.sort_unstable();
        let Some(split) = self.best_split(&rows, &candidates) else {
            return self.leaf(&rows);
        };
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.value(r, split.feature) <= split.threshold);
        Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.build(left, depth + 1, rng)),
            right: Box::new(self.build(right, depth + 1, rng)),
        }
    }
}

pub fn train_forest(
    features: &FeatureMatrix,
    params: &ForestParams,
) -> Result<ForestModel, ModelError> {
    if features.n_rows() == 0 || features.n_cols() == 0 {
        return Err(ModelError::EmptyMatrix);
    }
    let d = features.n_cols();
    let features_per_split = params
        .features_per_split
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize);
    if params.n_trees == 0
        || params.min_leaf == 0
        || features_per_split == 0
        || features_per_split > d
    {
        return Err(ModelError::InvalidHyperparameter(format!(
            "n_trees {}, min_leaf {}, features_per_split {features_per_split} (of {d})",
            params.n_trees, params.min_leaf
        )));
    }
    let builder = TreeBuilder {
        features,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        features_per_split,
    };
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(params.seed, t);
            let rows = bootstrap_indices(features.n_rows(), &mut rng);
            builder.build(rows, 0, &mut rng)
        })
        .collect();
    Ok(ForestModel {
        trees,
        n_trees: params.n_trees,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        features_per_split,
        seed: params.seed,
        n_features: d,
    })
}

/// Mean of per-tree leaf probabilities.
pub fn predict_proba_forest(
    model: &ForestModel,
    features: &FeatureMatrix,
) -> Result<Vec<f64>, ModelError> {
    if features.n_cols() != model.n_features {
        return Err(ModelError::DimensionMismatch {
            expected: model.n_features,
            found: features.n_cols(),
        });
    }
    let n_trees = model.trees.len() as f64;
    Ok(features
        .values
        .rows()
        .into_iter()
        .map(|row| {
            let row = row.to_vec();
            model.trees.iter().map(|t| t.predict(&row)).sum::<f64>() / n_trees
        })
        .collect())
}
