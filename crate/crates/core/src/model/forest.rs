use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{require_two_classes, Classifier};
use crate::data::{Dataset, FeatureKind, Schema, Value};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub ntree: usize,
    /// Features tried per node; `None` means `floor(sqrt(p))`, at least 1.
    pub mtry: Option<usize>,
    /// `None` grows until nodes are pure or too small.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            ntree: 100,
            mtry: None,
            max_depth: None,
            min_leaf: 1,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.ntree == 0 {
            return Err(Error::Config("ntree must be at least 1".into()));
        }
        if let Some(m) = self.mtry {
            if m == 0 || m > n_features {
                return Err(Error::Config(format!("mtry {m} outside [1, {n_features}]")));
            }
        }
        if self.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be at least 1".into()));
        }
        Ok(())
    }

    pub fn resolved_mtry(&self, n_features: usize) -> usize {
        self.mtry
            .unwrap_or_else(|| (n_features as f64).sqrt().floor() as usize)
            .clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Test {
    /// Numeric: go left when `x <= threshold`.
    Le(f64),
    /// Categorical: go left when `x == category`.
    Eq(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Node {
    Leaf {
        positive: bool,
    },
    Split {
        feature: u32,
        test: Test,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn vote(&self, x: &[Value]) -> bool {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { positive } => return *positive,
                Node::Split {
                    feature,
                    test,
                    left,
                    right,
                } => {
                    let go_left = match (test, x[*feature as usize]) {
                        (Test::Le(t), Value::Num(v)) => v <= *t,
                        (Test::Eq(c), Value::Cat(v)) => v == *c,
                        (_, v) => panic!("value {v:?} does not match split on feature {feature}"),
                    };
                    at = if go_left { *left } else { *right } as usize;
                }
            }
        }
    }
}

/// Bagged CART classifiers with Gini splits; probability is the positive vote share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<Tree>,
}

impl RandomForest {
    pub fn ntree(&self) -> usize {
        self.trees.len()
    }
}

impl Classifier for RandomForest {
    fn predict_proba(&self, x: &[Value]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.vote(x)).count();
        votes as f64 / self.trees.len() as f64
    }
}

pub fn train_random_forest(
    train: &Dataset,
    params: &ForestParams,
    seed: u64,
) -> Result<RandomForest> {
    params.validate(train.schema.len())?;
    require_two_classes(train)?;
    let rows: Vec<&[Value]> = train
        .instances
        .iter()
        .map(|i| i.values.as_slice())
        .collect();
    let labels: Vec<bool> = train.labels().map(|c| c.is_positive()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trees = (0..params.ntree)
        .map(|_| {
            let sample: Vec<usize> = if params.bootstrap {
                (0..rows.len())
                    .map(|_| rng.random_range(0..rows.len()))
                    .collect()
            } else {
                (0..rows.len()).collect()
            };
            let mut builder = TreeBuilder {
                schema: &train.schema,
                rows: &rows,
                labels: &labels,
                params,
                mtry: params.resolved_mtry(train.schema.len()),
                rng: &mut rng,
                nodes: Vec::new(),
            };
            builder.grow(sample, 0);
            Tree {
                nodes: builder.nodes,
            }
        })
        .collect();
    Ok(RandomForest { trees })
}

struct TreeBuilder<'a, R> {
    schema: &'a Schema,
    rows: &'a [&'a [Value]],
    labels: &'a [bool],
    params: &'a ForestParams,
    mtry: usize,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

struct Candidate {
    feature: usize,
    test: Test,
    impurity: f64,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

impl<R: Rng> TreeBuilder<'_, R> {
    fn grow(&mut self, sample: Vec<usize>, depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        let pos = sample.iter().filter(|&&r| self.labels[r]).count();
        let leaf = Node::Leaf {
            positive: 2 * pos >= sample.len(),
        };
        let pure = pos == 0 || pos == sample.len();
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || sample.len() < 2 * self.params.min_leaf {
            self.nodes.push(leaf);
            return id;
        }
        let Some(best) = self.best_split(&sample) else {
            self.nodes.push(leaf);
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) =
            sample
                .iter()
                .partition(|&&r| match (best.test, self.rows[r][best.feature]) {
                    (Test::Le(t), Value::Num(v)) => v <= t,
                    (Test::Eq(c), Value::Cat(v)) => v == c,
                    _ => unreachable!("split test matches feature kind"),
                });
        // Placeholder, patched once both children exist.
        self.nodes.push(leaf);
        let left_id = self.grow(left, depth + 1);
        let right_id = self.grow(right, depth + 1);
        self.nodes[id as usize] = Node::Split {
            feature: best.feature as u32,
            test: best.test,
            left: left_id,
            right: right_id,
        };
        id
    }

    /// Best Gini split over `mtry` random features; if none of them admits a
    /// valid split, the remaining features are tried in random order.
    fn best_split(&mut self, sample: &[usize]) -> Option<Candidate> {
        let mut features: Vec<usize> = (0..self.schema.len()).collect();
        features.shuffle(self.rng);
        let mut best: Option<Candidate> = None;
        for (tried, &f) in features.iter().enumerate() {
            if tried >= self.mtry && best.is_some() {
                break;
            }
            if let Some(c) = self.best_split_on(f, sample) {
                if best.as_ref().is_none_or(|b| c.impurity < b.impurity) {
                    best = Some(c);
                }
            }
        }
        best
    }

    fn best_split_on(&self, feature: usize, sample: &[usize]) -> Option<Candidate> {
        let min_leaf = self.params.min_leaf;
        let n = sample.len();
        let total_pos = sample.iter().filter(|&&r| self.labels[r]).count();
        let weighted = |lp: usize, ln: usize| {
            let (rp, rn) = (total_pos - lp, n - ln);
            (ln as f64 * gini(lp, ln) + rn as f64 * gini(rp, rn)) / n as f64
        };
        let mut best: Option<Candidate> = None;
        let mut consider = |test: Test, impurity: f64| {
            if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                best = Some(Candidate {
                    feature,
                    test,
                    impurity,
                });
            }
        };
        match self.schema.feature(feature).kind {
            FeatureKind::Categorical => {
                let width = self.schema.feature(feature).categories.len();
                let mut count = vec![0usize; width];
                let mut pos = vec![0usize; width];
                for &r in sample {
                    let c = self.rows[r][feature].as_cat().expect("categorical value") as usize;
                    count[c] += 1;
                    pos[c] += usize::from(self.labels[r]);
                }
                for c in 0..width {
                    if count[c] >= min_leaf && n - count[c] >= min_leaf {
                        consider(Test::Eq(c as u32), weighted(pos[c], count[c]));
                    }
                }
            }
            _ => {
                let mut sorted: Vec<(f64, bool)> = sample
                    .iter()
                    .map(|&r| {
                        (
                            self.rows[r][feature].as_num().expect("numeric value"),
                            self.labels[r],
                        )
                    })
                    .collect();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut left_pos = 0;
                for k in 1..n {
                    left_pos += usize::from(sorted[k - 1].1);
                    let (lo, hi) = (sorted[k - 1].0, sorted[k].0);
                    if lo == hi || k < min_leaf || n - k < min_leaf {
                        continue;
                    }
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    consider(Test::Le(threshold), weighted(left_pos, k));
                }
            }
        }
        best
    }
}
