use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{
    Class, Dataset, DatasetConfig, FeatureConfig, FeatureKind, FeatureSchema, Instance, Role,
    Schema, SplitConfig, Value,
};
use crate::error::{Error, Result};

/// Shape of a generated dataset. Features are laid out continuous, then integer,
/// then categorical, and named `f0, f1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    #[serde(default)]
    pub continuous: usize,
    #[serde(default)]
    pub integer: usize,
    #[serde(default)]
    pub categorical: usize,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// The first `non_actionable` features are marked non-actionable.
    #[serde(default)]
    pub non_actionable: usize,
    /// Fraction of rows labeled positive.
    #[serde(default = "default_positive_rate")]
    pub positive_rate: f64,
}

fn default_positive_rate() -> f64 {
    0.4
}

const CATEGORIES: [&str; 3] = ["low", "mid", "high"];
const CONTINUOUS_MAX: f64 = 100.0;
const INTEGER_MAX: i64 = 20;

impl SyntheticSpec {
    pub fn numeric(continuous: usize, n: usize, seed: u64) -> Self {
        SyntheticSpec {
            continuous,
            integer: 0,
            categorical: 0,
            n,
            seed,
            non_actionable: 0,
            positive_rate: default_positive_rate(),
        }
    }

    pub fn n_features(&self) -> usize {
        self.continuous + self.integer + self.categorical
    }

    pub fn schema(&self) -> Result<Schema> {
        let mut features = Vec::with_capacity(self.n_features());
        for i in 0..self.n_features() {
            let name = format!("f{i}");
            let mut f = if i < self.continuous {
                FeatureSchema::continuous(name)
            } else if i < self.continuous + self.integer {
                FeatureSchema::integer(name)
            } else {
                FeatureSchema::categorical(name, CATEGORIES)
            };
            f.actionable = i >= self.non_actionable;
            features.push(f);
        }
        Schema::new(features)
    }

    /// A dataset config describing the CSV this spec would be written to.
    pub fn dataset_config(&self, name: &str, csv: impl Into<PathBuf>) -> Result<DatasetConfig> {
        let schema = self.schema()?;
        Ok(DatasetConfig {
            name: name.to_string(),
            csv: csv.into(),
            class_column: "label".into(),
            positive_label: "1".into(),
            missing_tokens: vec![String::new(), "NA".into(), "?".into()],
            preset: None,
            split: SplitConfig::default(),
            seed: self.seed,
            features: schema
                .features()
                .iter()
                .map(|f| FeatureConfig {
                    name: f.name.clone(),
                    kind: f.kind,
                    actionable: f.actionable,
                    categories: f.categories.clone(),
                })
                .collect(),
        })
    }
}

/// Generates a linearly informative binary dataset.
///
/// Each row's score is a random-signed weighted sum of standardized features plus
/// Gaussian noise; the top `positive_rate` share of scores is labeled positive.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.n < 2 {
        return Err(Error::Config(format!("synthetic size {} < 2", spec.n)));
    }
    if spec.n_features() == 0 {
        return Err(Error::Config(
            "synthetic dataset needs at least one feature".into(),
        ));
    }
    if !(spec.positive_rate > 0.0 && spec.positive_rate < 1.0) {
        return Err(Error::Config("positive_rate must lie in (0, 1)".into()));
    }
    let schema = spec.schema()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let weights: Vec<f64> = (0..schema.len())
        .map(|_| {
            let magnitude = rng.random_range(0.5..1.5);
            if rng.random_bool(0.7) {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect();
    let category_effects: Vec<[f64; 3]> = (0..schema.len())
        .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
        .collect();
    let noise = Normal::new(0.0, 0.3).expect("valid normal");

    let mut rows = Vec::with_capacity(spec.n);
    let mut scores = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let mut values = Vec::with_capacity(schema.len());
        let mut score = noise.sample(&mut rng);
        for (i, f) in schema.features().iter().enumerate() {
            match f.kind {
                FeatureKind::NumericContinuous => {
                    let x = (rng.random_range(0.0..CONTINUOUS_MAX) * 100.0).round() / 100.0;
                    score += weights[i] * (x - CONTINUOUS_MAX / 2.0) / (CONTINUOUS_MAX / 3.5);
                    values.push(Value::Num(x));
                }
                FeatureKind::NumericInteger => {
                    let x = rng.random_range(0..=INTEGER_MAX) as f64;
                    let mid = INTEGER_MAX as f64 / 2.0;
                    score += weights[i] * (x - mid) / (mid / 1.75);
                    values.push(Value::Num(x));
                }
                FeatureKind::Categorical => {
                    let c = rng.random_range(0..CATEGORIES.len());
                    score += weights[i].abs() * category_effects[i][c];
                    values.push(Value::Cat(c as u32));
                }
            }
        }
        rows.push(values);
        scores.push(score);
    }

    let mut sorted = scores.clone();
    sorted.sort_by(f64::total_cmp);
    let n_negative = ((1.0 - spec.positive_rate) * spec.n as f64).round() as usize;
    let n_negative = n_negative.clamp(1, spec.n - 1);
    let threshold = sorted[n_negative];

    let instances = rows
        .into_iter()
        .zip(scores)
        .map(|(values, s)| {
            let class = if s >= threshold {
                Class::Positive
            } else {
                Class::Negative
            };
            Instance::new(values, Some(class))
        })
        .collect();
    Dataset::new(schema, instances, Role::Full)
}
