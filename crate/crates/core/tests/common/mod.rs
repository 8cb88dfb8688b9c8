#![allow(dead_code)]

use lexcf_core::data::{
    compute_feature_stats, generate_synthetic, split_dataset, FeatureStat, SyntheticSpec, TestCap,
};
use lexcf_core::ea::EaContext;
use lexcf_core::{
    Class, Classifier, Dataset, FeatureSchema, FeatureStats, Instance, Schema, Value,
};

/// Same probability everywhere.
pub struct Constant(pub f64);

impl Classifier for Constant {
    fn predict_proba(&self, _: &[Value]) -> f64 {
        self.0
    }
}

/// Positive while `x[feature]` lies in `[lo, hi]`.
pub struct Window {
    pub feature: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Classifier for Window {
    fn predict_proba(&self, x: &[Value]) -> f64 {
        let v = x[self.feature].as_num().unwrap();
        if v >= self.lo && v <= self.hi {
            1.0
        } else {
            0.0
        }
    }
}

pub fn numeric_stats(bounds: &[(f64, f64)]) -> FeatureStats {
    FeatureStats {
        features: bounds
            .iter()
            .map(|&(lower, upper)| FeatureStat::Numeric {
                lower,
                upper,
                range: upper - lower,
            })
            .collect(),
    }
}

pub fn nums(xs: &[f64]) -> Vec<Value> {
    xs.iter().map(|&x| Value::Num(x)).collect()
}

/// Numeric dataset from rows; labels alternate so both classes exist.
pub fn numeric_dataset(names: &[&str], rows: &[Vec<f64>]) -> Dataset {
    let schema = Schema::new(
        names
            .iter()
            .map(|n| FeatureSchema::continuous(*n))
            .collect(),
    )
    .unwrap();
    let instances = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let class = if i % 2 == 0 {
                Class::Negative
            } else {
                Class::Positive
            };
            Instance::new(nums(r), Some(class))
        })
        .collect();
    Dataset::new(schema, instances, lexcf_core::data::Role::Train).unwrap()
}

/// Train/test split and stats of a synthetic dataset.
pub struct Synthetic {
    pub train: Dataset,
    pub test: Dataset,
    pub stats: FeatureStats,
}

impl Synthetic {
    pub fn new(spec: &SyntheticSpec, split_seed: u64) -> Synthetic {
        let ds = generate_synthetic(spec).unwrap();
        let (train, test) = split_dataset(&ds, TestCap::Auto, split_seed).unwrap();
        let stats = compute_feature_stats(&train).unwrap();
        Synthetic { train, test, stats }
    }

    pub fn context<'a>(&'a self, x_pt: &'a [Value], model: &'a dyn Classifier) -> EaContext<'a> {
        EaContext {
            x_pt,
            model,
            train: &self.train,
            stats: &self.stats,
        }
    }
}
