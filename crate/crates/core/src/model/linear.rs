use serde::{Deserialize, Serialize};

use super::logistic::sigmoid;
use super::Classifier;
use crate::data::Value;

/// Per-feature contribution of a [`LinearRule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearTerm {
    /// `weight * x` on the raw numeric value.
    Numeric(f64),
    /// Additive effect per category index.
    Categorical(Vec<f64>),
}

/// Fixed scoring rule `p = sigmoid(intercept + sum of terms)` on raw features.
///
/// Used as an oracle model: with all numeric weights positive it is
/// monotone non-decreasing in every numeric feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRule {
    pub intercept: f64,
    pub terms: Vec<LinearTerm>,
}

impl LinearRule {
    pub fn numeric(intercept: f64, weights: &[f64]) -> Self {
        LinearRule {
            intercept,
            terms: weights.iter().map(|&w| LinearTerm::Numeric(w)).collect(),
        }
    }

    pub fn score(&self, x: &[Value]) -> f64 {
        self.intercept
            + self
                .terms
                .iter()
                .zip(x)
                .map(|(t, v)| match (t, *v) {
                    (LinearTerm::Numeric(w), Value::Num(x)) => w * x,
                    (LinearTerm::Categorical(effects), Value::Cat(c)) => {
                        effects.get(c as usize).copied().unwrap_or(0.0)
                    }
                    _ => panic!("value {v:?} does not match linear term {t:?}"),
                })
                .sum::<f64>()
    }
}

impl Classifier for LinearRule {
    fn predict_proba(&self, x: &[Value]) -> f64 {
        sigmoid(self.score(x))
    }
}
