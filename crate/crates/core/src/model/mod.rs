//! Black-box classifiers.
//!
//! The evolutionary search only ever sees a [`Classifier`]: a positive-class
//! probability oracle over raw feature vectors. Encoding (one-hot, min-max
//! scaling) stays inside each learner.

mod encode;
mod forest;
mod io;
mod linear;
mod logistic;
mod tune;

use serde::{Deserialize, Serialize};

use crate::data::{Class, Dataset, Value};
use crate::error::{Error, Result};

pub use encode::Encoder;
pub use forest::{train_random_forest, ForestParams, RandomForest};
pub use io::{load_model, save_model, schema_fingerprint, ModelFile, MODEL_FORMAT_VERSION};
pub use linear::{LinearRule, LinearTerm};
pub use logistic::{train_logistic, LogisticModel, LogisticParams};
pub use tune::{tune_random_search, Trial, TuningResult, TuningSpace};

/// Probability oracle for the positive class.
///
/// Implementations must be pure and safe to call from several threads at once.
pub trait Classifier: Send + Sync {
    /// Positive-class probability in `[0, 1]`.
    fn predict_proba(&self, x: &[Value]) -> f64;

    /// Positive iff `predict_proba(x) >= 0.5`.
    fn predict_class(&self, x: &[Value]) -> Class {
        Class::from_probability(self.predict_proba(x))
    }
}

impl<C: Classifier + ?Sized> Classifier for &C {
    fn predict_proba(&self, x: &[Value]) -> f64 {
        (**self).predict_proba(x)
    }
}

impl<C: Classifier + ?Sized> Classifier for Box<C> {
    fn predict_proba(&self, x: &[Value]) -> f64 {
        (**self).predict_proba(x)
    }
}

/// Any of the built-in trained or fixed models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "kebab-case")]
pub enum Model {
    Logistic(LogisticModel),
    RandomForest(RandomForest),
    Linear(LinearRule),
}

impl Model {
    pub fn learner_name(&self) -> &'static str {
        match self {
            Model::Logistic(_) => "logistic",
            Model::RandomForest(_) => "random-forest",
            Model::Linear(_) => "linear",
        }
    }
}

impl Classifier for Model {
    fn predict_proba(&self, x: &[Value]) -> f64 {
        match self {
            Model::Logistic(m) => m.predict_proba(x),
            Model::RandomForest(m) => m.predict_proba(x),
            Model::Linear(m) => m.predict_proba(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LearnerParams {
    Logistic(LogisticParams),
    #[serde(alias = "rf")]
    RandomForest(ForestParams),
}

/// Learner choice, its hyperparameters and the training seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    #[serde(flatten)]
    pub params: LearnerParams,
    #[serde(default)]
    pub seed: u64,
}

impl LearnerConfig {
    pub fn logistic(seed: u64) -> Self {
        LearnerConfig {
            params: LearnerParams::Logistic(LogisticParams::default()),
            seed,
        }
    }

    pub fn random_forest(params: ForestParams, seed: u64) -> Self {
        LearnerConfig {
            params: LearnerParams::RandomForest(params),
            seed,
        }
    }

    /// Parses a learner name as accepted on the command line.
    pub fn from_name(name: &str, seed: u64) -> Result<Self> {
        match name {
            "logistic" | "lr" => Ok(Self::logistic(seed)),
            "rf" | "random-forest" | "forest" => {
                Ok(Self::random_forest(ForestParams::default(), seed))
            }
            other => Err(Error::Config(format!("unknown learner `{other}`"))),
        }
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        match &self.params {
            LearnerParams::Logistic(p) => p.validate(),
            LearnerParams::RandomForest(p) => p.validate(n_features),
        }
    }
}

/// Trains whichever learner `cfg` names.
pub fn train(train: &Dataset, cfg: &LearnerConfig) -> Result<Model> {
    match &cfg.params {
        LearnerParams::Logistic(p) => train_logistic(train, p, cfg.seed).map(Model::Logistic),
        LearnerParams::RandomForest(p) => {
            train_random_forest(train, p, cfg.seed).map(Model::RandomForest)
        }
    }
}

/// Fraction of `ds` rows whose predicted class matches the label.
pub fn accuracy<C: Classifier + ?Sized>(model: &C, ds: &Dataset) -> f64 {
    if ds.is_empty() {
        return 0.0;
    }
    let correct = ds
        .instances
        .iter()
        .filter(|inst| Some(model.predict_class(&inst.values)) == inst.class)
        .count();
    correct as f64 / ds.len() as f64
}

pub(crate) fn require_two_classes(ds: &Dataset) -> Result<()> {
    if ds.is_empty() {
        return Err(Error::Training("empty training set".into()));
    }
    let positives = ds.labels().filter(|c| c.is_positive()).count();
    if positives == 0 || positives == ds.len() {
        return Err(Error::Training(
            "training set contains a single class".into(),
        ));
    }
    Ok(())
}
