use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{accuracy, LearnerConfig, LearnerParams};
use crate::data::{Dataset, Role};
use crate::error::{Error, Result};

const FOLDS: usize = 3;

/// Inclusive sampling ranges for random search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuningSpace {
    pub ntree: (usize, usize),
    /// `None` means `[1, #features]`.
    pub mtry: Option<(usize, usize)>,
    pub learning_rate: (f64, f64),
    /// Sampled log-uniformly.
    pub l2: (f64, f64),
}

impl Default for TuningSpace {
    fn default() -> Self {
        TuningSpace {
            ntree: (50, 500),
            mtry: None,
            learning_rate: (0.05, 1.0),
            l2: (1e-5, 1e-1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub config: LearnerConfig,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub best: LearnerConfig,
    pub trials: Vec<Trial>,
}

/// Random search over the tuned hyperparameters of `base`, scored by 3-fold
/// cross-validated accuracy on `train`. Ties go to the earliest trial.
pub fn tune_random_search(
    base: &LearnerConfig,
    train: &Dataset,
    space: &TuningSpace,
    n_trials: usize,
    seed: u64,
) -> Result<TuningResult> {
    if n_trials < 1 {
        return Err(Error::Config(
            "random search needs at least one trial".into(),
        ));
    }
    let p = train.schema.len();
    if train.len() < FOLDS {
        return Err(Error::Config(format!(
            "{} rows are too few for {FOLDS}-fold validation",
            train.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    order.shuffle(&mut rng);
    let folds: Vec<(Dataset, Dataset)> = (0..FOLDS)
        .map(|k| {
            let (held, kept): (Vec<usize>, Vec<usize>) =
                (0..order.len()).partition(|pos| pos % FOLDS == k);
            let held: Vec<usize> = held.into_iter().map(|pos| order[pos]).collect();
            let kept: Vec<usize> = kept.into_iter().map(|pos| order[pos]).collect();
            (
                train.subset(&kept, Role::Train),
                train.subset(&held, Role::Test),
            )
        })
        .collect();

    let mut trials = Vec::with_capacity(n_trials);
    for _ in 0..n_trials {
        let mut config = base.clone();
        match &mut config.params {
            LearnerParams::RandomForest(f) => {
                f.ntree = rng.random_range(space.ntree.0..=space.ntree.1);
                let (lo, hi) = space.mtry.unwrap_or((1, p));
                f.mtry = Some(rng.random_range(lo.max(1)..=hi.min(p)));
            }
            LearnerParams::Logistic(l) => {
                l.learning_rate = rng.random_range(space.learning_rate.0..=space.learning_rate.1);
                let (lo, hi) = (space.l2.0.ln(), space.l2.1.ln());
                l.l2 = rng.random_range(lo..=hi).exp();
            }
        }
        config.validate(p)?;
        let mut total = 0.0;
        for (fit, held) in &folds {
            total += accuracy(&super::train(fit, &config)?, held);
        }
        trials.push(Trial {
            config,
            accuracy: total / FOLDS as f64,
        });
    }
    let best = trials
        .iter()
        .fold(&trials[0], |best, t| {
            if t.accuracy > best.accuracy {
                t
            } else {
                best
            }
        })
        .config
        .clone();
    Ok(TuningResult { best, trials })
}
