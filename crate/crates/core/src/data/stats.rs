use serde::{Deserialize, Serialize};

use super::{Dataset, FeatureKind, Value};
use crate::error::{Error, Result};

/// Training-set statistics for one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum FeatureStat {
    Numeric {
        lower: f64,
        upper: f64,
        range: f64,
    },
    /// Sorted category indices seen in training.
    Categorical {
        observed: Vec<u32>,
    },
}

impl FeatureStat {
    /// `(lower, upper)` for numeric features.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            FeatureStat::Numeric { lower, upper, .. } => Some((lower, upper)),
            FeatureStat::Categorical { .. } => None,
        }
    }

    pub fn range(&self) -> Option<f64> {
        match *self {
            FeatureStat::Numeric { range, .. } => Some(range),
            FeatureStat::Categorical { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub features: Vec<FeatureStat>,
}

impl FeatureStats {
    pub fn get(&self, i: usize) -> &FeatureStat {
        &self.features[i]
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Per-feature min/max/range (numeric) or observed categories, over `train` only.
pub fn compute_feature_stats(train: &Dataset) -> Result<FeatureStats> {
    if train.is_empty() {
        return Err(Error::Config(
            "feature statistics need a non-empty training set".into(),
        ));
    }
    let features = train
        .schema
        .features()
        .iter()
        .enumerate()
        .map(|(i, f)| match f.kind {
            FeatureKind::Categorical => {
                let mut seen = vec![false; f.categories.len()];
                for inst in &train.instances {
                    if let Value::Cat(c) = inst.values[i] {
                        seen[c as usize] = true;
                    }
                }
                let observed = (0..seen.len() as u32)
                    .filter(|&c| seen[c as usize])
                    .collect();
                FeatureStat::Categorical { observed }
            }
            _ => {
                let (lower, upper) = train
                    .instances
                    .iter()
                    .filter_map(|inst| inst.values[i].as_num())
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                        (lo.min(x), hi.max(x))
                    });
                FeatureStat::Numeric {
                    lower,
                    upper,
                    range: upper - lower,
                }
            }
        })
        .collect();
    Ok(FeatureStats { features })
}
