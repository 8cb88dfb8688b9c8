//! Univariate resilience of a valid counterfactual to further pushes of its
//! changed numeric features toward their training-set bounds.

use serde::{Deserialize, Serialize};

use crate::data::{FeatureKind, FeatureStats, Schema, Value};
use crate::error::{Error, Result};
use crate::model::Classifier;

/// Number of equal steps between a feature value and its bound.
pub const STEP_DIVISOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResilienceStep {
    /// Signed increment; positive when walking toward the upper bound.
    pub step: f64,
    pub steps_max: u32,
}

/// Step size and step count for one changed feature lying strictly inside its bounds.
///
/// `bound` is the upper bound when `x_cf > x_pt`, else the lower bound.
/// Integer features round the step half-to-even; a step that rounds to 0
/// becomes `+1` or `-1` in the walking direction.
pub fn resilience_step(x_cf: f64, x_pt: f64, bound: f64, is_integer: bool) -> ResilienceStep {
    debug_assert!(x_cf != x_pt, "resilience step needs a changed feature");
    let unit = if x_cf > x_pt { 1.0 } else { -1.0 };
    let mut step = (bound - x_cf) / STEP_DIVISOR;
    if is_integer {
        step = step.round_ties_even();
        if step == 0.0 {
            step = unit;
        }
    }
    let steps = ((bound - x_cf) / step).abs().floor();
    ResilienceStep {
        step,
        steps_max: (steps as u32).max(1),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureResilience {
    pub feature: usize,
    /// `None` when the feature already sits at or beyond its bound.
    pub step: Option<ResilienceStep>,
    pub steps_successful: u32,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResilienceReport {
    pub features: Vec<FeatureResilience>,
    /// Mean of the per-feature scores; 0 when no numeric feature changed.
    pub mean: f64,
}

impl ResilienceReport {
    fn from_features(features: Vec<FeatureResilience>) -> Self {
        let mean = if features.is_empty() {
            0.0
        } else {
            features.iter().map(|f| f.score).sum::<f64>() / features.len() as f64
        };
        ResilienceReport { features, mean }
    }
}

/// Scores every changed numeric feature of a valid counterfactual.
///
/// Each feature is walked alone, other features held at their counterfactual
/// values. The walk stops at the first step whose predicted class differs
/// from the counterfactual's; the score is successful steps over `steps_max`.
pub fn resilience_scores<C: Classifier + ?Sized>(
    x_cf: &[Value],
    x_pt: &[Value],
    model: &C,
    schema: &Schema,
    stats: &FeatureStats,
) -> Result<ResilienceReport> {
    let target = model.predict_class(x_cf);
    if !target.is_positive() {
        return Err(Error::Contract(
            "resilience is only defined for valid counterfactuals".into(),
        ));
    }
    let mut probe = x_cf.to_vec();
    let mut features = Vec::new();
    for (i, f) in schema.features().iter().enumerate() {
        if !f.kind.is_numeric() {
            continue;
        }
        let (Value::Num(cf), Value::Num(pt)) = (x_cf[i], x_pt[i]) else {
            return Err(Error::Contract(format!("feature {i} is not numeric")));
        };
        if cf == pt {
            continue;
        }
        let (lower, upper) = stats
            .get(i)
            .bounds()
            .ok_or_else(|| Error::Contract(format!("no numeric bounds for feature {i}")))?;
        if cf >= upper || cf <= lower {
            features.push(FeatureResilience {
                feature: i,
                step: None,
                steps_successful: 0,
                score: 1.0,
            });
            continue;
        }
        let bound = if cf > pt { upper } else { lower };
        let st = resilience_step(cf, pt, bound, f.kind == FeatureKind::NumericInteger);
        let mut successful = 0;
        for s in 1..=st.steps_max {
            let mut v = (cf + st.step * s as f64).clamp(lower, upper);
            if s == st.steps_max && (bound - v).abs() < st.step.abs() * 1e-9 {
                v = bound;
            }
            probe[i] = Value::Num(v);
            if model.predict_class(&probe) != target {
                break;
            }
            successful += 1;
        }
        probe[i] = x_cf[i];
        features.push(FeatureResilience {
            feature: i,
            step: Some(st),
            steps_successful: successful,
            score: successful as f64 / st.steps_max as f64,
        });
    }
    Ok(ResilienceReport::from_features(features))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuous_steps() {
        let up = resilience_step(50.0, 40.0, 100.0, false);
        assert_eq!(
            up,
            ResilienceStep {
                step: 5.0,
                steps_max: 10
            }
        );
        let down = resilience_step(30.0, 45.0, 10.0, false);
        assert_eq!(
            down,
            ResilienceStep {
                step: -2.0,
                steps_max: 10
            }
        );
    }

    #[test]
    fn integer_rounding_to_zero_uses_unit_step() {
        assert_eq!(
            resilience_step(4.0, 2.0, 5.0, true),
            ResilienceStep {
                step: 1.0,
                steps_max: 1
            }
        );
        assert_eq!(
            resilience_step(4.0, 6.0, 3.0, true),
            ResilienceStep {
                step: -1.0,
                steps_max: 1
            }
        );
    }

    #[test]
    fn integer_rounding_general() {
        // 16 / 10 = 1.6 -> 2, floor(16 / 2) = 8
        assert_eq!(
            resilience_step(4.0, 2.0, 20.0, true),
            ResilienceStep {
                step: 2.0,
                steps_max: 8
            }
        );
        // 25 / 10 = 2.5 -> 2 (half to even), floor(25 / 2) = 12
        assert_eq!(
            resilience_step(5.0, 1.0, 30.0, true),
            ResilienceStep {
                step: 2.0,
                steps_max: 12
            }
        );
        // 14 / 10 = 1.4 -> 1, 14 steps
        assert_eq!(resilience_step(6.0, 0.0, 20.0, true).steps_max, 14);
    }
}
