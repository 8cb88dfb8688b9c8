//! The four counterfactual objectives, all minimized:
//! validity (o1), distance to the point of interest (o2), sparsity (o3)
//! and plausibility (o4).

mod gower;
mod resilience;

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureStats, Value};
use crate::error::{Error, Result};
use crate::model::Classifier;

pub use gower::{gower_dist, obj_distance, obj_plausibility, obj_sparsity};
pub use resilience::{
    resilience_scores, resilience_step, FeatureResilience, ResilienceReport, ResilienceStep,
    STEP_DIVISOR,
};

/// Lower end of the target probability range `[0.5, 1]`.
pub const TARGET_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Validity,
    Distance,
    Sparsity,
    Plausibility,
}

impl Objective {
    pub const ALL: [Objective; 4] = [
        Objective::Validity,
        Objective::Distance,
        Objective::Sparsity,
        Objective::Plausibility,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Objective::Validity => "o1",
            Objective::Distance => "o2",
            Objective::Sparsity => "o3",
            Objective::Plausibility => "o4",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Objective::Validity => "validity",
            Objective::Distance => "distance",
            Objective::Sparsity => "sparsity",
            Objective::Plausibility => "plausibility",
        };
        f.write_str(name)
    }
}

/// `(o1, o2, o3, o4)`; sparsity is stored as an integral `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector(pub [f64; 4]);

impl ObjectiveVector {
    pub fn new(validity: f64, distance: f64, sparsity: usize, plausibility: f64) -> Self {
        ObjectiveVector([validity, distance, sparsity as f64, plausibility])
    }

    pub fn validity(&self) -> f64 {
        self.0[0]
    }

    pub fn distance(&self) -> f64 {
        self.0[1]
    }

    pub fn sparsity(&self) -> usize {
        self.0[2] as usize
    }

    pub fn plausibility(&self) -> f64 {
        self.0[3]
    }

    /// A solution is a valid counterfactual iff `o1 <= 0`, under either form of o1.
    pub fn is_valid(&self) -> bool {
        self.validity() <= 0.0
    }

    pub fn as_array(&self) -> &[f64; 4] {
        &self.0
    }
}

impl Index<Objective> for ObjectiveVector {
    type Output = f64;

    fn index(&self, o: Objective) -> &f64 {
        &self.0[o.index()]
    }
}

impl Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

fn check_probability(p_hat: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(Error::Contract(format!(
            "probability {p_hat} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Base validity: 0 inside the target range, else the distance `0.5 - p_hat` to it.
pub fn obj_validity(p_hat: f64) -> Result<f64> {
    check_probability(p_hat)?;
    Ok(if p_hat >= TARGET_THRESHOLD {
        0.0
    } else {
        TARGET_THRESHOLD - p_hat
    })
}

/// Validity with integrated resilience, in `[-1, 0.5]`: minus the mean
/// resilience for valid candidates, the base distance otherwise.
pub fn obj_validity_resilient(p_hat: f64, report: Option<&ResilienceReport>) -> Result<f64> {
    check_probability(p_hat)?;
    if p_hat >= TARGET_THRESHOLD {
        let report = report.ok_or_else(|| {
            Error::Contract("valid candidate evaluated without a resilience report".into())
        })?;
        Ok(0.0 - report.mean)
    } else {
        Ok(TARGET_THRESHOLD - p_hat)
    }
}

/// Everything objective evaluation needs besides the candidate itself.
#[derive(Clone, Copy)]
pub struct EvalContext<'a> {
    pub x_pt: &'a [Value],
    pub model: &'a dyn Classifier,
    pub train: &'a Dataset,
    pub stats: &'a FeatureStats,
    pub resilience: bool,
}

impl fmt::Debug for EvalContext<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvalContext")
            .field("x_pt", &self.x_pt)
            .field("train_rows", &self.train.len())
            .field("resilience", &self.resilience)
            .finish_non_exhaustive()
    }
}

/// Computes `(o1, o2, o3, o4)` for one candidate. Resilience is only walked
/// for valid candidates, and only when the context asks for it.
pub fn evaluate(candidate: &[Value], ctx: &EvalContext<'_>) -> Result<ObjectiveVector> {
    let p_hat = ctx.model.predict_proba(candidate);
    let validity = if ctx.resilience && p_hat >= TARGET_THRESHOLD {
        let report =
            resilience_scores(candidate, ctx.x_pt, ctx.model, &ctx.train.schema, ctx.stats)?;
        obj_validity_resilient(p_hat, Some(&report))?
    } else {
        obj_validity(p_hat)?
    };
    Ok(ObjectiveVector::new(
        validity,
        obj_distance(candidate, ctx.x_pt, ctx.stats),
        obj_sparsity(candidate, ctx.x_pt),
        obj_plausibility(candidate, ctx.train, ctx.stats)?,
    ))
}
