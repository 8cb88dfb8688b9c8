use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::EAConfig;
use crate::data::{FeatureKind, FeatureStat, FeatureStats, Schema, Value};
use crate::error::{Error, Result};

const INIT_ATTEMPTS: usize = 16;

fn snap(kind: FeatureKind, v: f64, lower: f64, upper: f64) -> f64 {
    let v = if kind == FeatureKind::NumericInteger {
        v.round_ties_even()
    } else {
        v
    };
    // adding 0.0 turns -0.0 into 0.0 so equal genes hash equally
    v.clamp(lower, upper) + 0.0
}

fn resample_category<R: Rng + ?Sized>(current: u32, observed: &[u32], rng: &mut R) -> u32 {
    let others: Vec<u32> = observed.iter().copied().filter(|&c| c != current).collect();
    if others.is_empty() {
        current
    } else {
        others[rng.random_range(0..others.len())]
    }
}

fn random_gene<R: Rng + ?Sized>(
    kind: FeatureKind,
    current: Value,
    stat: &FeatureStat,
    rng: &mut R,
) -> Value {
    match (stat, current) {
        (FeatureStat::Numeric { lower, upper, .. }, Value::Num(_)) => {
            let v = if upper > lower {
                rng.random_range(*lower..=*upper)
            } else {
                *lower
            };
            Value::Num(snap(kind, v, *lower, *upper))
        }
        (FeatureStat::Categorical { observed }, Value::Cat(c)) => {
            Value::Cat(resample_category(c, observed, rng))
        }
        _ => current,
    }
}

/// Initial population: copies of `x_pt`, each with a random non-empty subset
/// of actionable features redrawn inside the training bounds.
pub fn init_population<R: Rng + ?Sized>(
    x_pt: &[Value],
    schema: &Schema,
    stats: &FeatureStats,
    cfg: &EAConfig,
    rng: &mut R,
) -> Result<Vec<Vec<Value>>> {
    let actionable = schema.actionable_indices();
    if actionable.is_empty() {
        return Err(Error::Config(
            "no actionable features: nothing can be changed".into(),
        ));
    }
    let mut population = Vec::with_capacity(cfg.population_size);
    for _ in 0..cfg.population_size {
        let size = rng.random_range(1..=actionable.len());
        let chosen = index::sample(rng, actionable.len(), size).into_vec();
        let mut genes = x_pt.to_vec();
        for _ in 0..INIT_ATTEMPTS {
            for &c in &chosen {
                let i = actionable[c];
                genes[i] = random_gene(schema.feature(i).kind, x_pt[i], stats.get(i), rng);
            }
            if genes != x_pt {
                break;
            }
        }
        population.push(genes);
    }
    Ok(population)
}

/// Uniform crossover over actionable genes, applied with `crossover_prob`.
pub fn crossover<R: Rng + ?Sized>(
    a: &[Value],
    b: &[Value],
    schema: &Schema,
    cfg: &EAConfig,
    rng: &mut R,
) -> (Vec<Value>, Vec<Value>) {
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    if rng.random_bool(cfg.crossover_prob) {
        for i in schema.actionable_indices() {
            if rng.random_bool(0.5) {
                std::mem::swap(&mut c1[i], &mut c2[i]);
            }
        }
    }
    (c1, c2)
}

/// Per-gene Gaussian or resample mutation on actionable genes, followed by
/// an independent reset of changed genes back to `x_pt`.
pub fn mutate<R: Rng + ?Sized>(
    genes: &mut [Value],
    x_pt: &[Value],
    schema: &Schema,
    stats: &FeatureStats,
    cfg: &EAConfig,
    rng: &mut R,
) {
    for i in schema.actionable_indices() {
        if rng.random_bool(cfg.mutation_prob) {
            let kind = schema.feature(i).kind;
            genes[i] = match (stats.get(i), genes[i]) {
                (
                    FeatureStat::Numeric {
                        lower,
                        upper,
                        range,
                    },
                    Value::Num(v),
                ) => {
                    let sigma = 0.1 * range;
                    let moved = if sigma > 0.0 {
                        v + Normal::new(0.0, sigma)
                            .expect("finite positive sigma")
                            .sample(rng)
                    } else {
                        v
                    };
                    Value::Num(snap(kind, moved, *lower, *upper))
                }
                (FeatureStat::Categorical { observed }, Value::Cat(c)) => {
                    Value::Cat(resample_category(c, observed, rng))
                }
                (_, g) => g,
            };
        }
        if genes[i] != x_pt[i] && rng.random_bool(cfg.reset_prob) {
            genes[i] = x_pt[i];
        }
    }
}

/// Counts of constraint checks over every genome a run creates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ConstraintAudit {
    pub candidates_checked: usize,
    pub actionability_violations: usize,
    pub feasibility_violations: usize,
}

impl ConstraintAudit {
    pub fn is_clean(&self) -> bool {
        self.actionability_violations == 0 && self.feasibility_violations == 0
    }

    /// Non-actionable genes must equal `x_pt`; changed numeric genes must lie
    /// within the training bounds (integers integral), changed categories
    /// must be known.
    pub fn check(
        &mut self,
        genes: &[Value],
        x_pt: &[Value],
        schema: &Schema,
        stats: &FeatureStats,
    ) {
        self.candidates_checked += 1;
        let mut actionability = false;
        let mut feasibility = false;
        for (i, f) in schema.features().iter().enumerate() {
            if genes[i] == x_pt[i] {
                continue;
            }
            if !f.actionable {
                actionability = true;
                continue;
            }
            feasibility |= match (stats.get(i), genes[i]) {
                (FeatureStat::Numeric { lower, upper, .. }, Value::Num(v)) => {
                    v < *lower
                        || v > *upper
                        || (f.kind == FeatureKind::NumericInteger && v.fract() != 0.0)
                }
                (FeatureStat::Categorical { .. }, Value::Cat(c)) => {
                    c as usize >= f.categories.len()
                }
                _ => true,
            };
        }
        debug_assert!(!actionability, "non-actionable gene changed: {genes:?}");
        debug_assert!(!feasibility, "infeasible gene: {genes:?}");
        self.actionability_violations += actionability as usize;
        self.feasibility_violations += feasibility as usize;
    }
}
