use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{Objective, ObjectiveVector};

/// Priority order of the four objectives; each appears exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Objective>", into = "Vec<Objective>")]
pub struct ObjectiveOrdering([Objective; 4]);

impl ObjectiveOrdering {
    /// Validity, distance, sparsity, plausibility.
    pub const LEX1: ObjectiveOrdering = ObjectiveOrdering([
        Objective::Validity,
        Objective::Distance,
        Objective::Sparsity,
        Objective::Plausibility,
    ]);

    /// Validity, sparsity, distance, plausibility.
    pub const LEX2: ObjectiveOrdering = ObjectiveOrdering([
        Objective::Validity,
        Objective::Sparsity,
        Objective::Distance,
        Objective::Plausibility,
    ]);

    pub fn new(order: [Objective; 4]) -> Result<Self> {
        for o in Objective::ALL {
            if !order.contains(&o) {
                return Err(Error::Config(format!(
                    "objective ordering {order:?} is missing {o}"
                )));
            }
        }
        Ok(ObjectiveOrdering(order))
    }

    pub fn objectives(&self) -> &[Objective; 4] {
        &self.0
    }
}

impl TryFrom<Vec<Objective>> for ObjectiveOrdering {
    type Error = Error;

    fn try_from(v: Vec<Objective>) -> Result<Self> {
        let arr: [Objective; 4] = v.try_into().map_err(|v: Vec<Objective>| {
            Error::Config(format!("ordering has {} entries, expected 4", v.len()))
        })?;
        ObjectiveOrdering::new(arr)
    }
}

impl From<ObjectiveOrdering> for Vec<Objective> {
    fn from(o: ObjectiveOrdering) -> Self {
        o.0.to_vec()
    }
}

impl FromStr for ObjectiveOrdering {
    type Err = Error;

    /// Accepts `lex1`, `lex2`, or a comma-separated list such as `o1,o3,o2,o4`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lex1" | "lex-ea-1" => return Ok(Self::LEX1),
            "lex2" | "lex-ea-2" => return Ok(Self::LEX2),
            _ => {}
        }
        let parsed = s
            .split(',')
            .map(|t| match t.trim().to_ascii_lowercase().as_str() {
                "o1" | "validity" => Ok(Objective::Validity),
                "o2" | "distance" => Ok(Objective::Distance),
                "o3" | "sparsity" => Ok(Objective::Sparsity),
                "o4" | "plausibility" => Ok(Objective::Plausibility),
                other => Err(Error::Config(format!("unknown objective `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        ObjectiveOrdering::try_from(parsed)
    }
}

impl fmt::Display for ObjectiveOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|o| o.short_name()).collect();
        f.write_str(&names.join(","))
    }
}

/// Inputs of the lexicographic tournament.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LexParams {
    /// Number of rounds, one victor each.
    pub n: usize,
    /// Participants per round.
    pub k: usize,
    /// Tolerance under which two objective values count as equal.
    pub theta: f64,
    pub ordering: ObjectiveOrdering,
}

impl LexParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(Error::Config("tournament needs n >= 1 and k >= 1".into()));
        }
        if self.theta.is_nan() || self.theta < 0.0 {
            return Err(Error::Config(format!(
                "tolerance {} must be >= 0",
                self.theta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonOutcome {
    FirstBetter,
    SecondBetter,
    Tie,
}

impl ComparisonOutcome {
    pub fn reversed(self) -> Self {
        match self {
            ComparisonOutcome::FirstBetter => ComparisonOutcome::SecondBetter,
            ComparisonOutcome::SecondBetter => ComparisonOutcome::FirstBetter,
            ComparisonOutcome::Tie => ComparisonOutcome::Tie,
        }
    }
}

/// Two-participant lexicographic comparison.
///
/// The first objective (in priority order) on which the values differ by more
/// than `theta` decides; if none does, the walk is repeated with zero
/// tolerance; identical vectors tie.
pub fn lex_compare(
    a: &ObjectiveVector,
    b: &ObjectiveVector,
    ordering: &ObjectiveOrdering,
    theta: f64,
) -> ComparisonOutcome {
    let decide = |tol: f64| {
        ordering.objectives().iter().find_map(|&o| {
            let (x, y) = (a[o], b[o]);
            if (x - y).abs() > tol {
                Some(if x < y {
                    ComparisonOutcome::FirstBetter
                } else {
                    ComparisonOutcome::SecondBetter
                })
            } else {
                None
            }
        })
    };
    decide(theta)
        .or_else(|| if theta > 0.0 { decide(0.0) } else { None })
        .unwrap_or(ComparisonOutcome::Tie)
}

/// Deterministic part of one tournament round: narrows `participants` objective
/// by objective, keeping everyone within `theta` of the current best. When all
/// objectives are exhausted with several survivors, the walk repeats with zero
/// tolerance. Returns the survivors, sorted by the last objective inspected.
pub fn lex_survivors(
    objectives: &[ObjectiveVector],
    mut participants: Vec<usize>,
    ordering: &ObjectiveOrdering,
    theta: f64,
) -> Vec<usize> {
    let mut tol = theta;
    loop {
        for &o in ordering.objectives() {
            if participants.len() <= 1 {
                return participants;
            }
            participants.sort_by(|&a, &b| objectives[a][o].total_cmp(&objectives[b][o]));
            let best = objectives[participants[0]][o];
            let keep = participants
                .iter()
                .take_while(|&&p| (best - objectives[p][o]).abs() <= tol)
                .count();
            participants.truncate(keep.max(1));
            if participants.len() == 1 {
                return participants;
            }
        }
        if tol == 0.0 {
            return participants;
        }
        tol = 0.0;
    }
}

/// Runs `params.n` tournament rounds and returns the victors' indices.
///
/// Each round samples `k` distinct participants; victors may repeat across
/// rounds. A round still tied after the zero-tolerance walk picks its victor
/// uniformly among the survivors.
pub fn lex_tournament_select<R: Rng + ?Sized>(
    params: &LexParams,
    objectives: &[ObjectiveVector],
    rng: &mut R,
) -> Result<Vec<usize>> {
    params.validate()?;
    if params.k > objectives.len() {
        return Err(Error::Config(format!(
            "tournament size {} exceeds population size {}",
            params.k,
            objectives.len()
        )));
    }
    let mut victors = Vec::with_capacity(params.n);
    while victors.len() < params.n {
        let participants = index::sample(rng, objectives.len(), params.k).into_vec();
        let survivors = lex_survivors(objectives, participants, &params.ordering, params.theta);
        let victor = if survivors.len() == 1 {
            survivors[0]
        } else {
            survivors[rng.random_range(0..survivors.len())]
        };
        victors.push(victor);
    }
    Ok(victors)
}
