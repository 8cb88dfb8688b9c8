use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ea::Strategy;
use crate::objectives::{Objective, ObjectiveVector};
use crate::selection::{lex_compare, pareto_dominates, ComparisonOutcome, ObjectiveOrdering};

use super::PoiRecord;

/// Share of solutions with `o1 <= 0`; `None` for an empty list.
pub fn valid_fraction(solutions: &[ObjectiveVector]) -> Option<f64> {
    if solutions.is_empty() {
        return None;
    }
    let valid = solutions.iter().filter(|o| o.is_valid()).count();
    Some(valid as f64 / solutions.len() as f64)
}

/// Win, loss and tie counts of one side against another.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wlt {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
}

impl Wlt {
    pub fn total(&self) -> usize {
        self.wins + self.losses + self.ties
    }

    pub fn swapped(self) -> Wlt {
        Wlt {
            wins: self.losses,
            losses: self.wins,
            ties: self.ties,
        }
    }

    fn record(&mut self, outcome: ComparisonOutcome) {
        match outcome {
            ComparisonOutcome::FirstBetter => self.wins += 1,
            ComparisonOutcome::SecondBetter => self.losses += 1,
            ComparisonOutcome::Tie => self.ties += 1,
        }
    }
}

impl std::ops::AddAssign for Wlt {
    fn add_assign(&mut self, o: Wlt) {
        self.wins += o.wins;
        self.losses += o.losses;
        self.ties += o.ties;
    }
}

impl fmt::Display for Wlt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {}; {}", self.wins, self.losses, self.ties)
    }
}

fn cross<F>(lex: &[ObjectiveVector], par: &[ObjectiveVector], mut judge: F) -> Option<Wlt>
where
    F: FnMut(&ObjectiveVector, &ObjectiveVector) -> ComparisonOutcome,
{
    if lex.is_empty() || par.is_empty() {
        return None;
    }
    let mut wlt = Wlt::default();
    for a in lex {
        for b in par {
            wlt.record(judge(a, b));
        }
    }
    Some(wlt)
}

/// Every cross pair judged by Pareto dominance; mutually nondominated pairs tie.
pub fn compare_pareto(lex: &[ObjectiveVector], par: &[ObjectiveVector]) -> Option<Wlt> {
    cross(lex, par, |a, b| {
        if pareto_dominates(a, b) {
            ComparisonOutcome::FirstBetter
        } else if pareto_dominates(b, a) {
            ComparisonOutcome::SecondBetter
        } else {
            ComparisonOutcome::Tie
        }
    })
}

/// Every cross pair judged by the lexicographic comparison under `theta`.
pub fn compare_lex(
    lex: &[ObjectiveVector],
    par: &[ObjectiveVector],
    ordering: &ObjectiveOrdering,
    theta: f64,
) -> Option<Wlt> {
    cross(lex, par, |a, b| lex_compare(a, b, ordering, theta))
}

/// Pooled (micro) and per-POI (macro) averages for one (strategy, resilience) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub resilience: bool,
    pub strategy: Strategy,
    pub pois: usize,
    pub solutions: usize,
    pub valid: usize,
    pub valid_fraction_micro: Option<f64>,
    pub valid_fraction_macro: Option<f64>,
    /// Mean o1..o4 over all pooled solutions.
    pub means_micro: Option<[f64; 4]>,
    /// Mean over POIs of each POI's mean o1..o4.
    pub means_macro: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WltCell {
    pub resilience: bool,
    /// The Lex-EA compared against Par-EA.
    pub strategy: Strategy,
    pub pois_compared: usize,
    pub wlt: Wlt,
}

impl WltCell {
    pub fn pairs(&self) -> usize {
        self.wlt.total()
    }
}

/// Aggregates, all computed from the per-POI records alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub theta: f64,
    pub strategies: Vec<Strategy>,
    pub variants: Vec<bool>,
    pub pois: usize,
    /// (POI, variant) pairs left out of comparisons because some strategy returned nothing.
    pub skipped: usize,
    pub cells: Vec<CellSummary>,
    pub pareto: Vec<WltCell>,
    pub lex: Vec<WltCell>,
}

impl ExperimentReport {
    pub fn cell(&self, strategy: Strategy, resilience: bool) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.strategy == strategy && c.resilience == resilience)
    }

    pub fn is_empty(&self) -> bool {
        self.pois == 0
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn mean_vector(vs: &[ObjectiveVector]) -> Option<[f64; 4]> {
    if vs.is_empty() {
        return None;
    }
    let mut out = [0.0; 4];
    for o in Objective::ALL {
        out[o.index()] = mean(vs.iter().map(|v| v[o])).expect("non-empty");
    }
    Some(out)
}

/// Pure fold over per-POI records.
pub fn aggregate(
    dataset: &str,
    records: &[PoiRecord],
    strategies: &[Strategy],
    variants: &[bool],
    theta: f64,
) -> ExperimentReport {
    let mut cells = Vec::new();
    let mut pareto = Vec::new();
    let mut lex = Vec::new();
    let mut skipped = 0;
    let mut pois = std::collections::BTreeSet::new();

    for &resilience in variants {
        let rows: Vec<&PoiRecord> = records
            .iter()
            .filter(|r| r.resilience == resilience)
            .collect();
        pois.extend(rows.iter().map(|r| r.poi));
        for &strategy in strategies {
            let per_poi: Vec<&[ObjectiveVector]> =
                rows.iter().filter_map(|r| r.solutions(strategy)).collect();
            let pooled: Vec<ObjectiveVector> =
                per_poi.iter().flat_map(|s| s.iter().copied()).collect();
            let macro_means: Vec<[f64; 4]> =
                per_poi.iter().filter_map(|s| mean_vector(s)).collect();
            cells.push(CellSummary {
                resilience,
                strategy,
                pois: per_poi.len(),
                solutions: pooled.len(),
                valid: pooled.iter().filter(|o| o.is_valid()).count(),
                valid_fraction_micro: valid_fraction(&pooled),
                valid_fraction_macro: mean(per_poi.iter().filter_map(|s| valid_fraction(s))),
                means_micro: mean_vector(&pooled),
                means_macro: (!macro_means.is_empty()).then(|| {
                    let mut out = [0.0; 4];
                    for (k, slot) in out.iter_mut().enumerate() {
                        *slot = mean(macro_means.iter().map(|m| m[k])).expect("non-empty");
                    }
                    out
                }),
            });
        }

        let comparable: Vec<&&PoiRecord> = rows
            .iter()
            .filter(|r| r.runs.iter().all(|run| !run.returned.is_empty()))
            .collect();
        skipped += rows.len() - comparable.len();
        for &strategy in strategies {
            let Some(ordering) = strategy.ordering() else {
                continue;
            };
            let mut p = Wlt::default();
            let mut l = Wlt::default();
            let mut n = 0;
            for r in &comparable {
                let (Some(ls), Some(ps)) = (r.solutions(strategy), r.solutions(Strategy::PAR))
                else {
                    continue;
                };
                n += 1;
                p += compare_pareto(ls, ps).unwrap_or_default();
                l += compare_lex(ls, ps, &ordering, theta).unwrap_or_default();
            }
            pareto.push(WltCell {
                resilience,
                strategy,
                pois_compared: n,
                wlt: p,
            });
            lex.push(WltCell {
                resilience,
                strategy,
                pois_compared: n,
                wlt: l,
            });
        }
    }

    ExperimentReport {
        dataset: dataset.to_string(),
        theta,
        strategies: strategies.to_vec(),
        variants: variants.to_vec(),
        pois: pois.len(),
        skipped,
        cells,
        pareto,
        lex,
    }
}
