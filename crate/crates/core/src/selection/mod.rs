//! Selection operators: the lexicographic tournament and Pareto-based survival.

mod lex;
mod pareto;

use rand::Rng;

use crate::data::Value;
use crate::error::{Error, Result};
use crate::objectives::ObjectiveVector;

pub use lex::{
    lex_compare, lex_survivors, lex_tournament_select, ComparisonOutcome, LexParams,
    ObjectiveOrdering,
};
pub use pareto::{
    crowding_by_member, crowding_distance, nondominated_sort, nsga2_select, pareto_dominates,
    pareto_ranks,
};

/// Anything carrying a feature vector and its objective values.
pub trait Scored {
    fn genes(&self) -> &[Value];
    fn objectives(&self) -> &ObjectiveVector;
}

/// Indices of the first occurrence of each distinct feature vector.
pub fn distinct_indices<T: Scored>(population: &[T]) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    (0..population.len())
        .filter(|&i| seen.insert(population[i].genes()))
        .collect()
}

/// Picks the single returned solution of a Lex-EA run: one tournament round
/// over all distinct members of the final population.
pub fn final_select_lex<T: Scored, R: Rng + ?Sized>(
    population: &[T],
    ordering: &ObjectiveOrdering,
    theta: f64,
    rng: &mut R,
) -> Result<usize> {
    let distinct = distinct_indices(population);
    if distinct.is_empty() {
        return Err(Error::Invariant(
            "cannot select from an empty population".into(),
        ));
    }
    let objs: Vec<ObjectiveVector> = distinct
        .iter()
        .map(|&i| *population[i].objectives())
        .collect();
    let params = LexParams {
        n: 1,
        k: objs.len(),
        theta,
        ordering: *ordering,
    };
    let winner = lex_tournament_select(&params, &objs, rng)?[0];
    Ok(distinct[winner])
}
