//! The evolutionary search shared by Par-EA and the Lex-EAs.

mod operators;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureStats, Value};
use crate::error::{Error, Result};
use crate::model::Classifier;
use crate::objectives::{evaluate, EvalContext, ObjectiveVector};
use crate::selection::{
    crowding_by_member, crowding_distance, distinct_indices, final_select_lex, lex_survivors,
    lex_tournament_select, nondominated_sort, nsga2_select, pareto_ranks, LexParams,
    ObjectiveOrdering, Scored,
};

pub use operators::{crossover, init_population, mutate, ConstraintAudit};

/// Serialized as its label: `par`, `lex1`, `lex2` or `lex(o1,o3,o2,o4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Strategy {
    Pareto,
    Lexicographic(ObjectiveOrdering),
}

impl Strategy {
    pub const PAR: Strategy = Strategy::Pareto;
    pub const LEX1: Strategy = Strategy::Lexicographic(ObjectiveOrdering::LEX1);
    pub const LEX2: Strategy = Strategy::Lexicographic(ObjectiveOrdering::LEX2);

    /// `par`, `lex1`, `lex2`, or `lex(<ordering>)`.
    pub fn label(&self) -> String {
        match self {
            Strategy::Pareto => "par".into(),
            Strategy::Lexicographic(o) if *o == ObjectiveOrdering::LEX1 => "lex1".into(),
            Strategy::Lexicographic(o) if *o == ObjectiveOrdering::LEX2 => "lex2".into(),
            Strategy::Lexicographic(o) => format!("lex({o})"),
        }
    }

    pub fn ordering(&self) -> Option<ObjectiveOrdering> {
        match self {
            Strategy::Pareto => None,
            Strategy::Lexicographic(o) => Some(*o),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl TryFrom<String> for Strategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> Self {
        s.label()
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "par" | "pareto" | "par-ea" => Ok(Strategy::Pareto),
            _ => {
                let inner = t
                    .strip_prefix("lex(")
                    .and_then(|r| r.strip_suffix(')'))
                    .unwrap_or(&t);
                inner.parse().map(Strategy::Lexicographic)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EAConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub crossover_prob: f64,
    /// Per actionable gene.
    pub mutation_prob: f64,
    /// Per changed gene, after mutation.
    pub reset_prob: f64,
    pub strategy: Strategy,
    pub theta: f64,
    pub tournament_size: usize,
    pub resilience: bool,
    pub seed: u64,
    /// Exact generation budget; disables the convergence test.
    pub fixed_generations: Option<usize>,
    pub convergence_window: usize,
    pub convergence_tol: f64,
}

impl Default for EAConfig {
    fn default() -> Self {
        EAConfig {
            population_size: 20,
            max_generations: 50,
            crossover_prob: 0.7,
            mutation_prob: 0.2,
            reset_prob: 0.05,
            strategy: Strategy::Pareto,
            theta: 0.01,
            tournament_size: 2,
            resilience: false,
            seed: 0,
            fixed_generations: None,
            convergence_window: 10,
            convergence_tol: 1e-6,
        }
    }
}

impl EAConfig {
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be >= 2".into()));
        }
        if self.max_generations == 0 && self.fixed_generations.is_none() {
            return Err(Error::Config("max_generations must be >= 1".into()));
        }
        for (name, p) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("reset_prob", self.reset_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        if self.theta.is_nan() || self.theta < 0.0 {
            return Err(Error::Config(format!(
                "theta = {} must be >= 0",
                self.theta
            )));
        }
        if self.tournament_size < 1 || self.tournament_size > self.population_size {
            return Err(Error::Config(format!(
                "tournament_size = {} must be in [1, population_size]",
                self.tournament_size
            )));
        }
        if self.convergence_window == 0 {
            return Err(Error::Config("convergence_window must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub values: Vec<Value>,
    pub objectives: ObjectiveVector,
    /// Generation in which the candidate was created (0 = initial population).
    pub generation: usize,
}

impl Scored for Candidate {
    fn genes(&self) -> &[Value] {
        &self.values
    }

    fn objectives(&self) -> &ObjectiveVector {
        &self.objectives
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub generation: usize,
    pub best_o1: f64,
    pub mean_o2: f64,
    pub front0_size: usize,
}

impl TraceRecord {
    fn of(generation: usize, population: &[Candidate]) -> Self {
        let objs: Vec<ObjectiveVector> = population.iter().map(|c| c.objectives).collect();
        TraceRecord {
            generation,
            best_o1: objs
                .iter()
                .map(|o| o.validity())
                .fold(f64::INFINITY, f64::min),
            mean_o2: objs.iter().map(|o| o.distance()).sum::<f64>() / objs.len() as f64,
            front0_size: nondominated_sort(&objs).first().map_or(0, Vec::len),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EAResult {
    pub strategy: Strategy,
    /// Par-EA: the distinct nondominated members of the final population.
    /// Lex-EA: one candidate.
    pub returned: Vec<Candidate>,
    pub generations_executed: usize,
    pub population: Vec<Candidate>,
    /// One record per generation boundary, starting with the initial population.
    pub trace: Vec<TraceRecord>,
    pub audit: ConstraintAudit,
    pub evaluations: usize,
}

/// Inputs fixed for one search: the point of interest, the black box and
/// the training data behind the objectives.
#[derive(Clone, Copy)]
pub struct EaContext<'a> {
    pub x_pt: &'a [Value],
    pub model: &'a dyn Classifier,
    pub train: &'a Dataset,
    pub stats: &'a FeatureStats,
}

impl fmt::Debug for EaContext<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EaContext")
            .field("x_pt", &self.x_pt)
            .field("train_rows", &self.train.len())
            .finish_non_exhaustive()
    }
}

struct Evaluator<'a> {
    ctx: EvalContext<'a>,
    cache: HashMap<Vec<Value>, ObjectiveVector>,
    evaluations: usize,
}

impl Evaluator<'_> {
    fn candidate(&mut self, values: Vec<Value>, generation: usize) -> Result<Candidate> {
        let objectives = match self.cache.get(&values) {
            Some(o) => *o,
            None => {
                let o = evaluate(&values, &self.ctx)?;
                self.evaluations += 1;
                self.cache.insert(values.clone(), o);
                o
            }
        };
        Ok(Candidate {
            values,
            objectives,
            generation,
        })
    }
}

fn objectives_of(pop: &[Candidate]) -> Vec<ObjectiveVector> {
    pop.iter().map(|c| c.objectives).collect()
}

/// Binary (or k-ary) tournament on front rank, then crowding distance.
fn pareto_parents<R: Rng + ?Sized>(
    objs: &[ObjectiveVector],
    n: usize,
    k: usize,
    rng: &mut R,
) -> Vec<usize> {
    let fronts = nondominated_sort(objs);
    let ranks = pareto_ranks(&fronts, objs.len());
    let crowding = crowding_by_member(objs, &fronts);
    (0..n)
        .map(|_| {
            rand::seq::index::sample(rng, objs.len(), k)
                .into_iter()
                .reduce(|a, b| {
                    let better =
                        ranks[b] < ranks[a] || (ranks[b] == ranks[a] && crowding[b] > crowding[a]);
                    if better {
                        b
                    } else {
                        a
                    }
                })
                .expect("k >= 1")
        })
        .collect()
}

/// Lexicographic survival: repeatedly extracts the survivors of a full
/// tournament over what remains, preferring the largest crowding distance
/// (over the whole pool) and then the lowest index.
fn lex_survival(
    objs: &[ObjectiveVector],
    target: usize,
    ordering: &ObjectiveOrdering,
    theta: f64,
) -> Vec<usize> {
    let all: Vec<usize> = (0..objs.len()).collect();
    let crowding = crowding_distance(objs, &all);
    let mut remaining = all;
    let mut chosen = Vec::with_capacity(target);
    while chosen.len() < target && !remaining.is_empty() {
        let best = lex_survivors(objs, remaining.clone(), ordering, theta)
            .into_iter()
            .reduce(|a, b| {
                let prefer_b = crowding[b] > crowding[a] || (crowding[b] == crowding[a] && b < a);
                if prefer_b {
                    b
                } else {
                    a
                }
            })
            .expect("non-empty survivors");
        remaining.retain(|&i| i != best);
        chosen.push(best);
    }
    chosen
}

/// Repeats `order` cyclically until it has `target` entries.
fn pad_cyclic(order: Vec<usize>, target: usize) -> Vec<usize> {
    if order.is_empty() || order.len() >= target {
        return order;
    }
    order.iter().copied().cycle().take(target).collect()
}

fn converged(trace: &[TraceRecord], window: usize, tol: f64) -> bool {
    if trace.len() <= window {
        return false;
    }
    trace[trace.len() - window - 1..].windows(2).all(|w| {
        (w[1].best_o1 - w[0].best_o1).abs() < tol && (w[1].mean_o2 - w[0].mean_o2).abs() < tol
    })
}

pub fn run_ea(ctx: &EaContext<'_>, cfg: &EAConfig) -> Result<EAResult> {
    run_ea_observed(ctx, cfg, |_| {})
}

/// As [`run_ea`], calling `observe` with each trace record as it is produced.
pub fn run_ea_observed(
    ctx: &EaContext<'_>,
    cfg: &EAConfig,
    mut observe: impl FnMut(&TraceRecord),
) -> Result<EAResult> {
    cfg.validate()?;
    let schema = &ctx.train.schema;
    if ctx.x_pt.len() != schema.len() {
        return Err(Error::Contract(format!(
            "point of interest has {} features, schema has {}",
            ctx.x_pt.len(),
            schema.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut evaluator = Evaluator {
        ctx: EvalContext {
            x_pt: ctx.x_pt,
            model: ctx.model,
            train: ctx.train,
            stats: ctx.stats,
            resilience: cfg.resilience,
        },
        cache: HashMap::new(),
        evaluations: 0,
    };
    let mut audit = ConstraintAudit::default();
    let pop_size = cfg.population_size;

    let mut population = Vec::with_capacity(pop_size);
    for genes in init_population(ctx.x_pt, schema, ctx.stats, cfg, &mut rng)? {
        audit.check(&genes, ctx.x_pt, schema, ctx.stats);
        population.push(evaluator.candidate(genes, 0)?);
    }
    let mut trace = vec![TraceRecord::of(0, &population)];
    observe(&trace[0]);

    let budget = cfg.fixed_generations.unwrap_or(cfg.max_generations);
    let mut generation = 0;
    while generation < budget {
        generation += 1;
        let objs = objectives_of(&population);
        let parents = match cfg.strategy {
            Strategy::Pareto => pareto_parents(&objs, pop_size, cfg.tournament_size, &mut rng),
            Strategy::Lexicographic(ordering) => lex_tournament_select(
                &LexParams {
                    n: pop_size,
                    k: cfg.tournament_size,
                    theta: cfg.theta,
                    ordering,
                },
                &objs,
                &mut rng,
            )?,
        };

        let mut offspring = Vec::with_capacity(pop_size);
        for pair in parents.chunks(2) {
            let a = &population[pair[0]].values;
            let b = &population[*pair.get(1).unwrap_or(&pair[0])].values;
            let (c1, c2) = crossover(a, b, schema, cfg, &mut rng);
            for mut child in [c1, c2] {
                if offspring.len() == pop_size {
                    break;
                }
                mutate(&mut child, ctx.x_pt, schema, ctx.stats, cfg, &mut rng);
                audit.check(&child, ctx.x_pt, schema, ctx.stats);
                offspring.push(evaluator.candidate(child, generation)?);
            }
        }

        let mut pool = population;
        pool.extend(offspring);
        let mut seen = HashSet::new();
        let pool: Vec<Candidate> = pool
            .into_iter()
            .filter(|c| seen.insert(c.values.clone()))
            .collect();
        let pool_objs = objectives_of(&pool);
        let keep = match cfg.strategy {
            Strategy::Pareto => nsga2_select(&pool_objs, pop_size.min(pool.len()))?,
            Strategy::Lexicographic(ordering) => {
                lex_survival(&pool_objs, pop_size, &ordering, cfg.theta)
            }
        };
        population = pad_cyclic(keep, pop_size)
            .into_iter()
            .map(|i| pool[i].clone())
            .collect();
        if population.len() != pop_size {
            return Err(Error::Invariant(format!(
                "population has {} members after survival, expected {pop_size}",
                population.len()
            )));
        }

        let record = TraceRecord::of(generation, &population);
        observe(&record);
        trace.push(record);
        if cfg.fixed_generations.is_none()
            && converged(&trace, cfg.convergence_window, cfg.convergence_tol)
        {
            break;
        }
    }

    let returned = match cfg.strategy {
        Strategy::Pareto => {
            let distinct = distinct_indices(&population);
            let objs: Vec<ObjectiveVector> =
                distinct.iter().map(|&i| population[i].objectives).collect();
            nondominated_sort(&objs)
                .first()
                .map(|front| {
                    front
                        .iter()
                        .map(|&j| population[distinct[j]].clone())
                        .collect()
                })
                .unwrap_or_default()
        }
        Strategy::Lexicographic(ordering) => {
            let i = final_select_lex(&population, &ordering, cfg.theta, &mut rng)?;
            vec![population[i].clone()]
        }
    };

    Ok(EAResult {
        strategy: cfg.strategy,
        returned,
        generations_executed: generation,
        population,
        trace,
        audit,
        evaluations: evaluator.evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedResult {
    pub par: EAResult,
    pub lex1: EAResult,
    pub lex2: EAResult,
}

impl PairedResult {
    pub fn iter(&self) -> impl Iterator<Item = &EAResult> {
        [&self.par, &self.lex1, &self.lex2].into_iter()
    }
}

/// Runs Par-EA, then both Lex-EAs with exactly Par-EA's generation count.
/// All three start from the same seed, hence the same initial population.
pub fn run_paired(ctx: &EaContext<'_>, base: &EAConfig) -> Result<PairedResult> {
    let par_cfg = base.clone().with_strategy(Strategy::PAR);
    let par = run_ea(ctx, &par_cfg)?;
    let budget = EAConfig {
        fixed_generations: Some(par.generations_executed),
        ..base.clone()
    };
    let lex1 = run_ea(ctx, &budget.clone().with_strategy(Strategy::LEX1))?;
    let lex2 = run_ea(ctx, &budget.with_strategy(Strategy::LEX2))?;
    Ok(PairedResult { par, lex1, lex2 })
}
