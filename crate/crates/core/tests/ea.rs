mod common;

use common::{Constant, Synthetic};
use lexcf_core::data::SyntheticSpec;
use lexcf_core::ea::{crossover, init_population, mutate, run_ea, run_paired, ConstraintAudit};
use lexcf_core::model::{train, ForestParams};
use lexcf_core::selection::{lex_compare, nondominated_sort, pareto_dominates};
use lexcf_core::{
    Classifier, ComparisonOutcome, EAConfig, Error, FeatureSchema, LearnerConfig, Model,
    ObjectiveOrdering, Schema, Strategy, Value,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mixed(seed: u64) -> Synthetic {
    let spec = SyntheticSpec {
        integer: 1,
        categorical: 1,
        non_actionable: 1,
        ..SyntheticSpec::numeric(4, 240, seed)
    };
    Synthetic::new(&spec, seed)
}

fn forest(syn: &Synthetic, seed: u64) -> Model {
    let params = ForestParams {
        ntree: 30,
        ..ForestParams::default()
    };
    train(&syn.train, &LearnerConfig::random_forest(params, seed)).unwrap()
}

fn negative_poi(syn: &Synthetic, model: &Model) -> Vec<Value> {
    syn.test
        .instances
        .iter()
        .find(|r| !model.predict_class(&r.values).is_positive())
        .expect("some test row is predicted negative")
        .values
        .clone()
}

fn in_bounds(syn: &Synthetic, genes: &[Value], x_pt: &[Value]) -> bool {
    genes.iter().enumerate().all(|(i, &g)| {
        g == x_pt[i]
            || match (g, syn.stats.get(i).bounds()) {
                (Value::Num(v), Some((lo, hi))) => lo <= v && v <= hi,
                _ => true,
            }
    })
}

fn respects_actionability(schema: &Schema, genes: &[Value], x_pt: &[Value]) -> bool {
    schema
        .features()
        .iter()
        .enumerate()
        .all(|(i, f)| f.actionable || genes[i] == x_pt[i])
}

#[test]
fn initial_population_contracts() {
    let syn = mixed(1);
    let x_pt = syn.test.instances[0].values.clone();
    let cfg = EAConfig::default();
    let schema = &syn.train.schema;
    let make = || {
        init_population(
            &x_pt,
            schema,
            &syn.stats,
            &cfg,
            &mut ChaCha8Rng::seed_from_u64(4),
        )
        .unwrap()
    };
    let pop = make();
    assert_eq!(pop.len(), cfg.population_size);
    assert_eq!(pop, make());
    for g in &pop {
        assert_ne!(g, &x_pt);
        assert!(respects_actionability(schema, g, &x_pt));
        assert!(in_bounds(&syn, g, &x_pt));
    }
}

#[test]
fn zero_actionable_features_is_config_error() {
    let syn = common::Synthetic::new(&SyntheticSpec::numeric(2, 90, 0), 0);
    let schema = Schema::new(vec![
        FeatureSchema::continuous("x0").non_actionable(),
        FeatureSchema::continuous("x1").non_actionable(),
    ])
    .unwrap();
    let x_pt = syn.test.instances[0].values.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(matches!(
        init_population(&x_pt, &schema, &syn.stats, &EAConfig::default(), &mut rng),
        Err(Error::Config(_))
    ));

    let frozen = lexcf_core::Dataset::new(
        schema,
        syn.train.instances.clone(),
        lexcf_core::data::Role::Train,
    )
    .unwrap();
    let ctx = lexcf_core::EaContext {
        x_pt: &x_pt,
        model: &Constant(0.1),
        train: &frozen,
        stats: &syn.stats,
    };
    assert!(matches!(
        run_ea(&ctx, &EAConfig::default()),
        Err(Error::Config(_))
    ));
}

#[test]
fn crossover_identities() {
    let syn = mixed(2);
    let schema = &syn.train.schema;
    let a = syn.train.instances[0].values.clone();
    let b = syn.train.instances[1].values.clone();
    let off = EAConfig {
        crossover_prob: 0.0,
        ..EAConfig::default()
    };
    let on = EAConfig {
        crossover_prob: 1.0,
        ..EAConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..50 {
        assert_eq!(
            crossover(&a, &b, schema, &off, &mut rng),
            (a.clone(), b.clone())
        );
        assert_eq!(
            crossover(&a, &a, schema, &on, &mut rng),
            (a.clone(), a.clone())
        );
    }
}

#[test]
fn mutation_identities() {
    let syn = mixed(3);
    let schema = &syn.train.schema;
    let x_pt = syn.test.instances[0].values.clone();
    let start = syn.train.instances[5].values.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    let still = EAConfig {
        mutation_prob: 0.0,
        reset_prob: 0.0,
        ..EAConfig::default()
    };
    let mut g = start.clone();
    mutate(&mut g, &x_pt, schema, &syn.stats, &still, &mut rng);
    assert_eq!(g, start);

    let reset = EAConfig {
        mutation_prob: 0.0,
        reset_prob: 1.0,
        ..EAConfig::default()
    };
    let mut g = start.clone();
    mutate(&mut g, &x_pt, schema, &syn.stats, &reset, &mut rng);
    for (i, f) in schema.features().iter().enumerate() {
        let expected = if f.actionable { x_pt[i] } else { start[i] };
        assert_eq!(g[i], expected);
    }
}

#[test]
fn always_positive_model_is_valid_after_one_generation() {
    let syn = mixed(4);
    let x_pt = syn.test.instances[0].values.clone();
    let model = Constant(1.0);
    let ctx = syn.context(&x_pt, &model);
    for strategy in [Strategy::LEX1, Strategy::LEX2] {
        let cfg = EAConfig {
            max_generations: 1,
            ..EAConfig::default().with_strategy(strategy)
        };
        let r = run_ea(&ctx, &cfg).unwrap();
        assert_eq!(r.generations_executed, 1);
        assert_eq!(r.returned.len(), 1);
        assert!(r.returned[0].objectives.validity() <= 0.0);
    }
}

#[test]
fn never_positive_model_still_returns_candidates() {
    let syn = mixed(5);
    let x_pt = syn.test.instances[0].values.clone();
    let model = Constant(0.0);
    let ctx = syn.context(&x_pt, &model);
    for strategy in [Strategy::PAR, Strategy::LEX1, Strategy::LEX2] {
        let cfg = EAConfig {
            max_generations: 8,
            ..EAConfig::default().with_strategy(strategy)
        };
        let r = run_ea(&ctx, &cfg).unwrap();
        assert!(!r.returned.is_empty());
        assert!(r.returned.iter().all(|c| c.objectives.validity() == 0.5));
    }
}

#[test]
fn paired_runs_share_budget_and_contracts() {
    let syn = mixed(6);
    let model = forest(&syn, 6);
    let x_pt = negative_poi(&syn, &model);
    let ctx = syn.context(&x_pt, &model);
    for resilience in [false, true] {
        let cfg = EAConfig {
            resilience,
            seed: 17,
            ..EAConfig::default()
        };
        let pair = run_paired(&ctx, &cfg).unwrap();
        assert_eq!(pair, run_paired(&ctx, &cfg).unwrap());
        let g = pair.par.generations_executed;
        assert!(g >= 1 && g <= cfg.max_generations);
        for r in pair.iter() {
            assert_eq!(r.generations_executed, g);
            assert_eq!(r.population.len(), 20);
            assert_eq!(r.trace.len(), g + 1);
            assert!(r.audit.is_clean(), "{:?}", r.audit);
            assert!(r.audit.candidates_checked >= 20);
            for c in r.population.iter().chain(&r.returned) {
                assert!(respects_actionability(&syn.train.schema, &c.values, &x_pt));
                assert!(in_bounds(&syn, &c.values, &x_pt));
            }
        }
        assert_eq!(pair.lex1.returned.len(), 1);
        assert_eq!(pair.lex2.returned.len(), 1);
        assert_eq!(pair.lex1.strategy, Strategy::LEX1);

        let par = &pair.par.returned;
        for a in par {
            assert!(par
                .iter()
                .all(|b| !pareto_dominates(&a.objectives, &b.objectives)));
        }
        // the returned set is front 0 of the distinct final population
        let mut distinct: Vec<&lexcf_core::Candidate> = Vec::new();
        for c in &pair.par.population {
            if !distinct.iter().any(|d| d.values == c.values) {
                distinct.push(c);
            }
        }
        let objs: Vec<_> = distinct.iter().map(|c| c.objectives).collect();
        let front0 = &nondominated_sort(&objs)[0];
        assert_eq!(front0.len(), par.len());
        assert!(front0
            .iter()
            .all(|&i| par.iter().any(|c| c.values == distinct[i].values)));
    }
}

/// Survival keeps the lexicographic best, so the best of each population
/// never gets worse. Runs of g and g + 1 generations share their first g.
#[test]
fn lex_survival_is_elitist() {
    let syn = mixed(7);
    let model = forest(&syn, 7);
    let x_pt = negative_poi(&syn, &model);
    let ctx = syn.context(&x_pt, &model);
    for ordering in [ObjectiveOrdering::LEX1, ObjectiveOrdering::LEX2] {
        let best_of = |g: usize| {
            let cfg = EAConfig {
                theta: 0.0,
                fixed_generations: Some(g),
                seed: 3,
                ..EAConfig::default().with_strategy(Strategy::Lexicographic(ordering))
            };
            let r = run_ea(&ctx, &cfg).unwrap();
            r.population
                .iter()
                .map(|c| c.objectives)
                .reduce(|a, b| match lex_compare(&a, &b, &ordering, 0.0) {
                    ComparisonOutcome::SecondBetter => b,
                    _ => a,
                })
                .unwrap()
        };
        let mut prev = best_of(1);
        for g in 2..=12 {
            let cur = best_of(g);
            assert_ne!(
                lex_compare(&prev, &cur, &ordering, 0.0),
                ComparisonOutcome::FirstBetter,
                "generation {g} lost the best candidate"
            );
            prev = cur;
        }
    }
}

#[test]
fn fixed_generations_disable_convergence() {
    let syn = mixed(8);
    let x_pt = syn.test.instances[0].values.clone();
    let model = Constant(0.0);
    let ctx = syn.context(&x_pt, &model);
    let free = run_ea(&ctx, &EAConfig::default()).unwrap();
    assert!(free.generations_executed <= 50);
    let pinned = EAConfig {
        fixed_generations: Some(37),
        ..EAConfig::default()
    };
    assert_eq!(run_ea(&ctx, &pinned).unwrap().generations_executed, 37);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crossover_children_take_parent_genes(seed: u64, i in 0usize..100, j in 0usize..100) {
        let syn = mixed(9);
        let schema = &syn.train.schema;
        let a = &syn.train.instances[i].values;
        let b = &syn.train.instances[j].values;
        let cfg = EAConfig { crossover_prob: 1.0, ..EAConfig::default() };
        let (c1, c2) = crossover(a, b, schema, &cfg, &mut ChaCha8Rng::seed_from_u64(seed));
        for k in 0..a.len() {
            prop_assert!(c1[k] == a[k] || c1[k] == b[k]);
            prop_assert!((c1[k] == a[k] && c2[k] == b[k]) || (c1[k] == b[k] && c2[k] == a[k]));
            if !schema.feature(k).actionable {
                prop_assert_eq!(c1[k], a[k]);
                prop_assert_eq!(c2[k], b[k]);
            }
        }
    }

    #[test]
    fn mutation_stays_feasible(seed: u64, row in 0usize..100, mp in 0.0f64..=1.0, rp in 0.0f64..=1.0) {
        let syn = mixed(10);
        let schema = &syn.train.schema;
        let x_pt = syn.test.instances[0].values.clone();
        let mut g = syn.train.instances[row].values.clone();
        for (k, f) in schema.features().iter().enumerate() {
            if !f.actionable {
                g[k] = x_pt[k];
            }
        }
        let cfg = EAConfig { mutation_prob: mp, reset_prob: rp, ..EAConfig::default() };
        mutate(&mut g, &x_pt, schema, &syn.stats, &cfg, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(respects_actionability(schema, &g, &x_pt));
        prop_assert!(in_bounds(&syn, &g, &x_pt));
        schema.validate(&g).unwrap();
        let mut audit = ConstraintAudit::default();
        audit.check(&g, &x_pt, schema, &syn.stats);
        prop_assert!(audit.is_clean());
    }
}
