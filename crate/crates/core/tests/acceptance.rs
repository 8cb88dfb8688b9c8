//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{numeric_stats, nums, Window};
use lexcf_core::bench::{run_experiment, ExperimentConfig, ExperimentOutput};
use lexcf_core::data::{compute_feature_stats, Role, SyntheticSpec};
use lexcf_core::ea::run_paired;
use lexcf_core::model::{train, ForestParams, LinearRule};
use lexcf_core::objectives::{
    gower_dist, obj_distance, obj_plausibility, obj_sparsity, obj_validity, obj_validity_resilient,
    resilience_scores, ResilienceReport,
};
use lexcf_core::selection::{
    lex_compare, lex_tournament_select, nondominated_sort, pareto_dominates,
};
use lexcf_core::{
    Class, Classifier, ComparisonOutcome, Dataset, EAConfig, FeatureSchema, Instance,
    LearnerConfig, LexParams, Model, ObjectiveOrdering, ObjectiveVector, Schema, Strategy, Value,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ov(o1: f64, o2: f64, o3: usize, o4: f64) -> ObjectiveVector {
    ObjectiveVector::new(o1, o2, o3, o4)
}

struct Shared {
    output: ExperimentOutput,
    elapsed: Duration,
}

fn shared() -> &'static std::result::Result<Shared, String> {
    static CELL: OnceLock<std::result::Result<Shared, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let spec = SyntheticSpec {
            non_actionable: 1,
            ..SyntheticSpec::numeric(8, 450, 2024)
        };
        let mut cfg = ExperimentConfig::synthetic(spec, 7);
        cfg.learner = LearnerConfig::random_forest(ForestParams::default(), 7);
        cfg.max_pois = 30;
        cfg.resilience = vec![false, true];
        let start = Instant::now();
        let output = run_experiment(&cfg).map_err(|e| format!("experiment failed: {e}"))?;
        Ok(Shared {
            output,
            elapsed: start.elapsed(),
        })
    })
}

fn exact_formulas() -> Check {
    let v = obj_validity(0.35).map_err(|e| e.to_string())?;
    // 0.5 - 0.35 is exact in binary; it sits one ulp above the literal 0.15
    ensure(
        v == 0.5 - 0.35 && (v - 0.15).abs() <= f64::EPSILON * 0.15,
        || format!("obj_validity(0.35) = {v}"),
    )?;
    ensure(
        obj_validity(0.5).ok() == Some(0.0) && obj_validity(0.0).ok() == Some(0.5),
        || "validity boundary values".into(),
    )?;
    let report = |mean| ResilienceReport {
        features: Vec::new(),
        mean,
    };
    let ends = [
        obj_validity_resilient(0.9, Some(&report(1.0))),
        obj_validity_resilient(0.9, Some(&report(0.0))),
        obj_validity_resilient(0.35, None),
    ];
    ensure(
        ends.iter()
            .map(|r| r.as_ref().ok().copied())
            .eq([Some(-1.0), Some(0.0), Some(0.5 - 0.35)]),
        || format!("resilient endpoints {ends:?}"),
    )?;

    let stats = numeric_stats(&[(0.0, 10.0), (2.0, 2.0)]);
    ensure(
        gower_dist(&stats, Value::Num(3.0), Value::Num(8.0), 0) == 0.5,
        || "gower numeric".into(),
    )?;
    ensure(
        gower_dist(&stats, Value::Num(1.0), Value::Num(9.0), 1) == 0.0,
        || "gower zero range".into(),
    )?;

    let cat_schema = Schema::new(
        (0..3)
            .map(|i| FeatureSchema::categorical(format!("c{i}"), ["own", "rent", "free"]))
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let row = |c: [u32; 3]| c.map(Value::Cat).to_vec();
    let cats = Dataset::new(
        cat_schema,
        vec![Instance::new(row([0, 0, 0]), Some(Class::Negative))],
        Role::Train,
    )
    .map_err(|e| e.to_string())?;
    let cstats = compute_feature_stats(&cats).map_err(|e| e.to_string())?;
    ensure(
        gower_dist(&cstats, Value::Cat(0), Value::Cat(0), 0) == 0.0,
        || "gower own = own".into(),
    )?;
    ensure(
        gower_dist(&cstats, Value::Cat(0), Value::Cat(1), 0) == 1.0,
        || "gower own != rent".into(),
    )?;
    let (a, b) = (row([0, 0, 0]), row([1, 2, 1]));
    ensure(obj_distance(&a, &a, &cstats) == 0.0, || {
        "o2 identity".into()
    })?;
    ensure(obj_distance(&a, &b, &cstats) == 1.0, || {
        "o2 all differ".into()
    })?;
    ensure(
        obj_sparsity(&a, &a) == 0 && obj_sparsity(&a, &b) == 3,
        || "o3".into(),
    )?;
    ensure(obj_sparsity(&a, &row([0, 1, 2])) == 2, || {
        "o3 two changed".into()
    })?;
    ensure(
        obj_plausibility(&a, &cats, &cstats).ok() == Some(0.0),
        || "o4 self".into(),
    )?;
    ensure(
        obj_plausibility(&b, &cats, &cstats).ok() == Some(1.0),
        || "o4 forced".into(),
    )?;
    Ok(format!(
        "obj_validity(0.35) = {v}, endpoints -1 / 0 / {}",
        0.5 - 0.35
    ))
}

fn oracle_fronts(objs: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..objs.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| pareto_dominates(&objs[j], &objs[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let populations = 1000;
    for t in 0..populations {
        let n = rng.random_range(1..=100);
        // coarse grids produce ties and long dominance chains
        let levels = [3u32, 6, 20, 1000][t % 4];
        let objs: Vec<ObjectiveVector> = (0..n)
            .map(|_| {
                let mut g = || rng.random_range(0..levels) as f64 / levels as f64;
                ObjectiveVector([g(), g(), (g() * 8.0).floor(), g()])
            })
            .collect();
        let mut got = nondominated_sort(&objs);
        let mut want = oracle_fronts(&objs);
        got.iter_mut().for_each(|f| f.sort_unstable());
        want.iter_mut().for_each(|f| f.sort_unstable());
        ensure(got == want, || format!("population {t} (n = {n}) differs"))?;
    }

    let schema = Schema::new(vec![
        FeatureSchema::continuous("a"),
        FeatureSchema::integer("b"),
        FeatureSchema::categorical("c", ["x", "y", "z"]),
        FeatureSchema::continuous("d"),
    ])
    .map_err(|e| e.to_string())?;
    let point = |rng: &mut ChaCha8Rng| {
        vec![
            Value::Num(rng.random_range(-10.0..110.0)),
            Value::Num(rng.random_range(0..20) as f64),
            Value::Cat(rng.random_range(0..3)),
            Value::Num(rng.random_range(0.0..1.0)),
        ]
    };
    let queries = 500;
    for q in 0..queries {
        let rows = rng.random_range(1..80);
        let instances = (0..rows)
            .map(|_| Instance::new(point(&mut rng), Some(Class::Negative)))
            .collect();
        let ds = Dataset::new(schema.clone(), instances, Role::Train).map_err(|e| e.to_string())?;
        let stats = compute_feature_stats(&ds).map_err(|e| e.to_string())?;
        let x = point(&mut rng);
        let scan = ds
            .instances
            .iter()
            .map(|t| {
                (0..4)
                    .map(|i| gower_dist(&stats, x[i], t.values[i], i))
                    .sum::<f64>()
                    / 4.0
            })
            .fold(f64::INFINITY, f64::min);
        let got = obj_plausibility(&x, &ds, &stats).map_err(|e| e.to_string())?;
        ensure(got == scan, || format!("query {q}: {got} vs {scan}"))?;
    }
    Ok(format!(
        "{populations} populations match the pairwise oracle, {queries} plausibility queries match the full scan"
    ))
}

fn full_victors(
    objs: &[ObjectiveVector],
    ordering: ObjectiveOrdering,
    theta: f64,
    seed: u64,
) -> Vec<usize> {
    let params = LexParams {
        n: 1,
        k: objs.len(),
        theta,
        ordering,
    };
    lex_tournament_select(&params, objs, &mut ChaCha8Rng::seed_from_u64(seed))
        .expect("valid params")
}

fn algorithm_fidelity() -> Check {
    let a = ov(0.000, 0.05, 1, 0.02);
    let b = ov(0.005, 0.20, 3, 0.01);
    ensure(
        lex_compare(&a, &b, &ObjectiveOrdering::LEX1, 0.01) == ComparisonOutcome::FirstBetter,
        || "A vs B".into(),
    )?;

    let traced = [
        ov(0.000, 0.05, 1, 0.1),
        ov(0.005, 0.02, 3, 0.2),
        ov(0.200, 0.00, 0, 0.0),
        ov(0.008, 0.10, 1, 0.3),
    ];
    let fallback = [ov(0.004, 0.100, 2, 0.050), ov(0.000, 0.105, 2, 0.055)];
    for seed in 0..50 {
        ensure(
            full_victors(&traced, ObjectiveOrdering::LEX1, 0.01, seed) == [1],
            || "traced LEX1 victor".into(),
        )?;
        ensure(
            full_victors(&traced, ObjectiveOrdering::LEX2, 0.01, seed) == [0],
            || "traced LEX2 victor".into(),
        )?;
        ensure(
            full_victors(&fallback, ObjectiveOrdering::LEX1, 0.01, seed) == [1],
            || "zero-tolerance fallback victor".into(),
        )?;
    }

    let same = vec![ov(0.1, 0.2, 1, 0.3); 4];
    let mut counts = [0usize; 4];
    for seed in 0..4000 {
        counts[full_victors(&same, ObjectiveOrdering::LEX2, 0.01, seed)[0]] += 1;
    }
    ensure(counts.iter().all(|&c| (850..=1150).contains(&c)), || {
        format!("tie path counts {counts:?}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pop: Vec<ObjectiveVector> = (0..40)
        .map(|_| {
            ov(
                rng.random_range(0.0..0.3),
                rng.random(),
                rng.random_range(0..6),
                rng.random(),
            )
        })
        .collect();
    let params = LexParams {
        n: 40,
        k: 2,
        theta: 0.01,
        ordering: ObjectiveOrdering::LEX1,
    };
    let run = |s| lex_tournament_select(&params, &pop, &mut ChaCha8Rng::seed_from_u64(s));
    for s in 0..20 {
        ensure(
            run(s).map_err(|e| e.to_string())? == run(s).map_err(|e| e.to_string())?,
            || format!("seed {s} not reproducible"),
        )?;
    }
    Ok(format!(
        "traced victors, fallback and tie path hold; tie counts {counts:?}"
    ))
}

fn resilience_by_construction() -> Check {
    let schema = Schema::new(
        (0..3)
            .map(|i| FeatureSchema::continuous(format!("x{i}")))
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let stats = numeric_stats(&[(0.0, 100.0); 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut tested = 0;
    while tested < 500 {
        let w: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
        let base: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..60.0)).collect();
        let raised: Vec<f64> = base
            .iter()
            .map(|&b| {
                if rng.random_bool(0.6) {
                    b + rng.random_range(0.5..40.0)
                } else {
                    b
                }
            })
            .collect();
        let cut: f64 =
            w.iter().zip(&raised).map(|(w, x)| w * x).sum::<f64>() - rng.random_range(0.0..5.0);
        let model = Model::Linear(LinearRule::numeric(-cut, &w));
        let x_cf = nums(&raised);
        if raised == base || !model.predict_class(&x_cf).is_positive() {
            continue;
        }
        let r = resilience_scores(&x_cf, &nums(&base), &model, &schema, &stats)
            .map_err(|e| e.to_string())?;
        ensure(r.mean == 1.0, || {
            format!("monotone model gave R = {}", r.mean)
        })?;
        tested += 1;
    }

    // continuous feature, steps of 5 from 50 toward 100
    let two = Schema::new(vec![
        FeatureSchema::continuous("x"),
        FeatureSchema::continuous("y"),
    ])
    .map_err(|e| e.to_string())?;
    let s2 = numeric_stats(&[(0.0, 100.0), (0.0, 1.0)]);
    for s in 0..=10u32 {
        let model = Window {
            feature: 0,
            lo: 45.0,
            hi: 52.5 + 5.0 * s as f64,
        };
        let r = resilience_scores(&nums(&[50.0, 0.5]), &nums(&[40.0, 0.5]), &model, &two, &s2)
            .map_err(|e| e.to_string())?;
        ensure(r.mean == s as f64 / 10.0, || {
            format!("s = {s}: r = {}", r.mean)
        })?;
    }
    // integer feature, unit steps from 2 toward 9: steps_max = 7
    let int = Schema::new(vec![
        FeatureSchema::integer("k"),
        FeatureSchema::continuous("y"),
    ])
    .map_err(|e| e.to_string())?;
    let s3 = numeric_stats(&[(0.0, 9.0), (0.0, 1.0)]);
    for s in 0..=7u32 {
        let model = Window {
            feature: 0,
            lo: 1.5,
            hi: 2.5 + s as f64,
        };
        let r = resilience_scores(&nums(&[2.0, 0.5]), &nums(&[1.0, 0.5]), &model, &int, &s3)
            .map_err(|e| e.to_string())?;
        let steps_max = r.features[0].step.map(|st| st.steps_max);
        ensure(steps_max == Some(7) && r.mean == s as f64 / 7.0, || {
            format!("integer s = {s}: r = {}, steps_max {steps_max:?}", r.mean)
        })?;
    }
    Ok(format!(
        "{tested} monotone counterfactuals with R = 1; r = s/10 and s/7 exact"
    ))
}

fn valid_micro(out: &ExperimentOutput, s: Strategy, resilience: bool) -> Result<f64, String> {
    out.report
        .cell(s, resilience)
        .and_then(|c| c.valid_fraction_micro)
        .ok_or_else(|| format!("no cell for {} resilience {resilience}", s.label()))
}

fn shared_output() -> Result<&'static Shared, String> {
    shared().as_ref().map_err(Clone::clone)
}

fn enough_pois(out: &ExperimentOutput) -> std::result::Result<(), String> {
    ensure(out.report.pois >= 30, || {
        format!("only {} usable points of interest", out.report.pois)
    })
}

fn validity_trend() -> Check {
    let sh = shared_output()?;
    let out = &sh.output;
    enough_pois(out)?;
    let mut parts = Vec::new();
    for resilience in [false, true] {
        let par = valid_micro(out, Strategy::PAR, resilience)?;
        for s in [Strategy::LEX1, Strategy::LEX2] {
            let v = valid_micro(out, s, resilience)?;
            ensure(v >= 0.85 && v > par, || {
                format!(
                    "{} resilience {resilience}: {v:.3} vs par {par:.3}",
                    s.label()
                )
            })?;
        }
        parts.push(format!(
            "resilience {}: lex1 {:.3}, lex2 {:.3}, par {par:.3}",
            if resilience { "on" } else { "off" },
            valid_micro(out, Strategy::LEX1, resilience)?,
            valid_micro(out, Strategy::LEX2, resilience)?
        ));
    }
    Ok(format!("{} POIs; {}", out.report.pois, parts.join("; ")))
}

fn lex_wins() -> Check {
    let out = &shared_output()?.output;
    enough_pois(out)?;
    let mut parts = Vec::new();
    for cell in &out.report.lex {
        let pairs = cell.wlt.total();
        let share = cell.wlt.wins as f64 / pairs.max(1) as f64;
        ensure(pairs > 0 && share > 0.5, || {
            format!(
                "{} resilience {}: {} of {pairs}",
                cell.strategy.label(),
                cell.resilience,
                cell.wlt.wins
            )
        })?;
        parts.push(format!(
            "{} {}: {:.1}%",
            cell.strategy.label(),
            if cell.resilience { "on" } else { "off" },
            share * 100.0
        ));
    }
    ensure(parts.len() == 4, || {
        format!("expected 4 comparison cells, got {}", parts.len())
    })?;
    Ok(parts.join(", "))
}

fn resilience_effect() -> Check {
    let out = &shared_output()?.output;
    enough_pois(out)?;
    let mut parts = Vec::new();
    for s in [Strategy::LEX1, Strategy::LEX2] {
        let off = valid_micro(out, s, false)?;
        let on = valid_micro(out, s, true)?;
        ensure(on >= off - 0.02, || {
            format!("{}: {off:.3} -> {on:.3}", s.label())
        })?;
        parts.push(format!("{} {off:.3} -> {on:.3}", s.label()));
    }
    Ok(parts.join(", "))
}

fn budget_parity() -> Check {
    let out = &shared_output()?.output;
    enough_pois(out)?;
    let mut generations = Vec::new();
    for rec in &out.records {
        ensure(rec.budget_parity() && rec.runs.len() == 3, || {
            format!("poi {} resilience {}", rec.poi, rec.resilience)
        })?;
        generations.push(rec.runs[0].generations_executed);
    }
    let min = generations.iter().min().copied().unwrap_or(0);
    let max = generations.iter().max().copied().unwrap_or(0);
    Ok(format!(
        "{} POI records, generations {min}..={max}",
        out.records.len()
    ))
}

fn constraints() -> Check {
    let out = &shared_output()?.output;
    let mut checked = 0;
    for run in out.records.iter().flat_map(|r| &r.runs) {
        ensure(run.audit.is_clean(), || format!("audit {:?}", run.audit))?;
        checked += run.audit.candidates_checked;
    }
    let schema_ok = out.records.iter().all(|rec| {
        rec.runs
            .iter()
            .flat_map(|r| &r.solutions)
            .all(|genes| genes[0] == rec.x_pt[0])
    });
    ensure(checked > 0 && schema_ok, || {
        "non-actionable feature changed in a solution".into()
    })?;
    Ok(format!("{checked} candidates checked, zero violations"))
}

fn runtime() -> Check {
    let spec = SyntheticSpec::numeric(8, 450, 99);
    let syn = common::Synthetic::new(&spec, 99);
    let model = train(
        &syn.train,
        &LearnerConfig::random_forest(ForestParams::default(), 3),
    )
    .map_err(|e| e.to_string())?;
    let x_pt = syn
        .test
        .instances
        .iter()
        .find(|r| !model.predict_class(&r.values).is_positive())
        .ok_or("no negative test row")?
        .values
        .clone();
    let ctx = syn.context(&x_pt, &model);
    let cfg = EAConfig {
        fixed_generations: Some(50),
        resilience: true,
        ..EAConfig::default()
    };
    let start = Instant::now();
    let pair = run_paired(&ctx, &cfg).map_err(|e| e.to_string())?;
    let triple = start.elapsed();
    ensure(pair.par.generations_executed == 50, || {
        "triple did not run 50 generations".into()
    })?;
    ensure(triple < Duration::from_secs(5), || {
        format!("triple took {triple:.2?}")
    })?;
    let sh = shared_output()?;
    ensure(sh.elapsed < Duration::from_secs(300), || {
        format!("benchmark took {:.1?}", sh.elapsed)
    })?;
    Ok(format!(
        "triple {triple:.2?}, {}-POI two-variant benchmark {:.2?}",
        sh.output.report.pois, sh.elapsed
    ))
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let checks: [Criterion; 10] = [
        ("exact formula checks", exact_formulas),
        ("oracle equivalence", oracle_equivalence),
        ("tournament fidelity", algorithm_fidelity),
        ("resilience by construction", resilience_by_construction),
        ("validity trend", validity_trend),
        ("lexicographic wins", lex_wins),
        ("resilience effect", resilience_effect),
        ("budget parity", budget_parity),
        ("constraint suite", constraints),
        ("runtime", runtime),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
