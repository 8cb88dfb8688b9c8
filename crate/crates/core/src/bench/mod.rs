//! Experimental protocol: point-of-interest sampling, paired runs per POI,
//! aggregation and report files.

mod metrics;
mod report;

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{
    compute_feature_stats, generate_synthetic, load_dataset, split_dataset, Dataset, DatasetConfig,
    FeatureStats, SyntheticSpec, TestCap, Value,
};
use crate::ea::{run_paired, ConstraintAudit, EAConfig, EaContext, PairedResult, Strategy};
use crate::error::{Error, Result};
use crate::model::{
    accuracy, train, tune_random_search, Classifier, ForestParams, LearnerConfig, Model,
    TuningSpace,
};
use crate::objectives::ObjectiveVector;

pub use metrics::{
    aggregate, compare_lex, compare_pareto, valid_fraction, CellSummary, ExperimentReport, Wlt,
    WltCell,
};
pub use report::{emit_report, report_tables, ReportFormat, Table};

/// Environment variable capping the number of POIs processed in parallel.
pub const THREADS_ENV: &str = "LEXCF_THREADS";

pub const RECORDS_FILE: &str = "records.jsonl";
pub const METADATA_FILE: &str = "metadata.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSource {
    /// Path to a dataset config file, relative to the experiment config.
    Config(PathBuf),
    Synthetic(SyntheticSpec),
}

fn default_learner() -> LearnerConfig {
    LearnerConfig::random_forest(ForestParams::default(), 0)
}

fn default_max_pois() -> usize {
    50
}

fn default_variants() -> Vec<bool> {
    vec![false, true]
}

fn default_strategies() -> Vec<Strategy> {
    vec![Strategy::PAR, Strategy::LEX1, Strategy::LEX2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Defaults to the dataset config's name, or `synthetic`.
    #[serde(default)]
    pub name: Option<String>,
    pub dataset: DatasetSource,
    #[serde(default = "default_learner")]
    pub learner: LearnerConfig,
    /// Random-search trials before training; 0 trains `learner` as given.
    #[serde(default)]
    pub tune_trials: usize,
    #[serde(default)]
    pub ea: EAConfig,
    #[serde(default = "default_max_pois")]
    pub max_pois: usize,
    /// Resilience variants to run: `false` = base o1, `true` = extended o1.
    #[serde(default = "default_variants")]
    pub resilience: Vec<bool>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn synthetic(spec: SyntheticSpec, master_seed: u64) -> Self {
        ExperimentConfig {
            name: None,
            dataset: DatasetSource::Synthetic(spec),
            learner: default_learner(),
            tune_trials: 0,
            ea: EAConfig::default(),
            max_pois: default_max_pois(),
            resilience: default_variants(),
            strategies: default_strategies(),
            master_seed,
            output: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses a config file; relative dataset and output paths are resolved
    /// against the file's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let DatasetSource::Config(p) = &mut cfg.dataset {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(out) = &mut cfg.output {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_pois < 1 {
            return Err(Error::Config("max_pois must be >= 1".into()));
        }
        if self.resilience.is_empty() {
            return Err(Error::Config(
                "at least one resilience variant is required".into(),
            ));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        for s in &self.strategies {
            if ![Strategy::PAR, Strategy::LEX1, Strategy::LEX2].contains(s) {
                return Err(Error::Config(format!(
                    "strategy `{s}` is not one of par, lex1, lex2"
                )));
            }
        }
        self.ea.validate()
    }
}

/// Train/test data, training statistics and the display name of a dataset.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub name: String,
    pub train: Dataset,
    pub test: Dataset,
    pub stats: FeatureStats,
}

pub fn prepare_data(cfg: &ExperimentConfig) -> Result<PreparedData> {
    let (name, train, test) = match &cfg.dataset {
        DatasetSource::Config(path) => {
            let dcfg = DatasetConfig::from_file(path)?;
            let ds = load_dataset(&dcfg)?;
            let (train, test) = split_dataset(&ds, dcfg.split.test_cap()?, dcfg.seed)?;
            (cfg.name.clone().unwrap_or(dcfg.name), train, test)
        }
        DatasetSource::Synthetic(spec) => {
            let ds = generate_synthetic(spec)?;
            let (train, test) = split_dataset(&ds, TestCap::Auto, cfg.master_seed)?;
            (
                cfg.name.clone().unwrap_or_else(|| "synthetic".into()),
                train,
                test,
            )
        }
    };
    let stats = compute_feature_stats(&train)?;
    Ok(PreparedData {
        name,
        train,
        test,
        stats,
    })
}

/// Trains the configured learner, after random-search tuning if requested.
pub fn fit_model(cfg: &ExperimentConfig, train_set: &Dataset) -> Result<(Model, LearnerConfig)> {
    cfg.learner.validate(train_set.schema.len())?;
    let chosen = if cfg.tune_trials > 0 {
        tune_random_search(
            &cfg.learner,
            train_set,
            &TuningSpace::default(),
            cfg.tune_trials,
            cfg.learner.seed,
        )?
        .best
    } else {
        cfg.learner.clone()
    };
    Ok((train(train_set, &chosen)?, chosen))
}

fn hash_seed(parts: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}

/// Seed of every run for one point of interest.
pub fn poi_seed(master_seed: u64, dataset: &str, poi: usize) -> u64 {
    hash_seed(&[
        b"poi",
        &master_seed.to_le_bytes(),
        dataset.as_bytes(),
        &(poi as u64).to_le_bytes(),
    ])
}

/// Seed of the point-of-interest sampler.
pub fn sampling_seed(master_seed: u64, dataset: &str) -> u64 {
    hash_seed(&[b"sample", &master_seed.to_le_bytes(), dataset.as_bytes()])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointOfInterest {
    /// Row of the test set.
    pub test_row: usize,
    pub values: Vec<Value>,
}

/// Visits the test set in random order and keeps up to `max_n` instances the
/// model predicts negative.
pub fn sample_points_of_interest<C: Classifier + ?Sized, R: Rng + ?Sized>(
    model: &C,
    test: &Dataset,
    max_n: usize,
    rng: &mut R,
) -> Vec<PointOfInterest> {
    let mut order: Vec<usize> = (0..test.len()).collect();
    order.shuffle(rng);
    order
        .into_iter()
        .filter(|&i| !model.predict_class(&test.instances[i].values).is_positive())
        .take(max_n)
        .map(|i| PointOfInterest {
            test_row: i,
            values: test.instances[i].values.clone(),
        })
        .collect()
}

/// One strategy's outcome on one point of interest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub strategy: Strategy,
    pub generations_executed: usize,
    pub evaluations: usize,
    pub audit: ConstraintAudit,
    pub returned: Vec<ObjectiveVector>,
    pub solutions: Vec<Vec<Value>>,
}

/// Raw per-POI outcome of all three strategies under one resilience variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiRecord {
    pub dataset: String,
    pub poi: usize,
    pub test_row: usize,
    pub resilience: bool,
    pub seed: u64,
    pub x_pt: Vec<Value>,
    pub runs: Vec<RunRecord>,
}

impl PoiRecord {
    fn from_paired(
        dataset: &str,
        poi: usize,
        point: &PointOfInterest,
        resilience: bool,
        seed: u64,
        paired: &PairedResult,
    ) -> Self {
        let runs = paired
            .iter()
            .map(|r| RunRecord {
                strategy: r.strategy,
                generations_executed: r.generations_executed,
                evaluations: r.evaluations,
                audit: r.audit,
                returned: r.returned.iter().map(|c| c.objectives).collect(),
                solutions: r.returned.iter().map(|c| c.values.clone()).collect(),
            })
            .collect();
        PoiRecord {
            dataset: dataset.to_string(),
            poi,
            test_row: point.test_row,
            resilience,
            seed,
            x_pt: point.values.clone(),
            runs,
        }
    }

    pub fn run(&self, strategy: Strategy) -> Option<&RunRecord> {
        self.runs.iter().find(|r| r.strategy == strategy)
    }

    pub fn solutions(&self, strategy: Strategy) -> Option<&[ObjectiveVector]> {
        self.run(strategy).map(|r| r.returned.as_slice())
    }

    /// True when every strategy ran the same number of generations.
    pub fn budget_parity(&self) -> bool {
        self.runs
            .windows(2)
            .all(|w| w[0].generations_executed == w[1].generations_executed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub dataset: String,
    pub version: String,
    pub master_seed: u64,
    pub max_pois: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub learner: LearnerConfig,
    pub test_accuracy: f64,
    pub pois: usize,
    pub skipped: usize,
    pub theta: f64,
    pub strategies: Vec<Strategy>,
    pub resilience: Vec<bool>,
    pub ea: EAConfig,
    /// `(resilience, strategy, pareto pairs, lex pairs)` per comparison cell.
    pub pair_counts: Vec<(bool, Strategy, usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub records: Vec<PoiRecord>,
    pub metadata: Metadata,
}

/// Worker pool sized by `LEXCF_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize =
            v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                Error::Config(format!("{THREADS_ENV}={v} is not a positive integer"))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let data = prepare_data(cfg)?;
    let (model, learner) = fit_model(cfg, &data.train)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sampling_seed(cfg.master_seed, &data.name));
    let points = sample_points_of_interest(&model, &data.test, cfg.max_pois, &mut rng);

    let jobs: Vec<(usize, bool)> = (0..points.len())
        .flat_map(|p| cfg.resilience.iter().map(move |&r| (p, r)))
        .collect();
    let run_one = |&(poi, resilience): &(usize, bool)| -> Result<PoiRecord> {
        let point = &points[poi];
        let seed = poi_seed(cfg.master_seed, &data.name, poi);
        let ctx = EaContext {
            x_pt: &point.values,
            model: &model,
            train: &data.train,
            stats: &data.stats,
        };
        let ea = EAConfig {
            seed,
            resilience,
            ..cfg.ea.clone()
        };
        let paired = run_paired(&ctx, &ea)?;
        let record = PoiRecord::from_paired(&data.name, poi, point, resilience, seed, &paired);
        if !record.budget_parity() {
            return Err(Error::Invariant(format!(
                "POI {poi}: strategies ran different generation counts"
            )));
        }
        Ok(record)
    };
    let records =
        thread_pool()?.install(|| jobs.par_iter().map(run_one).collect::<Result<Vec<_>>>())?;

    let report = aggregate(
        &data.name,
        &records,
        &cfg.strategies,
        &cfg.resilience,
        cfg.ea.theta,
    );
    let metadata = Metadata {
        dataset: data.name.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: cfg.master_seed,
        max_pois: cfg.max_pois,
        train_rows: data.train.len(),
        test_rows: data.test.len(),
        learner,
        test_accuracy: accuracy(&model, &data.test),
        pois: points.len(),
        skipped: report.skipped,
        theta: cfg.ea.theta,
        strategies: cfg.strategies.clone(),
        resilience: cfg.resilience.clone(),
        ea: cfg.ea.clone(),
        pair_counts: pair_counts(&report),
    };
    Ok(ExperimentOutput {
        report,
        records,
        metadata,
    })
}

fn pair_counts(report: &ExperimentReport) -> Vec<(bool, Strategy, usize, usize)> {
    report
        .pareto
        .iter()
        .zip(&report.lex)
        .map(|(p, l)| (p.resilience, p.strategy, p.pairs(), l.pairs()))
        .collect()
}

pub fn write_records(path: impl AsRef<Path>, records: &[PoiRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| Error::Invariant(format!("serialize record: {e}")))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<PoiRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (row, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            row,
            message: format!("{}: {e}", path.display()),
        })?);
    }
    Ok(out)
}

/// Writes records, both report formats and the metadata into `dir`.
pub fn write_outputs(output: &ExperimentOutput, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let records = dir.join(RECORDS_FILE);
    write_records(&records, &output.records)?;
    written.push(records);
    for format in [ReportFormat::Csv, ReportFormat::Markdown] {
        written.extend(emit_report(&output.report, dir, format)?);
    }
    let meta = dir.join(METADATA_FILE);
    let text = serde_json::to_string_pretty(&output.metadata)
        .map_err(|e| Error::Invariant(format!("serialize metadata: {e}")))?;
    std::fs::write(&meta, text + "\n").map_err(|e| Error::io(&meta, e))?;
    written.push(meta);
    Ok(written)
}

/// Recomputes the aggregates of a finished run from its directory. Strategy,
/// variant and tolerance settings come from the metadata when present.
pub fn recompute_from_dir(dir: impl AsRef<Path>) -> Result<ExperimentReport> {
    let dir = dir.as_ref();
    let records = read_records(dir.join(RECORDS_FILE))?;
    if let Some(r) = records.iter().find(|r| !r.budget_parity()) {
        return Err(Error::Invariant(format!(
            "POI {} (resilience {}): strategies ran different generation counts",
            r.poi, r.resilience
        )));
    }
    let meta_path = dir.join(METADATA_FILE);
    let meta: Option<Metadata> = if meta_path.exists() {
        let text = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        Some(serde_json::from_str(&text).map_err(|e| Error::Parse {
            row: 0,
            message: format!("{}: {e}", meta_path.display()),
        })?)
    } else {
        None
    };
    let (dataset, strategies, variants, theta) = match meta {
        Some(m) => (m.dataset, m.strategies, m.resilience, m.theta),
        None => {
            let mut variants: Vec<bool> = records.iter().map(|r| r.resilience).collect();
            variants.sort_unstable();
            variants.dedup();
            (
                records
                    .first()
                    .map(|r| r.dataset.clone())
                    .unwrap_or_default(),
                default_strategies(),
                variants,
                EAConfig::default().theta,
            )
        }
    };
    Ok(aggregate(&dataset, &records, &strategies, &variants, theta))
}
