mod poi;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lexcf_core::bench::{
    recompute_from_dir, report_tables, run_experiment, write_outputs, ExperimentConfig,
};
use lexcf_core::data::{
    generate_synthetic, load_dataset, split_dataset, write_csv, DatasetConfig, SyntheticSpec,
};
use lexcf_core::ea::{run_ea_observed, EAConfig, EaContext};
use lexcf_core::model::{
    accuracy, load_model, save_model, train, tune_random_search, LearnerConfig, TuningSpace,
};
use lexcf_core::{Classifier, Dataset, Error, ErrorKind, Result};

#[derive(Parser)]
#[command(
    name = "lexcf",
    version,
    about = "Counterfactual explanations by lexicographic or Pareto evolutionary search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Pareto,
    Lex,
}

#[derive(Subcommand)]
enum Command {
    /// Train a classifier on the training split of a dataset.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "rf")]
        learner: String,
        /// Random-search trials; 0 keeps the default hyperparameters.
        #[arg(long, default_value_t = 0)]
        tune: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search counterfactuals for one point of interest.
    Explain {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Row index into the cleaned dataset, or a JSON object of feature values.
        #[arg(long)]
        poi: String,
        /// par, lex1, lex2 or lex(o1,o3,o2,o4)
        #[arg(long, default_value = "lex1")]
        strategy: String,
        #[arg(long, value_enum, default_value = "off")]
        resilience: Switch,
        #[arg(long, default_value_t = 0.01)]
        theta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        generations: usize,
        #[arg(long, default_value_t = 20)]
        population: usize,
        /// Write the per-generation trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print the returned solutions as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a full experiment and write its report files.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute win/loss/tie tables from the raw records of a finished run.
    Compare {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long, value_enum, default_value = "lex")]
        mode: Mode,
    },
    /// Write a synthetic dataset and its dataset config.
    Generate {
        #[arg(long, default_value_t = 8)]
        continuous: usize,
        #[arg(long, default_value_t = 0)]
        integer: usize,
        #[arg(long, default_value_t = 0)]
        categorical: usize,
        #[arg(long, default_value_t = 450)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        non_actionable: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Data => 3,
                ErrorKind::Invariant => 4,
            })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Train {
            data,
            learner,
            tune,
            seed,
            out,
        } => cmd_train(&data, &learner, tune, seed, &out),
        Command::Explain {
            model,
            data,
            poi,
            strategy,
            resilience,
            theta,
            seed,
            generations,
            population,
            trace,
            json,
        } => {
            let cfg = EAConfig {
                population_size: population,
                max_generations: generations,
                strategy: strategy.parse()?,
                theta,
                resilience: matches!(resilience, Switch::On),
                seed,
                ..EAConfig::default()
            };
            cmd_explain(&model, &data, &poi, &cfg, trace.as_deref(), json)
        }
        Command::Bench { config, out } => cmd_bench(&config, out),
        Command::Compare { runs, mode } => cmd_compare(&runs, mode),
        Command::Generate {
            continuous,
            integer,
            categorical,
            n,
            non_actionable,
            seed,
            out,
        } => {
            let spec = SyntheticSpec {
                continuous,
                integer,
                categorical,
                non_actionable,
                ..SyntheticSpec::numeric(0, n, seed)
            };
            cmd_generate(&spec, &out)
        }
    }
}

/// Config, cleaned dataset, and its train/test split.
fn load_split(data: &Path) -> Result<(DatasetConfig, Dataset, Dataset, Dataset)> {
    let dcfg = DatasetConfig::from_file(data)?;
    let full = load_dataset(&dcfg)?;
    let (tr, te) = split_dataset(&full, dcfg.split.test_cap()?, dcfg.seed)?;
    Ok((dcfg, full, tr, te))
}

fn cmd_train(data: &Path, learner: &str, tune: usize, seed: u64, out: &Path) -> Result<()> {
    let (dcfg, _, tr, te) = load_split(data)?;
    let base = LearnerConfig::from_name(learner, seed)?;
    base.validate(tr.schema.len())?;
    let chosen = if tune > 0 {
        let result = tune_random_search(&base, &tr, &TuningSpace::default(), tune, seed)?;
        let best = result
            .trials
            .iter()
            .map(|t| t.accuracy)
            .fold(f64::NEG_INFINITY, f64::max);
        println!("tuning: {tune} trials, best cross-validated accuracy {best:.4}");
        result.best
    } else {
        base
    };
    let model = train(&tr, &chosen)?;
    save_model(&model, &tr.schema, out)?;
    println!(
        "trained {} on {} ({} train rows), held-out accuracy {:.4} on {} rows",
        model.learner_name(),
        dcfg.name,
        tr.len(),
        accuracy(&model, &te),
        te.len()
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_explain(
    model_path: &Path,
    data: &Path,
    poi_arg: &str,
    cfg: &EAConfig,
    trace: Option<&Path>,
    json: bool,
) -> Result<()> {
    let file = load_model(model_path)?;
    let (_, full, tr, _) = load_split(data)?;
    file.check_schema(&tr.schema)?;
    let model = &file.model;
    let stats = lexcf_core::data::compute_feature_stats(&tr)?;
    let (row, x_pt) = poi::resolve(poi_arg, &full)?;
    let p_pt = model.predict_proba(&x_pt);
    if model.predict_class(&x_pt).is_positive() {
        return Err(Error::Config(format!(
            "the model already predicts the positive class for this point (p = {p_pt:.4})"
        )));
    }
    let ctx = EaContext {
        x_pt: &x_pt,
        model,
        train: &tr,
        stats: &stats,
    };

    let mut trace_out = match trace {
        Some(path) => Some((
            path,
            BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?),
        )),
        None => None,
    };
    let mut trace_err = None;
    let result = run_ea_observed(&ctx, cfg, |rec| {
        if let Some((path, w)) = trace_out.as_mut() {
            let line = serde_json::to_string(rec).expect("trace record serializes");
            if let Err(e) = writeln!(w, "{line}") {
                trace_err.get_or_insert(Error::io(*path, e));
            }
        }
    })?;
    if let Some(e) = trace_err {
        return Err(e);
    }
    if let Some((path, mut w)) = trace_out {
        w.flush().map_err(|e| Error::io(path, e))?;
    }

    if json {
        let text = serde_json::to_string_pretty(&result.returned)
            .map_err(|e| Error::Invariant(format!("serialize result: {e}")))?;
        println!("{text}");
        return Ok(());
    }
    let schema = &tr.schema;
    println!(
        "strategy {}, resilience {}, {} generations, {} solution(s)",
        result.strategy,
        if cfg.resilience { "on" } else { "off" },
        result.generations_executed,
        result.returned.len()
    );
    match row {
        Some(r) => println!("point of interest: row {r}, p = {p_pt:.4}"),
        None => println!("point of interest: inline, p = {p_pt:.4}"),
    }
    for (k, c) in result.returned.iter().enumerate() {
        let o = c.objectives;
        println!(
            "solution {}: o1 = {:.4}, o2 = {:.4}, o3 = {}, o4 = {:.4}, p = {:.4}{}",
            k + 1,
            o.validity(),
            o.distance(),
            o.sparsity(),
            o.plausibility(),
            model.predict_proba(&c.values),
            if o.is_valid() { "" } else { " (not valid)" }
        );
        for (i, f) in schema.features().iter().enumerate() {
            if c.values[i] != x_pt[i] {
                println!(
                    "  {}: {} -> {}",
                    f.name,
                    schema.display_value(i, x_pt[i]),
                    schema.display_value(i, c.values[i])
                );
            }
        }
    }
    Ok(())
}

fn cmd_bench(config: &Path, out: Option<PathBuf>) -> Result<()> {
    let cfg = ExperimentConfig::from_file(config)?;
    let dir = out
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| Error::Config("no output directory: pass --out or set `output`".into()))?;
    let start = Instant::now();
    let output = run_experiment(&cfg)?;
    write_outputs(&output, &dir)?;
    let report = &output.report;
    if report.is_empty() {
        println!(
            "no usable points of interest: the model predicts positive for every sampled test row"
        );
    }
    for t in report_tables(report)
        .iter()
        .filter(|t| ["validity", "pareto_wlt", "lex_wlt"].contains(&t.name.as_str()))
    {
        println!("{}\n{}", t.name, t.to_markdown());
    }
    eprintln!(
        "{} points of interest in {:.1}s, report written to {}",
        report.pois,
        start.elapsed().as_secs_f64(),
        dir.display()
    );
    Ok(())
}

fn cmd_compare(runs: &Path, mode: Mode) -> Result<()> {
    let report = recompute_from_dir(runs)?;
    let name = match mode {
        Mode::Pareto => "pareto_wlt",
        Mode::Lex => "lex_wlt",
    };
    let table = report_tables(&report)
        .into_iter()
        .find(|t| t.name == name)
        .expect("report always has both win/loss/tie tables");
    print!("{}", table.to_markdown());
    Ok(())
}

fn cmd_generate(spec: &SyntheticSpec, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let ds = generate_synthetic(spec)?;
    let csv_path = out.join("data.csv");
    let file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_csv(&ds, BufWriter::new(file), "label", "1", "0")?;
    let dcfg = spec.dataset_config("synthetic", "data.csv")?;
    let toml_path = out.join("dataset.toml");
    let text =
        toml::to_string(&dcfg).map_err(|e| Error::Invariant(format!("serialize config: {e}")))?;
    std::fs::write(&toml_path, text).map_err(|e| Error::io(&toml_path, e))?;
    println!(
        "wrote {} rows to {} and {}",
        ds.len(),
        csv_path.display(),
        toml_path.display()
    );
    Ok(())
}
