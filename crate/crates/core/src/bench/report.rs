use std::path::{Path, PathBuf};

use super::metrics::{CellSummary, ExperimentReport, WltCell};
use crate::error::{Error, Result};
use crate::objectives::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

/// A named table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Invariant(format!("csv buffer: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Invariant(format!("csv utf-8: {e}")))
    }

    pub fn to_markdown(&self) -> String {
        let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
        let mut out = line(&self.header);
        out.push_str(&line(&vec!["---".to_string(); self.header.len()]));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

fn variant(resilience: bool) -> String {
    if resilience { "on" } else { "off" }.into()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn validity_row(dataset: &str, c: &CellSummary) -> Vec<String> {
    let pct = c.valid_fraction_micro.map(|f| f * 100.0);
    let cell = match pct {
        Some(p) => format!("{} ({:.1}%)", c.valid, p),
        None => "n/a".into(),
    };
    vec![
        dataset.into(),
        variant(c.resilience),
        c.strategy.label(),
        c.pois.to_string(),
        c.solutions.to_string(),
        c.valid.to_string(),
        opt(pct),
        opt(c.valid_fraction_macro.map(|f| f * 100.0)),
        cell,
    ]
}

fn wlt_row(dataset: &str, c: &WltCell) -> Vec<String> {
    let pairs = c.pairs();
    let win_pct = (pairs > 0).then(|| c.wlt.wins as f64 / pairs as f64 * 100.0);
    vec![
        dataset.into(),
        variant(c.resilience),
        format!("{} vs par", c.strategy.label()),
        c.pois_compared.to_string(),
        pairs.to_string(),
        c.wlt.wins.to_string(),
        c.wlt.losses.to_string(),
        c.wlt.ties.to_string(),
        opt(win_pct),
        if pairs > 0 {
            c.wlt.to_string()
        } else {
            "n/a".into()
        },
    ]
}

const WLT_HEADER: [&str; 10] = [
    "dataset",
    "resilience",
    "comparison",
    "pois",
    "pairs",
    "wins",
    "losses",
    "ties",
    "win_pct",
    "cell",
];

/// Tables in emission order: validity, o1..o4 means, Pareto and lexicographic W;L;T.
pub fn report_tables(report: &ExperimentReport) -> Vec<Table> {
    let ds = report.dataset.as_str();
    let mut validity = Table::new(
        "validity",
        &[
            "dataset",
            "resilience",
            "strategy",
            "pois",
            "solutions",
            "valid",
            "valid_pct",
            "valid_pct_macro",
            "cell",
        ],
    );
    validity.rows = report.cells.iter().map(|c| validity_row(ds, c)).collect();
    let mut tables = vec![validity];

    for (o, name) in Objective::ALL.into_iter().zip([
        "o1_validity",
        "o2_distance",
        "o3_sparsity",
        "o4_plausibility",
    ]) {
        let mut t = Table::new(
            name,
            &[
                "dataset",
                "resilience",
                "strategy",
                "solutions",
                "mean",
                "mean_macro",
            ],
        );
        t.rows = report
            .cells
            .iter()
            .map(|c| {
                vec![
                    ds.into(),
                    variant(c.resilience),
                    c.strategy.label(),
                    c.solutions.to_string(),
                    opt(c.means_micro.map(|m| m[o.index()])),
                    opt(c.means_macro.map(|m| m[o.index()])),
                ]
            })
            .collect();
        tables.push(t);
    }

    for (name, cells) in [("pareto_wlt", &report.pareto), ("lex_wlt", &report.lex)] {
        let mut t = Table::new(name, &WLT_HEADER);
        t.rows = cells.iter().map(|c| wlt_row(ds, c)).collect();
        tables.push(t);
    }
    tables
}

/// Writes one file per table into `dir` and returns the paths.
pub fn emit_report(
    report: &ExperimentReport,
    dir: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for table in report_tables(report) {
        let path = dir.join(format!("{}.{}", table.name, format.extension()));
        let text = match format {
            ReportFormat::Csv => table.to_csv()?,
            ReportFormat::Markdown => table.to_markdown(),
        };
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}
