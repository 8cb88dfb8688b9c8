use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use super::{Class, Dataset, DatasetConfig, FeatureKind, Instance, Role, Schema, Value};
use crate::error::{Error, Result};

/// Column-level options for [`read_dataset`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub class_column: String,
    pub positive_label: String,
    pub missing_tokens: Vec<String>,
}

impl LoadOptions {
    pub fn new(class_column: impl Into<String>, positive_label: impl Into<String>) -> Self {
        LoadOptions {
            class_column: class_column.into(),
            positive_label: positive_label.into(),
            missing_tokens: vec![String::new(), "NA".into(), "?".into()],
        }
    }
}

/// Loads the CSV named by a dataset config.
pub fn load_dataset(cfg: &DatasetConfig) -> Result<Dataset> {
    let opts = LoadOptions {
        class_column: cfg.class_column.clone(),
        positive_label: cfg.positive_label.clone(),
        missing_tokens: cfg.missing_tokens.clone(),
    };
    load_dataset_with(&cfg.csv, cfg.schema()?, &opts)
}

pub fn load_dataset_with(path: &Path, schema: Schema, opts: &LoadOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(file, schema, opts)
}

/// Parses comma-separated text with a header row. Rows containing a missing
/// token in any column are dropped; `Parse` errors carry the 0-based data-row index.
pub fn read_dataset<R: Read>(reader: R, schema: Schema, opts: &LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();

    let mut column_of = vec![usize::MAX; schema.len()];
    let mut class_col = None;
    for (col, name) in headers.iter().enumerate() {
        if name == opts.class_column {
            class_col = Some(col);
        } else if let Some(i) = schema.index_of(name) {
            column_of[i] = col;
        } else {
            return Err(Error::Schema(format!("unknown column `{name}`")));
        }
    }
    let class_col = class_col
        .ok_or_else(|| Error::Schema(format!("class column `{}` not found", opts.class_column)))?;
    if let Some(i) = column_of.iter().position(|&c| c == usize::MAX) {
        return Err(Error::Schema(format!(
            "feature `{}` has no column in the header",
            schema.feature(i).name
        )));
    }

    let is_missing = |cell: &str| opts.missing_tokens.iter().any(|t| t == cell);
    let mut labels_seen = BTreeSet::new();
    let mut instances = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.iter().any(is_missing) {
            continue;
        }
        let mut values = Vec::with_capacity(schema.len());
        for (i, feature) in schema.features().iter().enumerate() {
            let cell = &record[column_of[i]];
            let value = match feature.kind {
                FeatureKind::Categorical => {
                    let c = feature.category_index(cell).ok_or_else(|| Error::Parse {
                        row,
                        message: format!("unseen category `{cell}` for `{}`", feature.name),
                    })?;
                    Value::Cat(c)
                }
                kind => {
                    let x: f64 = cell.parse().map_err(|_| Error::Parse {
                        row,
                        message: format!("`{cell}` is not numeric ({})", feature.name),
                    })?;
                    if !x.is_finite() || (kind == FeatureKind::NumericInteger && x.fract() != 0.0) {
                        return Err(Error::Parse {
                            row,
                            message: format!("`{cell}` is not a valid {:?} value", kind),
                        });
                    }
                    Value::Num(x + 0.0)
                }
            };
            values.push(value);
        }
        let label = &record[class_col];
        labels_seen.insert(label.to_string());
        if labels_seen.len() > 2 {
            return Err(Error::Parse {
                row,
                message: format!("more than two class labels: {labels_seen:?}"),
            });
        }
        let class = if label == opts.positive_label {
            Class::Positive
        } else {
            Class::Negative
        };
        instances.push(Instance::new(values, Some(class)));
    }
    Dataset::new(schema, instances, Role::Full)
}

/// Writes `ds` as CSV with the class in a trailing column.
pub fn write_csv<W: std::io::Write>(
    ds: &Dataset,
    writer: W,
    class_column: &str,
    positive_label: &str,
    negative_label: &str,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = ds
        .schema
        .features()
        .iter()
        .map(|f| f.name.as_str())
        .collect();
    header.push(class_column);
    w.write_record(&header)?;
    for inst in &ds.instances {
        let mut record: Vec<String> = inst
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| ds.schema.display_value(i, v))
            .collect();
        record.push(match inst.class {
            Some(Class::Positive) => positive_label.to_string(),
            _ => negative_label.to_string(),
        });
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}
