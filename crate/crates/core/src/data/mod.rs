//! Tabular datasets: schemas, ingestion, splitting and training-set statistics.

mod config;
mod load;
pub mod presets;
mod split;
mod stats;
mod synthetic;

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::{DatasetConfig, FeatureConfig, SplitConfig};
pub use load::{load_dataset, load_dataset_with, read_dataset, write_csv, LoadOptions};
pub use split::{split_dataset, TestCap};
pub use stats::{compute_feature_stats, FeatureStat, FeatureStats};
pub use synthetic::{generate_synthetic, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    #[serde(alias = "continuous", alias = "numeric")]
    NumericContinuous,
    #[serde(alias = "integer")]
    NumericInteger,
    Categorical,
}

impl FeatureKind {
    pub fn is_numeric(self) -> bool {
        !matches!(self, FeatureKind::Categorical)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub kind: FeatureKind,
    pub actionable: bool,
    /// Ordered category tokens. Empty for numeric features.
    #[serde(default)]
    pub categories: Vec<String>,
}

impl FeatureSchema {
    pub fn continuous(name: impl Into<String>) -> Self {
        Self::numeric(name, FeatureKind::NumericContinuous)
    }

    pub fn integer(name: impl Into<String>) -> Self {
        Self::numeric(name, FeatureKind::NumericInteger)
    }

    fn numeric(name: impl Into<String>, kind: FeatureKind) -> Self {
        FeatureSchema {
            name: name.into(),
            kind,
            actionable: true,
            categories: Vec::new(),
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        categories: impl IntoIterator<Item = S>,
    ) -> Self {
        FeatureSchema {
            name: name.into(),
            kind: FeatureKind::Categorical,
            actionable: true,
            categories: categories.into_iter().map(Into::into).collect(),
        }
    }

    pub fn non_actionable(mut self) -> Self {
        self.actionable = false;
        self
    }

    pub fn category_index(&self, token: &str) -> Option<u32> {
        self.categories
            .iter()
            .position(|c| c == token)
            .map(|i| i as u32)
    }
}

/// Validated, ordered list of features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FeatureSchema>", into = "Vec<FeatureSchema>")]
pub struct Schema {
    features: Vec<FeatureSchema>,
}

impl Schema {
    pub fn new(features: Vec<FeatureSchema>) -> Result<Self> {
        let mut seen = HashSet::new();
        for f in &features {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::Schema(format!(
                    "duplicate feature name `{}`",
                    f.name
                )));
            }
            match f.kind {
                FeatureKind::Categorical if f.categories.is_empty() => {
                    return Err(Error::Schema(format!(
                        "categorical feature `{}` declares no categories",
                        f.name
                    )));
                }
                FeatureKind::NumericContinuous | FeatureKind::NumericInteger
                    if !f.categories.is_empty() =>
                {
                    return Err(Error::Schema(format!(
                        "numeric feature `{}` must not declare categories",
                        f.name
                    )));
                }
                _ => {}
            }
            let unique: HashSet<_> = f.categories.iter().collect();
            if unique.len() != f.categories.len() {
                return Err(Error::Schema(format!(
                    "feature `{}` lists a category twice",
                    f.name
                )));
            }
        }
        Ok(Schema { features })
    }

    pub fn features(&self) -> &[FeatureSchema] {
        &self.features
    }

    pub fn feature(&self, i: usize) -> &FeatureSchema {
        &self.features[i]
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn actionable_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.features[i].actionable)
            .collect()
    }

    /// Marks the named features as non-actionable. Unknown names are a schema error.
    pub fn with_non_actionable<S: AsRef<str>>(mut self, names: &[S]) -> Result<Self> {
        for name in names {
            let i = self.index_of(name.as_ref()).ok_or_else(|| {
                Error::Schema(format!(
                    "unknown non-actionable feature `{}`",
                    name.as_ref()
                ))
            })?;
            self.features[i].actionable = false;
        }
        Ok(self)
    }

    /// Checks that `values` has one correctly-typed entry per feature.
    pub fn validate(&self, values: &[Value]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::Contract(format!(
                "instance has {} values, schema has {} features",
                values.len(),
                self.len()
            )));
        }
        for (f, v) in self.features.iter().zip(values) {
            match (f.kind, v) {
                (FeatureKind::Categorical, Value::Cat(c)) if (*c as usize) < f.categories.len() => {
                }
                (FeatureKind::NumericContinuous, Value::Num(x)) if x.is_finite() => {}
                (FeatureKind::NumericInteger, Value::Num(x))
                    if x.is_finite() && x.fract() == 0.0 => {}
                _ => {
                    return Err(Error::Contract(format!(
                        "value {v:?} does not match feature `{}` ({:?})",
                        f.name, f.kind
                    )))
                }
            }
        }
        Ok(())
    }

    /// Renders a value with its feature's category token when categorical.
    pub fn display_value(&self, i: usize, v: Value) -> String {
        match v {
            Value::Num(x) => format!("{x}"),
            Value::Cat(c) => self.features[i]
                .categories
                .get(c as usize)
                .cloned()
                .unwrap_or_else(|| format!("#{c}")),
        }
    }
}

impl TryFrom<Vec<FeatureSchema>> for Schema {
    type Error = Error;

    fn try_from(features: Vec<FeatureSchema>) -> Result<Self> {
        Schema::new(features)
    }
}

impl From<Schema> for Vec<FeatureSchema> {
    fn from(s: Schema) -> Self {
        s.features
    }
}

/// A single feature value. Categorical values index into the feature's category list.
///
/// Equality and hashing are bitwise on numbers so values can key hash maps;
/// `-0.0` and `0.0` are therefore distinct, which the EA never produces.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    Num(f64),
    Cat(u32),
}

impl Value {
    pub fn as_num(self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(x),
            Value::Cat(_) => None,
        }
    }

    pub fn as_cat(self) -> Option<u32> {
        match self {
            Value::Cat(c) => Some(c),
            Value::Num(_) => None,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Num(a), Value::Num(b)) => a.to_bits() == b.to_bits(),
            (Value::Cat(a), Value::Cat(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Num(x) => {
                0u8.hash(state);
                x.to_bits().hash(state);
            }
            Value::Cat(c) => {
                1u8.hash(state);
                c.hash(state);
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) => write!(f, "{x}"),
            Value::Cat(c) => write!(f, "#{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Negative,
    Positive,
}

impl Class {
    pub fn from_probability(p: f64) -> Class {
        if p >= 0.5 {
            Class::Positive
        } else {
            Class::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Class::Positive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub values: Vec<Value>,
    pub class: Option<Class>,
}

impl Instance {
    pub fn new(values: Vec<Value>, class: Option<Class>) -> Self {
        Instance { values, class }
    }

    pub fn unlabeled(values: Vec<Value>) -> Self {
        Instance {
            values,
            class: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Full,
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: Schema,
    pub instances: Vec<Instance>,
    pub role: Role,
}

impl Dataset {
    /// Builds a dataset, checking every instance against the schema and requiring labels.
    pub fn new(schema: Schema, instances: Vec<Instance>, role: Role) -> Result<Self> {
        for (row, inst) in instances.iter().enumerate() {
            schema.validate(&inst.values).map_err(|e| Error::Parse {
                row,
                message: e.to_string(),
            })?;
            if inst.class.is_none() {
                return Err(Error::Parse {
                    row,
                    message: "missing class label".into(),
                });
            }
        }
        Ok(Dataset {
            schema,
            instances,
            role,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = Class> + '_ {
        self.instances
            .iter()
            .map(|i| i.class.expect("dataset instances are labeled"))
    }

    pub fn positive_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.labels().filter(|c| c.is_positive()).count() as f64 / self.len() as f64
    }

    /// Keeps the given rows, in order, under a new role.
    pub fn subset(&self, rows: &[usize], role: Role) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            instances: rows.iter().map(|&r| self.instances[r].clone()).collect(),
            role,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_rejected() {
        let err = Schema::new(vec![
            FeatureSchema::continuous("a"),
            FeatureSchema::integer("a"),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn categorical_needs_categories() {
        let empty: [&str; 0] = [];
        assert!(Schema::new(vec![FeatureSchema::categorical("c", empty)]).is_err());
        let mut numeric = FeatureSchema::continuous("x");
        numeric.categories.push("a".into());
        assert!(Schema::new(vec![numeric]).is_err());
    }

    #[test]
    fn validate_checks_kinds() {
        let schema = Schema::new(vec![
            FeatureSchema::integer("n"),
            FeatureSchema::categorical("c", ["a", "b"]),
        ])
        .unwrap();
        assert!(schema.validate(&[Value::Num(3.0), Value::Cat(1)]).is_ok());
        assert!(schema.validate(&[Value::Num(3.5), Value::Cat(1)]).is_err());
        assert!(schema.validate(&[Value::Num(3.0), Value::Cat(2)]).is_err());
        assert!(schema.validate(&[Value::Cat(0), Value::Cat(1)]).is_err());
        assert!(schema.validate(&[Value::Num(3.0)]).is_err());
    }

    #[test]
    fn probability_threshold_is_closed_at_half() {
        assert_eq!(Class::from_probability(0.5), Class::Positive);
        assert_eq!(Class::from_probability(0.4999999), Class::Negative);
    }
}
