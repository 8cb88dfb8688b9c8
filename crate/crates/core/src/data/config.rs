use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{presets, split::TestCap, FeatureKind, FeatureSchema, Schema};
use crate::error::{Error, Result};

fn default_missing_tokens() -> Vec<String> {
    vec![String::new(), "NA".into(), "?".into()]
}

fn default_true() -> bool {
    true
}

/// One `[[features]]` entry of a dataset config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default = "default_true")]
    pub actionable: bool,
    #[serde(default)]
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    /// Absolute test-set size.
    #[serde(default)]
    pub test_cap: Option<usize>,
    /// Test-set size as a fraction of the cleaned dataset.
    #[serde(default)]
    pub test_fraction: Option<f64>,
}

impl SplitConfig {
    pub fn test_cap(&self) -> Result<TestCap> {
        match (self.test_cap, self.test_fraction) {
            (Some(_), Some(_)) => Err(Error::Config(
                "set at most one of `test_cap` and `test_fraction`".into(),
            )),
            (Some(n), None) => Ok(TestCap::Count(n)),
            (None, Some(f)) => Ok(TestCap::Fraction(f)),
            (None, None) => Ok(TestCap::Auto),
        }
    }
}

/// Dataset config file contents.
///
/// ```toml
/// name = "diabetes"
/// csv = "diabetes.csv"
/// class_column = "outcome"
/// positive_label = "1"
/// preset = "diabetes"
///
/// [[features]]
/// name = "glucose"
/// kind = "integer"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub name: String,
    /// CSV path, resolved against the config file's directory when relative.
    pub csv: PathBuf,
    pub class_column: String,
    pub positive_label: String,
    #[serde(default = "default_missing_tokens")]
    pub missing_tokens: Vec<String>,
    /// Applies a shipped non-actionable feature list (see [`presets`]).
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub seed: u64,
    pub features: Vec<FeatureConfig>,
}

impl DatasetConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file and resolves its CSV path relative to the file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if cfg.csv.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.csv = dir.join(&cfg.csv);
            }
        }
        Ok(cfg)
    }

    pub fn schema(&self) -> Result<Schema> {
        let features = self
            .features
            .iter()
            .map(|f| FeatureSchema {
                name: f.name.clone(),
                kind: f.kind,
                actionable: f.actionable,
                categories: f.categories.clone(),
            })
            .collect();
        let schema = Schema::new(features)?;
        match &self.preset {
            None => Ok(schema),
            Some(p) => {
                let names = presets::non_actionable(p)
                    .ok_or_else(|| Error::Config(format!("unknown preset `{p}`")))?;
                schema.with_non_actionable(names)
            }
        }
    }
}
