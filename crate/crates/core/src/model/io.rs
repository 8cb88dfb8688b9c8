use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Model;
use crate::data::Schema;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MODEL_FORMAT_TAG: &str = "lexcf-model";

/// On-disk model container (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub learner: String,
    pub schema_fingerprint: String,
    pub schema: Schema,
    pub model: Model,
}

impl ModelFile {
    pub fn new(model: Model, schema: Schema) -> Self {
        ModelFile {
            format: MODEL_FORMAT_TAG.into(),
            version: MODEL_FORMAT_VERSION,
            learner: model.learner_name().into(),
            schema_fingerprint: schema_fingerprint(&schema),
            schema,
            model,
        }
    }

    /// Fails unless `schema` has the same names, kinds and categories as the trained one.
    pub fn check_schema(&self, schema: &Schema) -> Result<()> {
        if schema_fingerprint(schema) != self.schema_fingerprint {
            return Err(Error::Schema(
                "dataset schema does not match the model's training schema".into(),
            ));
        }
        Ok(())
    }
}

/// SHA-256 over feature names, kinds and categories. Actionability is excluded:
/// it constrains the search, not the model.
pub fn schema_fingerprint(schema: &Schema) -> String {
    let mut hasher = Sha256::new();
    for f in schema.features() {
        hasher.update(f.name.as_bytes());
        hasher.update([0]);
        hasher.update(format!("{:?}", f.kind).as_bytes());
        for c in &f.categories {
            hasher.update([1]);
            hasher.update(c.as_bytes());
        }
        hasher.update([2]);
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn save_model(model: &Model, schema: &Schema, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = ModelFile::new(model.clone(), schema.clone());
    let text =
        serde_json::to_string(&file).map_err(|e| Error::ModelFile(format!("serialize: {e}")))?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}

pub(crate) fn parse_model(text: &str) -> Result<ModelFile> {
    let raw: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::ModelFile(format!("corrupt model file: {e}")))?;
    if raw.get("format").and_then(|f| f.as_str()) != Some(MODEL_FORMAT_TAG) {
        return Err(Error::ModelFile("not a lexcf model file".into()));
    }
    let version = raw
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::ModelFile("missing format version".into()))?;
    if version != MODEL_FORMAT_VERSION as u64 {
        return Err(Error::VersionMismatch {
            found: version as u32,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(raw)
        .map_err(|e| Error::ModelFile(format!("corrupt model file: {e}")))?;
    if file.schema_fingerprint != schema_fingerprint(&file.schema) {
        return Err(Error::ModelFile("schema fingerprint mismatch".into()));
    }
    Ok(file)
}
