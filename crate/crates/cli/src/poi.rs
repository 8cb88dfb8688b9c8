use lexcf_core::data::{Dataset, Schema, Value};
use lexcf_core::{Error, Result};

/// A point of interest given on the command line: a row index into the
/// cleaned dataset, or an inline JSON object keyed by feature name.
pub fn resolve(arg: &str, dataset: &Dataset) -> Result<(Option<usize>, Vec<Value>)> {
    let arg = arg.trim();
    if let Ok(row) = arg.parse::<usize>() {
        let inst = dataset.instances.get(row).ok_or_else(|| {
            Error::Config(format!(
                "row {row} is out of range: the dataset has {} rows",
                dataset.len()
            ))
        })?;
        return Ok((Some(row), inst.values.clone()));
    }
    let json: serde_json::Value = serde_json::from_str(arg)
        .map_err(|e| Error::Config(format!("--poi is neither a row index nor JSON: {e}")))?;
    Ok((None, from_json(&json, &dataset.schema)?))
}

fn from_json(json: &serde_json::Value, schema: &Schema) -> Result<Vec<Value>> {
    let obj = json
        .as_object()
        .ok_or_else(|| Error::Config("inline point of interest must be a JSON object".into()))?;
    for key in obj.keys() {
        if schema.index_of(key).is_none() {
            return Err(Error::Schema(format!("unknown feature `{key}`")));
        }
    }
    let values = schema
        .features()
        .iter()
        .map(|f| {
            let v = obj
                .get(&f.name)
                .ok_or_else(|| Error::Schema(format!("missing feature `{}`", f.name)))?;
            if f.kind.is_numeric() {
                v.as_f64()
                    .map(|x| Value::Num(x + 0.0))
                    .ok_or_else(|| Error::Schema(format!("feature `{}` needs a number", f.name)))
            } else {
                let token = match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                f.category_index(&token).map(Value::Cat).ok_or_else(|| {
                    Error::Schema(format!("unknown category `{token}` for `{}`", f.name))
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    schema
        .validate(&values)
        .map_err(|e| Error::Schema(e.to_string()))?;
    Ok(values)
}
