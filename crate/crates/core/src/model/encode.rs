use serde::{Deserialize, Serialize};

use crate::data::{compute_feature_stats, Dataset, FeatureKind, FeatureStat, Value};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
enum Column {
    Numeric { lower: f64, range: f64 },
    OneHot { width: u32 },
}

/// Maps raw feature vectors to a dense vector: numeric features are min-max
/// scaled with training bounds, categorical features are one-hot encoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    columns: Vec<Column>,
    width: usize,
}

impl Encoder {
    pub fn fit(train: &Dataset) -> Result<Self> {
        let stats = compute_feature_stats(train)?;
        let columns: Vec<Column> = train
            .schema
            .features()
            .iter()
            .zip(&stats.features)
            .map(|(f, s)| match (f.kind, s) {
                (FeatureKind::Categorical, _) => Column::OneHot {
                    width: f.categories.len() as u32,
                },
                (_, FeatureStat::Numeric { lower, range, .. }) => Column::Numeric {
                    lower: *lower,
                    range: *range,
                },
                (_, FeatureStat::Categorical { .. }) => unreachable!("stats follow schema kinds"),
            })
            .collect();
        let width = columns
            .iter()
            .map(|c| match c {
                Column::Numeric { .. } => 1,
                Column::OneHot { width } => *width as usize,
            })
            .sum();
        Ok(Encoder { columns, width })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn encode_into(&self, x: &[Value], out: &mut Vec<f64>) {
        out.clear();
        for (col, v) in self.columns.iter().zip(x) {
            match (col, *v) {
                (Column::Numeric { lower, range }, Value::Num(x)) => {
                    out.push(if *range > 0.0 {
                        (x - lower) / range
                    } else {
                        0.0
                    });
                }
                (Column::OneHot { width }, Value::Cat(c)) => {
                    out.extend((0..*width).map(|k| if k == c { 1.0 } else { 0.0 }));
                }
                _ => panic!("value {v:?} does not match encoder column"),
            }
        }
    }

    pub fn encode(&self, x: &[Value]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.width);
        self.encode_into(x, &mut out);
        out
    }
}
