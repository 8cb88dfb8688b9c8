use crate::data::{Dataset, FeatureStat, FeatureStats, Value};
use crate::error::{Error, Result};

/// Per-feature Gower distance in `[0, 1]`.
///
/// Numeric: `|a - b| / range`, clamped; a zero training range yields 0.
/// Categorical: 0 when equal, else 1.
pub fn gower_dist(stats: &FeatureStats, a: Value, b: Value, i: usize) -> f64 {
    match (a, b) {
        (Value::Num(x), Value::Num(y)) => match stats.get(i) {
            FeatureStat::Numeric { range, .. } if *range > 0.0 => {
                ((x - y).abs() / range).clamp(0.0, 1.0)
            }
            _ => 0.0,
        },
        (Value::Cat(x), Value::Cat(y)) => {
            if x == y {
                0.0
            } else {
                1.0
            }
        }
        _ => panic!("mismatched value kinds for feature {i}: {a:?} vs {b:?}"),
    }
}

fn gower_sum(stats: &FeatureStats, x: &[Value], y: &[Value]) -> f64 {
    x.iter()
        .zip(y)
        .enumerate()
        .map(|(i, (&a, &b))| gower_dist(stats, a, b, i))
        .sum()
}

/// Distance to the point of interest: mean per-feature Gower distance.
pub fn obj_distance(x: &[Value], x_pt: &[Value], stats: &FeatureStats) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    gower_sum(stats, x, x_pt) / x.len() as f64
}

/// Number of features that differ from the point of interest (exact comparison).
pub fn obj_sparsity(x: &[Value], x_pt: &[Value]) -> usize {
    x.iter()
        .zip(x_pt)
        .filter(|(a, b)| match (a, b) {
            (Value::Num(a), Value::Num(b)) => a != b,
            (Value::Cat(a), Value::Cat(b)) => a != b,
            _ => true,
        })
        .count()
}

/// Mean Gower distance to the nearest training instance.
///
/// Scans every training row, abandoning a row once its partial sum exceeds
/// the best complete sum found so far.
pub fn obj_plausibility(x: &[Value], train: &Dataset, stats: &FeatureStats) -> Result<f64> {
    if train.is_empty() {
        return Err(Error::Config(
            "plausibility needs a non-empty training set".into(),
        ));
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    let mut best = f64::INFINITY;
    'rows: for t in &train.instances {
        let mut sum = 0.0;
        for (i, (&a, &b)) in x.iter().zip(&t.values).enumerate() {
            sum += gower_dist(stats, a, b, i);
            if sum > best {
                continue 'rows;
            }
        }
        best = best.min(sum);
        if best == 0.0 {
            break;
        }
    }
    Ok(best / x.len() as f64)
}
