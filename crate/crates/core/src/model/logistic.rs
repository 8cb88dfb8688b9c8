use serde::{Deserialize, Serialize};

use super::{require_two_classes, Classifier, Encoder};
use crate::data::{Dataset, Value};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub epochs: usize,
    /// L2 penalty on the weights (the intercept is not penalized).
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            learning_rate: 0.5,
            epochs: 500,
            l2: 1e-4,
        }
    }
}

impl LogisticParams {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate.is_nan()
            || self.learning_rate <= 0.0
            || self.epochs == 0
            || self.l2.is_nan()
            || self.l2 < 0.0
        {
            return Err(Error::Config(format!(
                "invalid logistic parameters {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    encoder: Encoder,
    weights: Vec<f64>,
    intercept: f64,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticModel {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    fn score(&self, encoded: &[f64]) -> f64 {
        self.intercept
            + self
                .weights
                .iter()
                .zip(encoded)
                .map(|(w, x)| w * x)
                .sum::<f64>()
    }
}

impl Classifier for LogisticModel {
    fn predict_proba(&self, x: &[Value]) -> f64 {
        sigmoid(self.score(&self.encoder.encode(x)))
    }
}

/// Full-batch gradient descent on the regularized log-loss. Starts from zero
/// weights, so the result does not depend on the seed.
pub fn train_logistic(
    train: &Dataset,
    params: &LogisticParams,
    _seed: u64,
) -> Result<LogisticModel> {
    params.validate()?;
    require_two_classes(train)?;
    let encoder = Encoder::fit(train)?;
    let xs: Vec<Vec<f64>> = train
        .instances
        .iter()
        .map(|i| encoder.encode(&i.values))
        .collect();
    let ys: Vec<f64> = train
        .labels()
        .map(|c| if c.is_positive() { 1.0 } else { 0.0 })
        .collect();

    let mut model = LogisticModel {
        weights: vec![0.0; encoder.width()],
        intercept: 0.0,
        encoder,
    };
    let n = xs.len() as f64;
    let mut grad = vec![0.0; model.weights.len()];
    for _ in 0..params.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            let err = sigmoid(model.score(x)) - y;
            grad_b += err;
            for (g, xi) in grad.iter_mut().zip(x) {
                *g += err * xi;
            }
        }
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= params.learning_rate * (g / n + params.l2 * *w);
        }
        model.intercept -= params.learning_rate * grad_b / n;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Class, FeatureSchema, Instance, Role, Schema};
    use crate::model::accuracy;

    fn one_d(points: &[(f64, Class)]) -> Dataset {
        let schema = Schema::new(vec![FeatureSchema::continuous("x")]).unwrap();
        let instances = points
            .iter()
            .map(|&(x, c)| Instance::new(vec![Value::Num(x)], Some(c)))
            .collect();
        Dataset::new(schema, instances, Role::Train).unwrap()
    }

    #[test]
    fn separates_two_points() {
        let ds = one_d(&[(0.0, Class::Negative), (1.0, Class::Positive)]);
        let m = train_logistic(&ds, &LogisticParams::default(), 0).unwrap();
        assert_eq!(accuracy(&m, &ds), 1.0);
    }

    #[test]
    fn constant_features_learn_base_rate() {
        let mut pts = vec![(5.0, Class::Positive); 3];
        pts.extend(vec![(5.0, Class::Negative); 7]);
        let ds = one_d(&pts);
        let m = train_logistic(&ds, &LogisticParams::default(), 0).unwrap();
        let p = m.predict_proba(&[Value::Num(5.0)]);
        assert!((p - 0.3).abs() <= 0.05, "p = {p}");
    }

    #[test]
    fn single_class_is_an_error() {
        let ds = one_d(&[(0.0, Class::Positive), (1.0, Class::Positive)]);
        assert!(matches!(
            train_logistic(&ds, &LogisticParams::default(), 0),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn sigmoid_is_bounded() {
        for z in [-1e6, -40.0, -1.0, 0.0, 1.0, 40.0, 1e6] {
            let s = sigmoid(z);
            assert!((0.0..=1.0).contains(&s));
        }
    }
}
