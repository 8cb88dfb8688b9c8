//! Fixtures shared by the benchmarks.

use lexcf_core::bench::sample_points_of_interest;
use lexcf_core::data::{
    compute_feature_stats, generate_synthetic, split_dataset, SyntheticSpec, TestCap,
};
use lexcf_core::ea::EaContext;
use lexcf_core::model::{train, ForestParams, LearnerConfig};
use lexcf_core::{Dataset, FeatureStats, Model, ObjectiveVector, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` random objective vectors with o1 in [0, 0.5], o2 and o4 in [0, 1]
/// and o3 in 0..=8.
pub fn random_objectives(n: usize, seed: u64) -> Vec<ObjectiveVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            ObjectiveVector::new(
                rng.random_range(0.0..=0.5),
                rng.random(),
                rng.random_range(0..=8),
                rng.random(),
            )
        })
        .collect()
}

/// Synthetic 8-feature data, a random forest and a few negative points of interest.
pub struct Fixture {
    pub train: Dataset,
    pub test: Dataset,
    pub stats: FeatureStats,
    pub model: Model,
    pub pois: Vec<Vec<Value>>,
}

impl Fixture {
    pub fn synthetic(n: usize, ntree: usize, seed: u64) -> Fixture {
        let spec = SyntheticSpec {
            non_actionable: 1,
            ..SyntheticSpec::numeric(8, n, seed)
        };
        let ds = generate_synthetic(&spec).expect("valid spec");
        let (train_set, test) = split_dataset(&ds, TestCap::Auto, seed).expect("splittable");
        let stats = compute_feature_stats(&train_set).expect("non-empty train");
        let params = ForestParams {
            ntree,
            ..ForestParams::default()
        };
        let model =
            train(&train_set, &LearnerConfig::random_forest(params, seed)).expect("trainable");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pois = sample_points_of_interest(&model, &test, 8, &mut rng)
            .into_iter()
            .map(|p| p.values)
            .collect();
        Fixture {
            train: train_set,
            test,
            stats,
            model,
            pois,
        }
    }

    pub fn context(&self, poi: usize) -> EaContext<'_> {
        EaContext {
            x_pt: &self.pois[poi],
            model: &self.model,
            train: &self.train,
            stats: &self.stats,
        }
    }
}
