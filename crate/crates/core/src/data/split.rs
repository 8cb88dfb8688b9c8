use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, Role};
use crate::error::{Error, Result};

/// How large the test partition is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TestCap {
    /// 500 rows when the dataset has more than 1,500 rows, else one third.
    Auto,
    Count(usize),
    Fraction(f64),
}

impl TestCap {
    pub const LARGE_DATASET_ROWS: usize = 1_500;
    pub const LARGE_DATASET_CAP: usize = 500;

    pub fn test_size(self, n: usize) -> Result<usize> {
        let size = match self {
            TestCap::Auto if n > Self::LARGE_DATASET_ROWS => Self::LARGE_DATASET_CAP,
            TestCap::Auto => n / 3,
            TestCap::Count(c) => c,
            TestCap::Fraction(f) => {
                if !(f > 0.0 && f < 1.0) {
                    return Err(Error::Config(format!("test fraction {f} not in (0, 1)")));
                }
                // Small slack so that e.g. 522 * (1/3) lands on 174 rather than 173.
                (f * n as f64 + 1e-9).floor() as usize
            }
        };
        if size >= n {
            return Err(Error::Config(format!(
                "test size {size} leaves no training rows out of {n}"
            )));
        }
        if size == 0 {
            return Err(Error::Config(format!("test size is zero for {n} rows")));
        }
        Ok(size)
    }
}

/// Seeded, unstratified shuffle split into `(train, test)`.
pub fn split_dataset(ds: &Dataset, cap: TestCap, seed: u64) -> Result<(Dataset, Dataset)> {
    if ds.is_empty() {
        return Err(Error::Config("cannot split an empty dataset".into()));
    }
    let n_test = cap.test_size(ds.len())?;
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (test_rows, train_rows) = order.split_at(n_test);
    Ok((
        ds.subset(train_rows, Role::Train),
        ds.subset(test_rows, Role::Test),
    ))
}
