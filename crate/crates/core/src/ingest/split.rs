use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SparseBinaryMatrix;
use crate::error::{Error, Result};

/// Fractions of each user's bundle interactions assigned to train/valid/test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.7,
            valid: 0.1,
            test: 0.2,
        }
    }
}

impl SplitRatios {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.valid, self.test];
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Config(format!("split fractions must be >= 0, got {parts:?}")));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split fractions must sum to 1, got {parts:?}")));
        }
        Ok(())
    }

    /// `(train, valid, test)` sizes for a user with `n` interactions.
    ///
    /// Users with fewer than three interactions keep everything in train.
    /// Otherwise test gets `floor(n * test)` (at least one when the test
    /// fraction is positive), valid gets `floor(n * valid)` and train the rest.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        if n < 3 {
            return (n, 0, 0);
        }
        // absorbs products like 0.1 * 30 landing a hair under an integer
        const SLACK: f64 = 1e-9;
        let floor = |f: f64| ((n as f64) * f + SLACK).floor() as usize;
        let mut test = floor(self.test).min(n);
        if self.test > 0.0 {
            test = test.max(1);
        }
        let valid = floor(self.valid).min(n - test);
        (n - test - valid, valid, test)
    }
}

/// Per-user train/valid/test partition of the user-bundle matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitDataset {
    pub train: SparseBinaryMatrix,
    pub valid: SparseBinaryMatrix,
    pub test: SparseBinaryMatrix,
    /// `None` when the split was read from disk.
    pub seed: Option<u64>,
}

/// Shuffles every user's interactions with a seeded ChaCha8 stream (users in
/// id order) and cuts them according to [`SplitRatios::sizes`].
pub fn split_user_bundle(x: &SparseBinaryMatrix, ratios: SplitRatios, seed: u64) -> Result<SplitDataset> {
    ratios.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_users = x.n_rows();
    let mut train = Vec::with_capacity(n_users);
    let mut valid = Vec::with_capacity(n_users);
    let mut test = Vec::with_capacity(n_users);
    for u in 0..n_users {
        let mut row = x.row(u).to_vec();
        row.shuffle(&mut rng);
        let (_, n_valid, n_test) = ratios.sizes(row.len());
        let rest = row.split_off(n_test);
        test.push(row);
        let mut rest = rest;
        let train_part = rest.split_off(n_valid);
        valid.push(rest);
        train.push(train_part);
    }
    let n_bundles = x.n_cols();
    Ok(SplitDataset {
        train: SparseBinaryMatrix::from_rows(n_bundles, train)?,
        valid: SparseBinaryMatrix::from_rows(n_bundles, valid)?,
        test: SparseBinaryMatrix::from_rows(n_bundles, test)?,
        seed: Some(seed),
    })
}
