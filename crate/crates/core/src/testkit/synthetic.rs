use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{InteractionDataset, SparseBinaryMatrix};

/// Shape of a generated dataset.
///
/// Per-user interaction counts are drawn uniformly from
/// `[ceil(c / 2), c + c / 2]` around the configured mean `c`, capped by the
/// number of entities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_users: usize,
    pub n_bundles: usize,
    pub n_items: usize,
    pub bundle_size_mean: f64,
    /// Zipf exponent of bundle popularity; 0 is uniform.
    pub bundle_popularity_skew: f64,
    /// Zipf exponent of item popularity; 0 is uniform.
    pub item_popularity_skew: f64,
    pub interactions_per_user_ub: usize,
    pub interactions_per_user_ui: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_users: 200,
            n_bundles: 100,
            n_items: 400,
            bundle_size_mean: 8.0,
            bundle_popularity_skew: 1.0,
            item_popularity_skew: 1.0,
            interactions_per_user_ub: 6,
            interactions_per_user_ui: 10,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_users", self.n_users),
            ("n_bundles", self.n_bundles),
            ("n_items", self.n_items),
            ("interactions_per_user_ub", self.interactions_per_user_ub),
            ("interactions_per_user_ui", self.interactions_per_user_ui),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, c)| *c == 0) {
            return Err(Error::Config(format!("{name} must be at least 1")));
        }
        for (name, skew) in [
            ("bundle_popularity_skew", self.bundle_popularity_skew),
            ("item_popularity_skew", self.item_popularity_skew),
        ] {
            if !(skew.is_finite() && skew >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {skew}")));
            }
        }
        if self.bundle_size_mean.is_nan() || self.bundle_size_mean < 1.0 || self.bundle_size_mean > self.n_items as f64 {
            return Err(Error::Config(format!(
                "bundle_size_mean must be in [1, n_items = {}], got {}",
                self.n_items, self.bundle_size_mean
            )));
        }
        if self.interactions_per_user_ub > self.n_bundles {
            return Err(Error::Config("interactions_per_user_ub exceeds n_bundles".into()));
        }
        if self.interactions_per_user_ui > self.n_items {
            return Err(Error::Config("interactions_per_user_ui exceeds n_items".into()));
        }
        Ok(())
    }
}

/// Finite Zipf distribution over `0..n`, entity `k` weighted `(k + 1)^-s`,
/// sampled by inverse CDF.
#[derive(Debug, Clone)]
pub struct ZipfTable {
    cdf: Vec<f64>,
}

impl ZipfTable {
    pub fn new(n: usize, skew: f64) -> Self {
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        for k in 0..n {
            acc += ((k + 1) as f64).powf(-skew);
            cdf.push(acc);
        }
        Self { cdf }
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().expect("non-empty support");
        let u = rng.random::<f64>() * total;
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }

    /// `count` distinct draws, by rejection. If rejection stalls, the most
    /// probable unused entities fill the remainder.
    pub fn sample_distinct<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<u32> {
        let count = count.min(self.len());
        let mut seen = HashSet::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        let budget = 50 * count + 100;
        while out.len() < count && attempts < budget {
            attempts += 1;
            let k = self.sample(rng) as u32;
            if seen.insert(k) {
                out.push(k);
            }
        }
        let mut next = 0u32;
        while out.len() < count {
            if seen.insert(next) {
                out.push(next);
            }
            next += 1;
        }
        out
    }
}

fn user_count<R: Rng + ?Sized>(rng: &mut R, mean: usize, cap: usize) -> usize {
    let lo = mean.div_ceil(2).max(1);
    let hi = mean + mean / 2;
    rng.random_range(lo..=hi).min(cap)
}

/// Generates a dataset from a seeded ChaCha8 stream: bundle contents first,
/// then user-bundle, then user-item interactions.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<InteractionDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let items = ZipfTable::new(cfg.n_items, cfg.item_popularity_skew);
    let bundles = ZipfTable::new(cfg.n_bundles, cfg.bundle_popularity_skew);

    let size_dist = Normal::new(cfg.bundle_size_mean, (cfg.bundle_size_mean / 4.0).max(1.0))
        .map_err(|e| Error::Config(e.to_string()))?;
    let z_rows: Vec<Vec<u32>> = (0..cfg.n_bundles)
        .map(|_| {
            let size = (size_dist.sample(&mut rng).round().max(1.0) as usize).min(cfg.n_items);
            items.sample_distinct(&mut rng, size)
        })
        .collect();

    let x_rows: Vec<Vec<u32>> = (0..cfg.n_users)
        .map(|_| {
            let n = user_count(&mut rng, cfg.interactions_per_user_ub, cfg.n_bundles);
            bundles.sample_distinct(&mut rng, n)
        })
        .collect();

    let y_rows: Vec<Vec<u32>> = (0..cfg.n_users)
        .map(|_| {
            let n = user_count(&mut rng, cfg.interactions_per_user_ui, cfg.n_items);
            items.sample_distinct(&mut rng, n)
        })
        .collect();

    InteractionDataset::new(
        format!("synthetic-{}", cfg.seed),
        SparseBinaryMatrix::from_rows(cfg.n_bundles, x_rows)?,
        SparseBinaryMatrix::from_rows(cfg.n_items, y_rows)?,
        SparseBinaryMatrix::from_rows(cfg.n_items, z_rows)?,
    )
}
