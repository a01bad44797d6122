use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{RecommendationRun, SparseBinaryMatrix};

/// Every user gets the most frequent training bundles (ties by id), minus the
/// bundles they already interacted with.
pub fn most_popular_recommender(train: &SparseBinaryMatrix, k: usize) -> Result<RecommendationRun> {
    let n_bundles = train.n_cols();
    if k == 0 || k > n_bundles {
        return Err(Error::Config(format!("K = {k} must be in 1..={n_bundles}")));
    }
    let freq = train.col_counts();
    let mut order: Vec<u32> = (0..n_bundles as u32).collect();
    order.sort_by(|&a, &b| freq[b as usize].cmp(&freq[a as usize]).then(a.cmp(&b)));
    let lists = (0..train.n_rows())
        .into_par_iter()
        .map(|u| {
            let seen = train.row(u);
            order
                .iter()
                .copied()
                .filter(|b| seen.binary_search(b).is_err())
                .take(k)
                .collect()
        })
        .collect();
    RecommendationRun::new(k, n_bundles, lists)
}

/// Uniform sample of `k` unseen bundles per user, in sampled order. User `u`
/// draws from ChaCha8 stream `u` of `seed`.
pub fn random_recommender(n_bundles: usize, k: usize, seed: u64, train: &SparseBinaryMatrix) -> Result<RecommendationRun> {
    if train.n_cols() != n_bundles {
        return Err(Error::DimensionMismatch(format!(
            "training matrix has {} bundles, expected {n_bundles}",
            train.n_cols()
        )));
    }
    let lists = (0..train.n_rows())
        .into_par_iter()
        .map(|u| {
            let seen = train.row(u);
            let unseen = n_bundles - seen.len();
            if k > unseen {
                return Err(Error::Config(format!(
                    "user {u} has only {unseen} unseen bundles, cannot sample K = {k}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u as u64);
            if 2 * (k + seen.len()) <= n_bundles {
                // rejection keeps each accepted draw uniform over what is left
                let mut list: Vec<u32> = Vec::with_capacity(k);
                while list.len() < k {
                    let b = rng.random_range(0..n_bundles as u32);
                    if seen.binary_search(&b).is_err() && !list.contains(&b) {
                        list.push(b);
                    }
                }
                return Ok(list);
            }
            let available: Vec<u32> = (0..n_bundles as u32).filter(|b| seen.binary_search(b).is_err()).collect();
            Ok(rand::seq::index::sample(&mut rng, available.len(), k)
                .into_iter()
                .map(|i| available[i])
                .collect())
        })
        .collect::<Result<Vec<Vec<u32>>>>()?;
    RecommendationRun::new(k, n_bundles, lists)
}

/// Scores each bundle by the fraction of its items the user interacted with,
/// ranks by score (ties by id) and drops training bundles.
pub fn item_affinity_recommender(
    train: &SparseBinaryMatrix,
    user_item: &SparseBinaryMatrix,
    bundle_item: &SparseBinaryMatrix,
    k: usize,
) -> Result<RecommendationRun> {
    let n_bundles = train.n_cols();
    if user_item.n_rows() != train.n_rows() || bundle_item.n_rows() != n_bundles || bundle_item.n_cols() != user_item.n_cols() {
        return Err(Error::DimensionMismatch("train, user-item and bundle-item shapes disagree".into()));
    }
    if k == 0 {
        return Err(Error::Config("K must be at least 1".into()));
    }
    let item_bundles = bundle_item.transpose();
    let lists = (0..train.n_rows())
        .into_par_iter()
        .map_init(
            || vec![0u32; n_bundles],
            |hits, u| {
                let mut touched = Vec::new();
                for &i in user_item.row(u) {
                    for &b in item_bundles.row(i as usize) {
                        if hits[b as usize] == 0 {
                            touched.push(b);
                        }
                        hits[b as usize] += 1;
                    }
                }
                let seen = train.row(u);
                let mut scored: Vec<(f64, u32)> = touched
                    .iter()
                    .filter(|b| seen.binary_search(b).is_err())
                    .map(|&b| (hits[b as usize] as f64 / bundle_item.row_len(b as usize) as f64, b))
                    .collect();
                for &b in &touched {
                    hits[b as usize] = 0;
                }
                scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                let mut list: Vec<u32> = scored.into_iter().take(k).map(|(_, b)| b).collect();
                if list.len() < k {
                    // zero-score bundles, by id
                    touched.sort_unstable();
                    let backfill = (0..n_bundles as u32)
                        .filter(|b| seen.binary_search(b).is_err() && touched.binary_search(b).is_err())
                        .take(k - list.len());
                    list.extend(backfill);
                }
                list
            },
        )
        .collect();
    RecommendationRun::new(k, n_bundles, lists)
}
