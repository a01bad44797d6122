use rayon::prelude::*;

use crate::ingest::{RecommendationRun, SparseBinaryMatrix};

fn hits<'a>(list: &'a [u32], relevant: &'a [u32], k: usize) -> impl Iterator<Item = usize> + 'a {
    list.iter()
        .take(k)
        .enumerate()
        .filter(|(_, b)| relevant.binary_search(b).is_ok())
        .map(|(pos, _)| pos)
}

fn mean(values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean share of each user's test bundles found in their top-`k`.
/// Users with empty test sets must already be filtered out of `users`.
pub fn recall_at_k(run: &RecommendationRun, test: &SparseBinaryMatrix, k: usize, users: &[usize]) -> f64 {
    let per_user = users
        .par_iter()
        .map(|&u| {
            let relevant = test.row(u);
            hits(run.list(u), relevant, k).count() as f64 / relevant.len() as f64
        })
        .collect();
    mean(per_user)
}

/// Mean NDCG@k with binary gains and a `1 / log2(position + 1)` discount.
pub fn ndcg_at_k(run: &RecommendationRun, test: &SparseBinaryMatrix, k: usize, users: &[usize]) -> f64 {
    let discount = |pos: usize| 1.0 / ((pos + 2) as f64).log2();
    let per_user = users
        .par_iter()
        .map(|&u| {
            let relevant = test.row(u);
            let dcg: f64 = hits(run.list(u), relevant, k).map(discount).sum();
            let idcg: f64 = (0..relevant.len().min(k)).map(discount).sum();
            dcg / idcg
        })
        .collect();
    mean(per_user)
}
