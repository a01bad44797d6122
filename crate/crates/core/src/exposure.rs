//! Position-based exposure of ranked bundle lists, at the bundle level, at
//! the item level (each bundle's exposure split evenly over its items), and
//! aggregated to the G+/G- groups.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grouping::{EntityKind, GroupAssignment};
use crate::ingest::{RecommendationRun, SparseBinaryMatrix};
use crate::report::fmt_f64;

/// Geometric browsing model: the user stops after each rank with probability
/// `gamma`, so rank `k` is examined with weight `gamma * (1 - gamma)^(k - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrowsingModel {
    gamma: f64,
}

impl Default for BrowsingModel {
    fn default() -> Self {
        Self { gamma: 0.5 }
    }
}

impl BrowsingModel {
    pub fn geometric(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Config(format!("patience gamma must be in (0, 1), got {gamma}")));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weight(&self, rank: usize) -> Result<f64> {
        if rank == 0 {
            return Err(Error::Config("ranks start at 1".into()));
        }
        Ok(self.gamma * (1.0 - self.gamma).powi(rank as i32 - 1))
    }

    /// Weights for ranks `1..=k`.
    pub fn weights(&self, k: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(k);
        let mut w = self.gamma;
        for _ in 0..k {
            out.push(w);
            w *= 1.0 - self.gamma;
        }
        out
    }
}

/// Per-entity exposure of a single list or of a whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureVector {
    pub level: EntityKind,
    pub values: Vec<f64>,
}

impl ExposureVector {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// CSV with header `entity_id,exposure`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "entity_id,exposure")?;
        for (e, v) in self.values.iter().enumerate() {
            writeln!(out, "{e},{}", fmt_f64(*v))?;
        }
        Ok(())
    }
}

pub fn position_exposure(model: &BrowsingModel, rank: usize) -> Result<f64> {
    model.weight(rank)
}

/// Bundle exposure of one list; bundles outside the list get zero.
pub fn bundle_exposure(list: &[u32], model: &BrowsingModel, n_bundles: usize) -> ExposureVector {
    let mut values = vec![0.0; n_bundles];
    for (&b, w) in list.iter().zip(model.weights(list.len())) {
        values[b as usize] = w;
    }
    ExposureVector {
        level: EntityKind::Bundle,
        values,
    }
}

/// Item exposure of one list: every item of a listed bundle receives the
/// bundle's exposure divided by the bundle size, summed over listed bundles.
pub fn item_exposure(list: &[u32], bundle_item: &SparseBinaryMatrix, model: &BrowsingModel) -> Result<ExposureVector> {
    let mut values = vec![0.0; bundle_item.n_cols()];
    for (&b, w) in list.iter().zip(model.weights(list.len())) {
        let items = bundle_item.row(b as usize);
        if items.is_empty() {
            return Err(Error::EmptyBundle(b as usize));
        }
        let share = w / items.len() as f64;
        for &i in items {
            values[i as usize] += share;
        }
    }
    Ok(ExposureVector {
        level: EntityKind::Item,
        values,
    })
}

/// Exposure (or any other mass) of the two popularity groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupExposure {
    pub plus: f64,
    pub minus: f64,
    pub normalized: bool,
}

/// Target exposure has the same shape as observed group exposure.
pub type TargetGroupExposure = GroupExposure;

impl GroupExposure {
    pub fn raw(plus: f64, minus: f64) -> Self {
        Self {
            plus,
            minus,
            normalized: false,
        }
    }

    pub fn total(&self) -> f64 {
        self.plus + self.minus
    }

    /// Rescales to a probability vector over the two groups.
    pub fn normalize(&self) -> Result<Self> {
        let total = self.total();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::Degenerate("group exposure is zero; cannot normalize".into()));
        }
        Ok(Self {
            plus: self.plus / total,
            minus: self.minus / total,
            normalized: true,
        })
    }

    pub fn swapped(&self) -> Self {
        Self {
            plus: self.minus,
            minus: self.plus,
            ..*self
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.plus, self.minus]
    }
}

/// Unnormalized group exposure of a per-entity vector.
pub fn group_exposure(a: &ExposureVector, groups: &GroupAssignment) -> Result<GroupExposure> {
    if a.level != groups.kind || a.values.len() != groups.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} exposure over {} entities vs {} groups over {}",
            a.level,
            a.values.len(),
            groups.kind,
            groups.len()
        )));
    }
    let mut out = GroupExposure::raw(0.0, 0.0);
    for (e, v) in a.values.iter().enumerate() {
        if groups.is_popular(e) {
            out.plus += v;
        } else {
            out.minus += v;
        }
    }
    Ok(out)
}

/// Per-bundle fraction of the bundle's mass that lands in each group.
///
/// At the bundle level this is `[1, 0]` or `[0, 1]`. At the item level it is
/// the fraction of the bundle's items in G+ and G-; bundles without items map
/// to `None`.
#[derive(Debug, Clone)]
pub struct GroupProjection {
    level: EntityKind,
    shares: Vec<Option<[f64; 2]>>,
    total: [f64; 2],
}

impl GroupProjection {
    pub fn new(level: EntityKind, groups: &GroupAssignment, bundle_item: &SparseBinaryMatrix) -> Result<Self> {
        if groups.kind != level {
            return Err(Error::DimensionMismatch(format!("{} groups used at the {level} level", groups.kind)));
        }
        let shares: Vec<Option<[f64; 2]>> = match level {
            EntityKind::Bundle => {
                if groups.len() != bundle_item.n_rows() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} bundle groups for {} bundles",
                        groups.len(),
                        bundle_item.n_rows()
                    )));
                }
                (0..groups.len())
                    .map(|b| Some(if groups.is_popular(b) { [1.0, 0.0] } else { [0.0, 1.0] }))
                    .collect()
            }
            EntityKind::Item => {
                if groups.len() != bundle_item.n_cols() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} item groups for {} items",
                        groups.len(),
                        bundle_item.n_cols()
                    )));
                }
                (0..bundle_item.n_rows())
                    .map(|b| {
                        let items = bundle_item.row(b);
                        if items.is_empty() {
                            return None;
                        }
                        let plus = items.iter().filter(|&&i| groups.is_popular(i as usize)).count();
                        let size = items.len() as f64;
                        Some([plus as f64 / size, (items.len() - plus) as f64 / size])
                    })
                    .collect()
            }
        };
        let mut total = [0.0; 2];
        for s in shares.iter().flatten() {
            total[0] += s[0];
            total[1] += s[1];
        }
        Ok(Self { level, shares, total })
    }

    pub fn level(&self) -> EntityKind {
        self.level
    }

    pub fn n_bundles(&self) -> usize {
        self.shares.len()
    }

    pub fn share(&self, bundle: usize) -> Result<[f64; 2]> {
        self.shares[bundle].ok_or(Error::EmptyBundle(bundle))
    }

    /// Sum of shares over every bundle.
    pub fn total(&self) -> [f64; 2] {
        self.total
    }

    /// Unnormalized group exposure of one ranked list.
    pub fn list_exposure(&self, list: &[u32], weights: &[f64]) -> Result<[f64; 2]> {
        let mut out = [0.0; 2];
        for (&b, &w) in list.iter().zip(weights) {
            let s = self.share(b as usize)?;
            out[0] += w * s[0];
            out[1] += w * s[1];
        }
        Ok(out)
    }
}

/// Sums per-user pairs in user order and divides by the user count.
pub(crate) fn mean_pairs(per_user: &[[f64; 2]]) -> [f64; 2] {
    let mut sum = [0.0; 2];
    for p in per_user {
        sum[0] += p[0];
        sum[1] += p[1];
    }
    let n = per_user.len() as f64;
    [sum[0] / n, sum[1] / n]
}

fn require_users(users: &[usize]) -> Result<()> {
    if users.is_empty() {
        return Err(Error::Degenerate("no users left to aggregate over".into()));
    }
    Ok(())
}

/// Mean group exposure over `users`, one list each, normalized to sum to one.
pub fn expected_group_exposure(
    run: &RecommendationRun,
    projection: &GroupProjection,
    model: &BrowsingModel,
    users: &[usize],
) -> Result<GroupExposure> {
    require_users(users)?;
    let weights = model.weights(run.k());
    let per_user = users
        .par_iter()
        .map(|&u| projection.list_exposure(run.list(u), &weights))
        .collect::<Result<Vec<_>>>()?;
    let [plus, minus] = mean_pairs(&per_user);
    GroupExposure::raw(plus, minus).normalize()
}

/// Exposure an ideal policy gives one relevant and one non-relevant bundle of
/// a user with `m` relevant bundles out of `n`, at cutoff `k`.
///
/// Relevant bundles share the top `min(m, k)` positions uniformly; the
/// non-relevant ones share the remaining positions up to `min(k, n)`.
pub fn ideal_bundle_targets(model: &BrowsingModel, m: usize, n: usize, k: usize) -> (f64, f64) {
    let depth = k.min(n);
    let weights = model.weights(depth);
    let top = m.min(depth);
    let relevant = if m == 0 { 0.0 } else { weights[..top].iter().sum::<f64>() / m as f64 };
    let non_relevant = if m < depth && n > m {
        weights[m..].iter().sum::<f64>() / (n - m) as f64
    } else {
        0.0
    };
    (relevant, non_relevant)
}

/// Unnormalized target group exposure of one user.
pub(crate) fn user_target(
    relevant: &[u32],
    projection: &GroupProjection,
    model: &BrowsingModel,
    k: usize,
) -> Result<[f64; 2]> {
    let n = projection.n_bundles();
    let (t_rel, t_non) = ideal_bundle_targets(model, relevant.len(), n, k);
    let mut rel = [0.0; 2];
    for &b in relevant {
        let s = projection.share(b as usize)?;
        rel[0] += s[0];
        rel[1] += s[1];
    }
    let total = projection.total();
    Ok([
        t_rel * rel[0] + t_non * (total[0] - rel[0]),
        t_rel * rel[1] + t_non * (total[1] - rel[1]),
    ])
}

/// Target counterpart of [`expected_group_exposure`], built from each user's
/// test bundles under the ideal policy of [`ideal_bundle_targets`].
pub fn target_group_exposure(
    test: &SparseBinaryMatrix,
    projection: &GroupProjection,
    model: &BrowsingModel,
    k: usize,
    users: &[usize],
) -> Result<TargetGroupExposure> {
    require_users(users)?;
    let per_user = users
        .par_iter()
        .map(|&u| user_target(test.row(u), projection, model, k))
        .collect::<Result<Vec<_>>>()?;
    let [plus, minus] = mean_pairs(&per_user);
    GroupExposure::raw(plus, minus).normalize()
}

/// Exposure per entity summed over the lists of `users`.
pub fn aggregate_exposure(
    run: &RecommendationRun,
    model: &BrowsingModel,
    level: EntityKind,
    bundle_item: &SparseBinaryMatrix,
    users: &[usize],
) -> Result<ExposureVector> {
    let weights = model.weights(run.k());
    let n = match level {
        EntityKind::Bundle => bundle_item.n_rows(),
        EntityKind::Item => bundle_item.n_cols(),
    };
    let mut values = vec![0.0; n];
    for &u in users {
        for (&b, &w) in run.list(u).iter().zip(&weights) {
            match level {
                EntityKind::Bundle => values[b as usize] += w,
                EntityKind::Item => {
                    let items = bundle_item.row(b as usize);
                    if items.is_empty() {
                        return Err(Error::EmptyBundle(b as usize));
                    }
                    let share = w / items.len() as f64;
                    for &i in items {
                        values[i as usize] += share;
                    }
                }
            }
        }
    }
    Ok(ExposureVector { level, values })
}
