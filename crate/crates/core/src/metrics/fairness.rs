use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exposure::{mean_pairs, BrowsingModel, GroupExposure, GroupProjection};
use crate::grouping::{EntityKind, GroupAssignment};
use crate::ingest::{RecommendationRun, SparseBinaryMatrix};

/// Floor applied to every ratio operand before taking logs.
pub const DEFAULT_SMOOTHING: f64 = 1e-10;

/// How zero operands in the ratio metrics are handled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    /// Operands are floored at this positive constant.
    Floor(f64),
    /// No flooring; zero operands give infinite (or NaN) logs.
    Strict,
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing::Floor(DEFAULT_SMOOTHING)
    }
}

impl Smoothing {
    fn apply(self, x: f64) -> f64 {
        match self {
            Smoothing::Floor(eps) => x.max(eps),
            Smoothing::Strict => x,
        }
    }
}

/// Test-set relevance of a user's bundles, or of the items inside them.
///
/// Bundle relevance is 1 for test bundles. An item's relevance is the sum of
/// `1 / |b|` over the user's test bundles `b` containing it.
#[derive(Debug, Clone, Copy)]
pub struct RelevanceModel<'a> {
    pub level: EntityKind,
    pub test: &'a SparseBinaryMatrix,
    pub bundle_item: &'a SparseBinaryMatrix,
}

impl RelevanceModel<'_> {
    /// Dense relevance vector of one user.
    pub fn user_relevance(&self, user: usize) -> Vec<f64> {
        match self.level {
            EntityKind::Bundle => {
                let mut out = vec![0.0; self.test.n_cols()];
                for &b in self.test.row(user) {
                    out[b as usize] = 1.0;
                }
                out
            }
            EntityKind::Item => {
                let mut out = vec![0.0; self.bundle_item.n_cols()];
                for &b in self.test.row(user) {
                    let items = self.bundle_item.row(b as usize);
                    for &i in items {
                        out[i as usize] += 1.0 / items.len() as f64;
                    }
                }
                out
            }
        }
    }
}

/// Relevance mass per group, summed over users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupUtility {
    pub plus: f64,
    pub minus: f64,
}

/// Expected clicks (exposure times relevance) per group, averaged over users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupCtr {
    pub plus: f64,
    pub minus: f64,
}

pub fn group_utility(test: &SparseBinaryMatrix, projection: &GroupProjection, users: &[usize]) -> Result<GroupUtility> {
    let per_user = users
        .par_iter()
        .map(|&u| {
            let mut acc = [0.0; 2];
            for &b in test.row(u) {
                let s = projection.share(b as usize)?;
                acc[0] += s[0];
                acc[1] += s[1];
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut plus, mut minus) = (0.0, 0.0);
    for [p, m] in per_user {
        plus += p;
        minus += m;
    }
    Ok(GroupUtility { plus, minus })
}

pub fn group_ctr(
    run: &RecommendationRun,
    test: &SparseBinaryMatrix,
    groups: &GroupAssignment,
    projection: &GroupProjection,
    model: &BrowsingModel,
    bundle_item: &SparseBinaryMatrix,
    users: &[usize],
) -> Result<GroupCtr> {
    if users.is_empty() {
        return Err(Error::Degenerate("no users left to aggregate over".into()));
    }
    let weights = model.weights(run.k());
    let per_user: Vec<[f64; 2]> = match projection.level() {
        EntityKind::Bundle => users
            .par_iter()
            .map(|&u| {
                let relevant = test.row(u);
                let mut acc = [0.0; 2];
                for (&b, &w) in run.list(u).iter().zip(&weights) {
                    if relevant.binary_search(&b).is_ok() {
                        let s = projection.share(b as usize)?;
                        acc[0] += w * s[0];
                        acc[1] += w * s[1];
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?,
        EntityKind::Item => users
            .par_iter()
            .map_init(
                || (vec![0.0f64; bundle_item.n_cols()], Vec::<u32>::new()),
                |(exposure, touched), &u| {
                    for (&b, &w) in run.list(u).iter().zip(&weights) {
                        let items = bundle_item.row(b as usize);
                        if items.is_empty() {
                            return Err(Error::EmptyBundle(b as usize));
                        }
                        let share = w / items.len() as f64;
                        for &i in items {
                            if exposure[i as usize] == 0.0 {
                                touched.push(i);
                            }
                            exposure[i as usize] += share;
                        }
                    }
                    let mut acc = [0.0; 2];
                    for &b in test.row(u) {
                        let items = bundle_item.row(b as usize);
                        let rel = 1.0 / items.len() as f64;
                        for &i in items {
                            let clicks = exposure[i as usize] * rel;
                            if groups.is_popular(i as usize) {
                                acc[0] += clicks;
                            } else {
                                acc[1] += clicks;
                            }
                        }
                    }
                    for i in touched.drain(..) {
                        exposure[i as usize] = 0.0;
                    }
                    Ok(acc)
                },
            )
            .collect::<Result<_>>()?,
    };
    let [plus, minus] = mean_pairs(&per_user);
    Ok(GroupCtr { plus, minus })
}

/// The six group-fairness scores of one run at one level.
///
/// Log metrics are natural logs and keep their sign: positive means G+ gets
/// more than its share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FairnessMetrics {
    #[serde(rename = "logEUR")]
    pub log_eur: f64,
    #[serde(rename = "logRUR")]
    pub log_rur: f64,
    #[serde(rename = "EEL")]
    pub eel: f64,
    #[serde(rename = "EER")]
    pub eer: f64,
    #[serde(rename = "EED")]
    pub eed: f64,
    #[serde(rename = "logDP")]
    pub log_dp: f64,
}

impl FairnessMetrics {
    pub const NAMES: [&'static str; 6] = ["logEUR", "logRUR", "EEL", "EER", "EED", "logDP"];

    pub fn values(&self) -> [f64; 6] {
        [self.log_eur, self.log_rur, self.eel, self.eer, self.eed, self.log_dp]
    }
}

/// Computes the six scores from normalized observed and target group
/// exposure, group utility and group click-through.
pub fn fairness_metrics(
    eps: &GroupExposure,
    target: &GroupExposure,
    util: &GroupUtility,
    ctr: &GroupCtr,
    smoothing: Smoothing,
) -> Result<FairnessMetrics> {
    if !eps.normalized || !target.normalized {
        return Err(Error::Config("fairness metrics need normalized group exposure".into()));
    }
    let s = |x: f64| smoothing.apply(x);
    let ratio_of_ratios = |a: f64, b: f64, c: f64, d: f64| (s(a) / s(b)) / (s(c) / s(d));

    let eur = ratio_of_ratios(eps.plus, util.plus, eps.minus, util.minus);
    let rur = ratio_of_ratios(ctr.plus, util.plus, ctr.minus, util.minus);
    let dp = s(eps.plus) / s(eps.minus);

    let (e, t) = (eps.as_array(), target.as_array());
    let eel = (e[0] - t[0]).powi(2) + (e[1] - t[1]).powi(2);
    let eer = 2.0 * (e[0] * t[0] + e[1] * t[1]);
    let eed = e[0] * e[0] + e[1] * e[1];

    Ok(FairnessMetrics {
        log_eur: eur.ln(),
        log_rur: rur.ln(),
        eel,
        eer,
        eed,
        log_dp: dp.ln(),
    })
}
