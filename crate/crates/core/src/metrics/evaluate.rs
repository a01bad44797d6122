use std::io::Write;

use serde_json::{json, Map, Value};

use super::fairness::{fairness_metrics, group_ctr, group_utility, FairnessMetrics, GroupCtr, GroupUtility, Smoothing};
use super::gini::{gini_counts, gini_index};
use super::utility::{ndcg_at_k, recall_at_k};
use crate::error::{Error, Result};
use crate::exposure::{aggregate_exposure, expected_group_exposure, target_group_exposure, BrowsingModel, GroupExposure, GroupProjection};
use crate::grouping::{bundle_frequency, item_frequency, EntityKind, GroupAssignment, UserGroup, UserTendencyAssignment};
use crate::ingest::{InteractionDataset, RecommendationRun, SplitDataset};
use crate::report::{fmt_f64, json_f64};

/// Which entity levels to report fairness for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Levels {
    pub bundle: bool,
    pub item: bool,
}

impl Default for Levels {
    fn default() -> Self {
        Self { bundle: true, item: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub k: usize,
    pub model: BrowsingModel,
    pub smoothing: Smoothing,
    pub levels: Levels,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            k: 20,
            model: BrowsingModel::default(),
            smoothing: Smoothing::default(),
            levels: Levels::default(),
        }
    }
}

/// Fairness of one user population at one entity level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: EntityKind,
    pub group_hash: String,
    pub exposure: GroupExposure,
    pub target: GroupExposure,
    pub utility: GroupUtility,
    pub ctr: GroupCtr,
    pub metrics: FairnessMetrics,
}

/// Utility and fairness for one user population.
#[derive(Debug, Clone, PartialEq)]
pub struct ScopeReport {
    pub n_users: usize,
    pub recall: f64,
    pub ndcg: f64,
    pub bundle: Option<LevelReport>,
    pub item: Option<LevelReport>,
}

/// Gini indices of training interaction frequency and of the run's exposure.
/// `None` where the distribution is degenerate (all zero or a single entity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiniReport {
    pub bundle_interactions: Option<f64>,
    pub bundle_run: Option<f64>,
    pub item_interactions: Option<f64>,
    pub item_run: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportMetadata {
    pub dataset: String,
    pub n_users: usize,
    pub n_bundles: usize,
    pub n_items: usize,
    pub k: usize,
    pub gamma: f64,
    pub smoothing: Smoothing,
    pub included_users: usize,
    pub excluded_users: usize,
    pub bundle_group_hash: String,
    pub item_group_hash: String,
    pub n_popular_bundles: usize,
    pub n_popular_items: usize,
    pub popularity_share: Option<f64>,
    pub tendency_lo: f64,
    pub tendency_hi: f64,
    pub tendency_group_sizes: [usize; 3],
    pub split_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub metadata: ReportMetadata,
    pub overall: ScopeReport,
    /// g1, g2, g3 in order; `None` when the group has no evaluable users.
    pub by_tendency: Vec<(UserGroup, Option<ScopeReport>)>,
    pub gini: GiniReport,
}

struct Inputs<'a> {
    run: &'a RecommendationRun,
    dataset: &'a InteractionDataset,
    splits: &'a SplitDataset,
    bundle_groups: &'a GroupAssignment,
    item_groups: &'a GroupAssignment,
    bundle_projection: GroupProjection,
    item_projection: GroupProjection,
    config: EvalConfig,
}

impl Inputs<'_> {
    fn level(&self, level: EntityKind, users: &[usize]) -> Result<LevelReport> {
        let (groups, projection) = match level {
            EntityKind::Bundle => (self.bundle_groups, &self.bundle_projection),
            EntityKind::Item => (self.item_groups, &self.item_projection),
        };
        let model = &self.config.model;
        let test = &self.splits.test;
        let exposure = expected_group_exposure(self.run, projection, model, users)?;
        let target = target_group_exposure(test, projection, model, self.config.k, users)?;
        let utility = group_utility(test, projection, users)?;
        let ctr = group_ctr(self.run, test, groups, projection, model, &self.dataset.bundle_item, users)?;
        let metrics = fairness_metrics(&exposure, &target, &utility, &ctr, self.config.smoothing)?;
        Ok(LevelReport {
            level,
            group_hash: groups.config_hash(),
            exposure,
            target,
            utility,
            ctr,
            metrics,
        })
    }

    fn scope(&self, users: &[usize]) -> Result<ScopeReport> {
        let test = &self.splits.test;
        let k = self.config.k;
        Ok(ScopeReport {
            n_users: users.len(),
            recall: recall_at_k(self.run, test, k, users),
            ndcg: ndcg_at_k(self.run, test, k, users),
            bundle: self.config.levels.bundle.then(|| self.level(EntityKind::Bundle, users)).transpose()?,
            item: self.config.levels.item.then(|| self.level(EntityKind::Item, users)).transpose()?,
        })
    }
}

/// Runs the full audit: utility and fairness over all evaluable users and
/// within each tendency group, plus Gini diagnostics.
///
/// Users without test interactions are left out of every aggregate. Tendency
/// groups keep the global G+/G- partitions and recompute both observed and
/// target exposure over their own users.
pub fn evaluate(
    run: &RecommendationRun,
    dataset: &InteractionDataset,
    splits: &SplitDataset,
    bundle_groups: &GroupAssignment,
    item_groups: &GroupAssignment,
    tendency: &UserTendencyAssignment,
    config: &EvalConfig,
) -> Result<AuditReport> {
    let n_users = dataset.n_users();
    if run.n_users() != n_users || run.n_bundles() != dataset.n_bundles() {
        return Err(Error::DimensionMismatch(format!(
            "run covers {} users and {} bundles, dataset has {} and {}",
            run.n_users(),
            run.n_bundles(),
            n_users,
            dataset.n_bundles()
        )));
    }
    if splits.test.n_rows() != n_users || splits.test.n_cols() != dataset.n_bundles() {
        return Err(Error::DimensionMismatch("test split does not match the dataset".into()));
    }
    if tendency.groups.len() != n_users {
        return Err(Error::DimensionMismatch(format!(
            "{} tendency labels for {n_users} users",
            tendency.groups.len()
        )));
    }
    if run.k() > config.k {
        return Err(Error::Config(format!("run was built for K = {} but the audit uses K = {}", run.k(), config.k)));
    }

    let inputs = Inputs {
        run,
        dataset,
        splits,
        bundle_groups,
        item_groups,
        bundle_projection: GroupProjection::new(EntityKind::Bundle, bundle_groups, &dataset.bundle_item)?,
        item_projection: GroupProjection::new(EntityKind::Item, item_groups, &dataset.bundle_item)?,
        config: *config,
    };

    let included: Vec<usize> = (0..n_users).filter(|&u| splits.test.row_len(u) > 0).collect();
    if included.is_empty() {
        return Err(Error::Degenerate("no user has test interactions".into()));
    }
    let overall = inputs.scope(&included)?;

    let by_tendency = UserGroup::ALL
        .iter()
        .map(|&g| {
            let users: Vec<usize> = included.iter().copied().filter(|&u| tendency.groups[u] == g).collect();
            // a group whose lists carry no exposure has no defined fairness
            let scope = match inputs.scope(&users) {
                Ok(scope) => Some(scope),
                Err(Error::Degenerate(_)) => None,
                Err(e) => return Err(e),
            };
            Ok((g, scope))
        })
        .collect::<Result<Vec<_>>>()?;

    let item_freq = item_frequency(&splits.train, &dataset.bundle_item, &dataset.user_item)?;
    let bundle_run = aggregate_exposure(run, &config.model, EntityKind::Bundle, &dataset.bundle_item, &included)?;
    let item_run = aggregate_exposure(run, &config.model, EntityKind::Item, &dataset.bundle_item, &included)?;
    let gini = GiniReport {
        bundle_interactions: gini_counts(&bundle_frequency(&splits.train)).ok(),
        bundle_run: gini_index(&bundle_run.values).ok(),
        item_interactions: gini_counts(&item_freq.raw).ok(),
        item_run: gini_index(&item_run.values).ok(),
    };

    let metadata = ReportMetadata {
        dataset: dataset.name.clone(),
        n_users,
        n_bundles: dataset.n_bundles(),
        n_items: dataset.n_items(),
        k: config.k,
        gamma: config.model.gamma(),
        smoothing: config.smoothing,
        included_users: included.len(),
        excluded_users: n_users - included.len(),
        bundle_group_hash: bundle_groups.config_hash(),
        item_group_hash: item_groups.config_hash(),
        n_popular_bundles: bundle_groups.n_popular(),
        n_popular_items: item_groups.n_popular(),
        popularity_share: bundle_groups.share,
        tendency_lo: tendency.lo,
        tendency_hi: tendency.hi,
        tendency_group_sizes: tendency.group_sizes(),
        split_seed: splits.seed,
    };

    Ok(AuditReport {
        metadata,
        overall,
        by_tendency,
        gini,
    })
}

fn opt_f64(x: Option<f64>) -> Value {
    x.map_or(Value::Null, json_f64)
}

fn pair_json(plus: f64, minus: f64) -> Value {
    json!({ "plus": json_f64(plus), "minus": json_f64(minus) })
}

impl LevelReport {
    fn to_json(&self) -> Value {
        let mut metrics = Map::new();
        for (name, v) in FairnessMetrics::NAMES.iter().zip(self.metrics.values()) {
            metrics.insert(name.to_string(), json_f64(v));
        }
        json!({
            "level": self.level.to_string(),
            "group_hash": self.group_hash,
            "metrics": metrics,
            "expected_exposure": pair_json(self.exposure.plus, self.exposure.minus),
            "target_exposure": pair_json(self.target.plus, self.target.minus),
            "utility": pair_json(self.utility.plus, self.utility.minus),
            "ctr": pair_json(self.ctr.plus, self.ctr.minus),
        })
    }
}

impl ScopeReport {
    fn to_json(&self, k: usize) -> Value {
        json!({
            "n_users": self.n_users,
            "utility": {
                format!("recall@{k}"): json_f64(self.recall),
                format!("ndcg@{k}"): json_f64(self.ndcg),
            },
            "bundle": self.bundle.as_ref().map_or(Value::Null, LevelReport::to_json),
            "item": self.item.as_ref().map_or(Value::Null, LevelReport::to_json),
        })
    }

    fn csv_rows(&self, scope: &str, k: usize, rows: &mut Vec<(String, String, String, f64)>) {
        rows.push((scope.into(), "bundle".into(), format!("recall@{k}"), self.recall));
        rows.push((scope.into(), "bundle".into(), format!("ndcg@{k}"), self.ndcg));
        for level in [&self.bundle, &self.item].into_iter().flatten() {
            for (name, v) in FairnessMetrics::NAMES.iter().zip(level.metrics.values()) {
                rows.push((scope.into(), level.level.to_string(), name.to_string(), v));
            }
        }
    }
}

impl AuditReport {
    /// The 14 headline scalars of the overall scope: recall, NDCG, then the
    /// six fairness scores at bundle and at item level.
    pub fn headline(&self) -> Vec<(String, f64)> {
        let k = self.metadata.k;
        let mut out = vec![(format!("R@{k}"), self.overall.recall), (format!("N@{k}"), self.overall.ndcg)];
        for level in [&self.overall.bundle, &self.overall.item].into_iter().flatten() {
            for (name, v) in FairnessMetrics::NAMES.iter().zip(level.metrics.values()) {
                out.push((format!("{}/{name}", level.level), v));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let m = &self.metadata;
        let k = m.k;
        let smoothing = match m.smoothing {
            Smoothing::Floor(eps) => json_f64(eps),
            Smoothing::Strict => Value::String("strict".into()),
        };
        let mut groups = Map::new();
        for (g, scope) in &self.by_tendency {
            groups.insert(g.label().into(), scope.as_ref().map_or(Value::Null, |s| s.to_json(k)));
        }
        json!({
            "metadata": {
                "dataset": m.dataset,
                "n_users": m.n_users,
                "n_bundles": m.n_bundles,
                "n_items": m.n_items,
                "k": k,
                "gamma": json_f64(m.gamma),
                "browsing_model": "geometric",
                "smoothing": smoothing,
                "log_base": "e",
                "signed_logs": true,
                "included_users": m.included_users,
                "excluded_users": m.excluded_users,
                "bundle_group_hash": m.bundle_group_hash,
                "item_group_hash": m.item_group_hash,
                "n_popular_bundles": m.n_popular_bundles,
                "n_popular_items": m.n_popular_items,
                "popularity_share": opt_f64(m.popularity_share),
                "tendency_thresholds": { "lo": json_f64(m.tendency_lo), "hi": json_f64(m.tendency_hi) },
                "tendency_group_sizes": { "g1": m.tendency_group_sizes[0], "g2": m.tendency_group_sizes[1], "g3": m.tendency_group_sizes[2] },
                "split_seed": m.split_seed,
            },
            "overall": self.overall.to_json(k),
            "tendency_groups": groups,
            "gini": {
                "bundle": { "interactions": opt_f64(self.gini.bundle_interactions), "run": opt_f64(self.gini.bundle_run) },
                "item": { "interactions": opt_f64(self.gini.item_interactions), "run": opt_f64(self.gini.item_run) },
            },
        })
    }

    /// Pretty-printed JSON followed by a newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report JSON is always serializable");
        s.push('\n');
        s
    }

    /// Flat `scope,level,metric,value` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let k = self.metadata.k;
        let mut rows = Vec::new();
        self.overall.csv_rows("overall", k, &mut rows);
        for (g, scope) in &self.by_tendency {
            if let Some(s) = scope {
                s.csv_rows(g.label(), k, &mut rows);
            }
        }
        let gini = [
            ("bundle", "gini_interactions", self.gini.bundle_interactions),
            ("bundle", "gini_run", self.gini.bundle_run),
            ("item", "gini_interactions", self.gini.item_interactions),
            ("item", "gini_run", self.gini.item_run),
        ];
        for (level, metric, v) in gini {
            if let Some(v) = v {
                rows.push(("gini".into(), level.into(), metric.into(), v));
            }
        }
        writeln!(out, "scope,level,metric,value")?;
        for (scope, level, metric, v) in rows {
            writeln!(out, "{scope},{level},{metric},{}", fmt_f64(v))?;
        }
        Ok(())
    }
}
