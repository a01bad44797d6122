//! Utility metrics, exposure-fairness metrics, Gini uniformity and the
//! end-to-end audit report.

mod evaluate;
mod fairness;
mod gini;
mod utility;

pub use evaluate::{evaluate, AuditReport, EvalConfig, GiniReport, LevelReport, Levels, ReportMetadata, ScopeReport};
pub use fairness::{
    fairness_metrics, group_ctr, group_utility, FairnessMetrics, GroupCtr, GroupUtility, RelevanceModel, Smoothing,
    DEFAULT_SMOOTHING,
};
pub use gini::{gini_counts, gini_index};
pub use utility::{ndcg_at_k, recall_at_k};
