//! Popular/unpopular partitions of bundles and items, and bundle-vs-item
//! tendency groups of users.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::SparseBinaryMatrix;
use crate::report::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Bundle,
    Item,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::Bundle => "bundle",
            EntityKind::Item => "item",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Popular,
    Unpopular,
}

impl Group {
    pub fn label(self) -> &'static str {
        match self {
            Group::Popular => "G+",
            Group::Unpopular => "G-",
        }
    }
}

/// Membership of every bundle (or item) in G+ or G-.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAssignment {
    pub kind: EntityKind,
    /// Interaction share G+ was built to cover; `None` for hand-made groups.
    pub share: Option<f64>,
    membership: Vec<Group>,
    frequency: Vec<f64>,
}

impl GroupAssignment {
    /// Builds an assignment from explicit membership flags.
    pub fn from_membership(kind: EntityKind, popular: &[bool], frequency: Option<Vec<f64>>) -> Result<Self> {
        let frequency = frequency.unwrap_or_else(|| vec![0.0; popular.len()]);
        if frequency.len() != popular.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} membership flags but {} frequencies",
                popular.len(),
                frequency.len()
            )));
        }
        Ok(Self {
            kind,
            share: None,
            membership: popular
                .iter()
                .map(|&p| if p { Group::Popular } else { Group::Unpopular })
                .collect(),
            frequency,
        })
    }

    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    pub fn group(&self, entity: usize) -> Group {
        self.membership[entity]
    }

    pub fn is_popular(&self, entity: usize) -> bool {
        self.membership[entity] == Group::Popular
    }

    pub fn membership(&self) -> &[Group] {
        &self.membership
    }

    pub fn frequency(&self) -> &[f64] {
        &self.frequency
    }

    pub fn n_popular(&self) -> usize {
        self.membership.iter().filter(|g| **g == Group::Popular).count()
    }

    /// The same partition with G+ and G- exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            membership: self
                .membership
                .iter()
                .map(|g| match g {
                    Group::Popular => Group::Unpopular,
                    Group::Unpopular => Group::Popular,
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Short hex digest identifying the partition.
    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.kind.to_string().as_bytes());
        hasher.update(self.share.unwrap_or(-1.0).to_le_bytes());
        hasher.update(
            self.membership
                .iter()
                .map(|g| u8::from(*g == Group::Popular))
                .collect::<Vec<_>>(),
        );
        hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// CSV with header `entity_id,group,frequency`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "entity_id,group,frequency")?;
        for (e, (g, f)) in self.membership.iter().zip(&self.frequency).enumerate() {
            writeln!(out, "{e},{},{}", g.label(), fmt_f64(*f))?;
        }
        Ok(())
    }
}

/// Number of training users per bundle.
pub fn bundle_frequency(x_train: &SparseBinaryMatrix) -> Vec<u64> {
    x_train.col_counts().into_iter().map(|c| c as u64).collect()
}

/// Column mass of the reconstructed user-item matrix `X·Z + Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemFrequency {
    pub raw: Vec<u64>,
    /// `raw` divided by its total; all zeros when the total is zero.
    pub normalized: Vec<f64>,
}

/// Item popularity counting both direct item interactions and items reached
/// through interacted bundles. An item in two interacted bundles counts twice.
pub fn item_frequency(
    x_train: &SparseBinaryMatrix,
    bundle_item: &SparseBinaryMatrix,
    user_item: &SparseBinaryMatrix,
) -> Result<ItemFrequency> {
    if x_train.n_cols() != bundle_item.n_rows()
        || user_item.n_cols() != bundle_item.n_cols()
        || x_train.n_rows() != user_item.n_rows()
    {
        return Err(Error::DimensionMismatch(format!(
            "X {}x{}, Z {}x{}, Y {}x{}",
            x_train.n_rows(),
            x_train.n_cols(),
            bundle_item.n_rows(),
            bundle_item.n_cols(),
            user_item.n_rows(),
            user_item.n_cols()
        )));
    }
    // column sums of X·Z are bundle frequencies pushed through Z
    let mut raw: Vec<u64> = user_item.col_counts().into_iter().map(|c| c as u64).collect();
    for (b, freq) in bundle_frequency(x_train).into_iter().enumerate() {
        if freq == 0 {
            continue;
        }
        for &i in bundle_item.row(b) {
            raw[i as usize] += freq;
        }
    }
    let total: u64 = raw.iter().sum();
    let normalized = if total == 0 {
        vec![0.0; raw.len()]
    } else {
        raw.iter().map(|&f| f as f64 / total as f64).collect()
    };
    Ok(ItemFrequency { raw, normalized })
}

/// Splits entities into G+ (the most frequent ones covering at least `share`
/// of the total mass, as few as possible) and G- (the rest).
///
/// Entities are ranked by frequency descending, then id ascending.
pub fn partition_by_popularity(freq: &[f64], share: f64, kind: EntityKind) -> Result<GroupAssignment> {
    if !(share > 0.0 && share < 1.0) {
        return Err(Error::Config(format!("popularity share must be in (0, 1), got {share}")));
    }
    if freq.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::Degenerate("frequencies must be finite and non-negative".into()));
    }
    let total: f64 = freq.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate(format!("all {kind} frequencies are zero")));
    }
    let mut order: Vec<usize> = (0..freq.len()).collect();
    order.sort_by(|&a, &b| freq[b].total_cmp(&freq[a]).then(a.cmp(&b)));

    let threshold = share * total;
    let mut membership = vec![Group::Unpopular; freq.len()];
    let mut cum = 0.0;
    for &e in &order {
        membership[e] = Group::Popular;
        cum += freq[e];
        if cum >= threshold {
            break;
        }
    }
    Ok(GroupAssignment {
        kind,
        share: Some(share),
        membership,
        frequency: freq.to_vec(),
    })
}

/// Convenience wrapper over integer counts.
pub fn partition_counts(freq: &[u64], share: f64, kind: EntityKind) -> Result<GroupAssignment> {
    let freq: Vec<f64> = freq.iter().map(|&f| f as f64).collect();
    partition_by_popularity(&freq, share, kind)
}

/// Ratio of a user's bundle interactions to item interactions.
///
/// A user with bundles but no items scores `+inf`; a user with neither scores 1.
pub fn tendency_scores(x_train: &SparseBinaryMatrix, user_item: &SparseBinaryMatrix) -> Result<Vec<f64>> {
    if x_train.n_rows() != user_item.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "X has {} users, Y has {}",
            x_train.n_rows(),
            user_item.n_rows()
        )));
    }
    Ok((0..x_train.n_rows())
        .into_par_iter()
        .map(|u| tendency_ratio(x_train.row_len(u) as f64, user_item.row_len(u) as f64))
        .collect())
}

pub(crate) fn tendency_ratio(bundles: f64, items: f64) -> f64 {
    match (bundles > 0.0, items > 0.0) {
        (_, true) => bundles / items,
        (true, false) => f64::INFINITY,
        (false, false) => 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UserGroup {
    /// bundle-oriented
    G1,
    /// neutral
    G2,
    /// item-oriented
    G3,
}

impl UserGroup {
    pub const ALL: [UserGroup; 3] = [UserGroup::G1, UserGroup::G2, UserGroup::G3];

    pub fn label(self) -> &'static str {
        match self {
            UserGroup::G1 => "g1",
            UserGroup::G2 => "g2",
            UserGroup::G3 => "g3",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserTendencyAssignment {
    pub scores: Vec<f64>,
    pub groups: Vec<UserGroup>,
    pub lo: f64,
    pub hi: f64,
}

impl UserTendencyAssignment {
    pub fn group_sizes(&self) -> [usize; 3] {
        let mut sizes = [0; 3];
        for g in &self.groups {
            sizes[*g as usize] += 1;
        }
        sizes
    }

    /// CSV with header `user_id,r_u,group`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "user_id,r_u,group")?;
        for (u, (r, g)) in self.scores.iter().zip(&self.groups).enumerate() {
            writeln!(out, "{u},{},{}", fmt_f64(*r), g.label())?;
        }
        Ok(())
    }
}

/// `r > hi` is g1, `r < lo` is g3, anything else g2.
pub fn partition_users_by_tendency(scores: &[f64], lo: f64, hi: f64) -> Result<UserTendencyAssignment> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::Config(format!("tendency thresholds need lo <= hi, got {lo} > {hi}")));
    }
    let groups = scores
        .iter()
        .map(|&r| {
            if r > hi {
                UserGroup::G1
            } else if r < lo {
                UserGroup::G3
            } else {
                UserGroup::G2
            }
        })
        .collect();
    Ok(UserTendencyAssignment {
        scores: scores.to_vec(),
        groups,
        lo,
        hi,
    })
}

/// Every partition an audit needs, all derived from the training split.
#[derive(Debug, Clone)]
pub struct AuditGroups {
    pub bundle_frequency: Vec<u64>,
    pub item_frequency: ItemFrequency,
    pub bundles: GroupAssignment,
    pub items: GroupAssignment,
    pub tendency: UserTendencyAssignment,
}

/// Builds bundle and item popularity groups and user tendency groups from the
/// training user-bundle matrix and the user-item matrix.
pub fn build_groups(
    x_train: &SparseBinaryMatrix,
    user_item: &SparseBinaryMatrix,
    bundle_item: &SparseBinaryMatrix,
    share: f64,
    lo: f64,
    hi: f64,
) -> Result<AuditGroups> {
    let bundle_frequency = bundle_frequency(x_train);
    let item_frequency = item_frequency(x_train, bundle_item, user_item)?;
    let bundles = partition_counts(&bundle_frequency, share, EntityKind::Bundle)?;
    let items = partition_counts(&item_frequency.raw, share, EntityKind::Item)?;
    let tendency = partition_users_by_tendency(&tendency_scores(x_train, user_item)?, lo, hi)?;
    Ok(AuditGroups {
        bundle_frequency,
        item_frequency,
        bundles,
        items,
        tendency,
    })
}
