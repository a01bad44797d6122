//! Exposure-fairness auditing for bundle recommendation.
//!
//! Given user-bundle, user-item and bundle-item interactions plus per-user
//! top-K bundle lists, this crate computes recall and NDCG, six group
//! fairness scores (logEUR, logRUR, EEL, EER, EED, logDP) between popular and
//! unpopular bundles and between popular and unpopular items, Gini
//! uniformity, and breakdowns by how bundle-oriented each user is.
//!
//! ```
//! use bundlefair::exposure::{bundle_exposure, BrowsingModel};
//!
//! let model = BrowsingModel::geometric(0.5).unwrap();
//! let a = bundle_exposure(&[3, 1], &model, 4);
//! assert_eq!(a.values, vec![0.0, 0.25, 0.0, 0.5]);
//! ```

pub mod error;
pub mod exposure;
pub mod grouping;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod testkit;

pub use error::{Error, Result};
