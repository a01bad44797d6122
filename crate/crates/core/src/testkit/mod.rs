//! Synthetic datasets and simple baseline recommenders for exercising the
//! audit pipeline end to end.
//!
//! All randomness comes from ChaCha8 (`rand_chacha` 0.9.0, `rand` 0.9.5, both
//! pinned), seeded with `seed_from_u64`, so fixtures are reproducible across
//! platforms.

mod baselines;
mod synthetic;

pub use baselines::{item_affinity_recommender, most_popular_recommender, random_recommender};
pub use synthetic::{generate_synthetic, SyntheticConfig, ZipfTable};
