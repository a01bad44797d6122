//! Loading and validating user/bundle/item interaction data.
//!
//! On-disk layout of a dataset directory:
//!
//! ```text
//! data_size.txt                  "n_users n_bundles n_items"
//! user_bundle.txt                one "user bundle" pair per line
//!   or user_bundle_{train,valid,test}.txt (valid may be named tune)
//! user_item.txt                  one "user item" pair per line
//! bundle_item.txt                one "bundle item" pair per line
//! ```
//!
//! Ids are dense and 0-based. Duplicate lines are dropped and counted.

mod matrix;
mod run;
mod split;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub use matrix::SparseBinaryMatrix;
pub use run::{load_recommendations, parse_recommendations, RecommendationRun};
pub use split::{split_user_bundle, SplitDataset, SplitRatios};

pub const DATA_SIZE_FILE: &str = "data_size.txt";
pub const USER_BUNDLE_FILE: &str = "user_bundle.txt";
pub const USER_ITEM_FILE: &str = "user_item.txt";
pub const BUNDLE_ITEM_FILE: &str = "bundle_item.txt";
pub const TRAIN_FILE: &str = "user_bundle_train.txt";
pub const VALID_FILE: &str = "user_bundle_valid.txt";
pub const TUNE_FILE: &str = "user_bundle_tune.txt";
pub const TEST_FILE: &str = "user_bundle_test.txt";

/// The three interaction matrices of a bundle recommendation dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionDataset {
    pub name: String,
    /// users × bundles
    pub user_bundle: SparseBinaryMatrix,
    /// users × items
    pub user_item: SparseBinaryMatrix,
    /// bundles × items
    pub bundle_item: SparseBinaryMatrix,
}

impl InteractionDataset {
    /// Validates shapes and that every bundle with interactions has at least one item.
    pub fn new(
        name: impl Into<String>,
        user_bundle: SparseBinaryMatrix,
        user_item: SparseBinaryMatrix,
        bundle_item: SparseBinaryMatrix,
    ) -> Result<Self> {
        if user_bundle.n_rows() != user_item.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "user-bundle has {} users, user-item has {}",
                user_bundle.n_rows(),
                user_item.n_rows()
            )));
        }
        if user_bundle.n_cols() != bundle_item.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "user-bundle has {} bundles, bundle-item has {}",
                user_bundle.n_cols(),
                bundle_item.n_rows()
            )));
        }
        if user_item.n_cols() != bundle_item.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "user-item has {} items, bundle-item has {}",
                user_item.n_cols(),
                bundle_item.n_cols()
            )));
        }
        for (b, &count) in user_bundle.col_counts().iter().enumerate() {
            if count > 0 && bundle_item.row_len(b) == 0 {
                return Err(Error::EmptyBundle(b));
            }
        }
        Ok(Self {
            name: name.into(),
            user_bundle,
            user_item,
            bundle_item,
        })
    }

    pub fn n_users(&self) -> usize {
        self.user_bundle.n_rows()
    }

    pub fn n_bundles(&self) -> usize {
        self.user_bundle.n_cols()
    }

    pub fn n_items(&self) -> usize {
        self.user_item.n_cols()
    }
}

/// A dataset read from disk, with its pre-made split when one was present.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: InteractionDataset,
    pub splits: Option<SplitDataset>,
    /// Duplicate lines dropped across all files.
    pub duplicate_lines: usize,
}

/// Summary counts in the shape of the usual dataset statistics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub n_users: usize,
    pub n_items: usize,
    pub n_bundles: usize,
    pub n_ui: usize,
    pub n_ub: usize,
    pub avg_items_per_bundle: f64,
    pub ub_density: f64,
}

pub fn dataset_stats(ds: &InteractionDataset) -> DatasetStats {
    let n_users = ds.n_users();
    let n_bundles = ds.n_bundles();
    let n_ub = ds.user_bundle.nnz();
    let ub_cells = n_users * n_bundles;
    DatasetStats {
        n_users,
        n_items: ds.n_items(),
        n_bundles,
        n_ui: ds.user_item.nnz(),
        n_ub,
        avg_items_per_bundle: if n_bundles == 0 {
            0.0
        } else {
            ds.bundle_item.nnz() as f64 / n_bundles as f64
        },
        ub_density: if ub_cells == 0 {
            0.0
        } else {
            n_ub as f64 / ub_cells as f64
        },
    }
}

fn read_text(path: &Path) -> Result<String> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_pairs(path: &Path, text: &str) -> Result<Vec<(usize, usize, usize)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_error(path, line_no, format!("expected two integers, got {line:?}")));
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_error(path, line_no, format!("not a non-negative integer: {s:?}")))
        };
        pairs.push((line_no, parse(a)?, parse(b)?));
    }
    Ok(pairs)
}

/// Reads a pairs file, also returning the number of duplicate lines dropped.
pub fn load_pairs_file_counted(
    path: impl AsRef<Path>,
    n_rows: usize,
    n_cols: usize,
) -> Result<(SparseBinaryMatrix, usize)> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let pairs = parse_pairs(path, &text)?;
    let mut entries = Vec::with_capacity(pairs.len());
    for (line, row, col) in pairs {
        if row >= n_rows || col >= n_cols {
            return Err(Error::IndexOutOfBounds {
                line,
                row,
                col,
                n_rows,
                n_cols,
            });
        }
        entries.push((row, col as u32));
    }
    Ok(SparseBinaryMatrix::from_checked(n_rows, n_cols, entries))
}

/// Reads a whitespace-separated `row col` file into an `n_rows × n_cols` matrix.
pub fn load_pairs_file(
    path: impl AsRef<Path>,
    n_rows: usize,
    n_cols: usize,
) -> Result<SparseBinaryMatrix> {
    Ok(load_pairs_file_counted(path, n_rows, n_cols)?.0)
}

/// Reads `data_size.txt` as `(n_users, n_bundles, n_items)`.
pub fn load_data_size(path: impl AsRef<Path>) -> Result<(usize, usize, usize)> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| parse_error(path, 1, "empty file"))?;
    let nums = line
        .split_whitespace()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| parse_error(path, 1, format!("expected three integers, got {line:?}")))?;
    match nums[..] {
        [u, b, i] => Ok((u, b, i)),
        _ => Err(parse_error(path, 1, format!("expected three integers, got {line:?}"))),
    }
}

fn load_sized(path: PathBuf, n_rows: usize, n_cols: usize, dups: &mut usize) -> Result<SparseBinaryMatrix> {
    match load_pairs_file_counted(&path, n_rows, n_cols) {
        Ok((m, d)) => {
            *dups += d;
            Ok(m)
        }
        Err(Error::IndexOutOfBounds {
            line,
            row,
            col,
            n_rows,
            n_cols,
        }) => Err(Error::DimensionMismatch(format!(
            "{}:{line}: pair ({row}, {col}) exceeds data_size {n_rows}x{n_cols}",
            path.display()
        ))),
        Err(e) => Err(e),
    }
}

/// Loads and validates a dataset directory.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<LoadedDataset> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(Error::MissingFile(dir.to_path_buf()));
    }
    let (n_users, n_bundles, n_items) = load_data_size(dir.join(DATA_SIZE_FILE))?;
    let mut dups = 0usize;

    let bundle_item = load_sized(dir.join(BUNDLE_ITEM_FILE), n_bundles, n_items, &mut dups)?;
    let user_item = load_sized(dir.join(USER_ITEM_FILE), n_users, n_items, &mut dups)?;

    let (user_bundle, splits) = if dir.join(TRAIN_FILE).is_file() {
        let valid_path = if dir.join(VALID_FILE).is_file() {
            dir.join(VALID_FILE)
        } else if dir.join(TUNE_FILE).is_file() {
            dir.join(TUNE_FILE)
        } else {
            return Err(Error::MissingFile(dir.join(VALID_FILE)));
        };
        let train = load_sized(dir.join(TRAIN_FILE), n_users, n_bundles, &mut dups)?;
        let valid = load_sized(valid_path, n_users, n_bundles, &mut dups)?;
        let test = load_sized(dir.join(TEST_FILE), n_users, n_bundles, &mut dups)?;
        let all = train.union(&valid)?.union(&test)?;
        (
            all,
            Some(SplitDataset {
                train,
                valid,
                test,
                seed: None,
            }),
        )
    } else {
        (
            load_sized(dir.join(USER_BUNDLE_FILE), n_users, n_bundles, &mut dups)?,
            None,
        )
    };

    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let dataset = InteractionDataset::new(name, user_bundle, user_item, bundle_item)?;
    Ok(LoadedDataset {
        dataset,
        splits,
        duplicate_lines: dups,
    })
}

fn write_matrix(path: PathBuf, m: &SparseBinaryMatrix) -> Result<()> {
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut out = BufWriter::new(file);
    m.write_pairs(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(&path, e))
}

/// Writes `ds` in the layout [`load_dataset`] reads. With `splits`, the
/// user-bundle interactions are written as train/valid/test files.
pub fn write_dataset(dir: impl AsRef<Path>, ds: &InteractionDataset, splits: Option<&SplitDataset>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let size_path = dir.join(DATA_SIZE_FILE);
    fs::write(
        &size_path,
        format!("{} {} {}\n", ds.n_users(), ds.n_bundles(), ds.n_items()),
    )
    .map_err(|e| Error::io(&size_path, e))?;
    write_matrix(dir.join(USER_ITEM_FILE), &ds.user_item)?;
    write_matrix(dir.join(BUNDLE_ITEM_FILE), &ds.bundle_item)?;
    match splits {
        Some(s) => {
            write_matrix(dir.join(TRAIN_FILE), &s.train)?;
            write_matrix(dir.join(VALID_FILE), &s.valid)?;
            write_matrix(dir.join(TEST_FILE), &s.test)?;
        }
        None => write_matrix(dir.join(USER_BUNDLE_FILE), &ds.user_bundle)?,
    }
    Ok(())
}
