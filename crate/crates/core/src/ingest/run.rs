use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Top-K ranked bundle lists, one per user. Index 0 of a list is rank 1.
///
/// Users without a line in the predictions file get an empty list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationRun {
    k: usize,
    n_bundles: usize,
    lists: Vec<Vec<u32>>,
}

impl RecommendationRun {
    /// Validates list length, bundle range and in-list uniqueness.
    pub fn new(k: usize, n_bundles: usize, lists: Vec<Vec<u32>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        let mut seen = vec![usize::MAX; n_bundles];
        for (user, list) in lists.iter().enumerate() {
            if list.len() > k {
                return Err(Error::ListTooLong {
                    user,
                    len: list.len(),
                    k,
                });
            }
            for &b in list {
                let b = b as usize;
                if b >= n_bundles {
                    return Err(Error::Range {
                        line: user + 1,
                        message: format!("bundle {b} for user {user} (n_bundles = {n_bundles})"),
                    });
                }
                if seen[b] == user {
                    return Err(Error::DuplicateBundle { user, bundle: b });
                }
                seen[b] = user;
            }
        }
        Ok(Self { k, n_bundles, lists })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_users(&self) -> usize {
        self.lists.len()
    }

    pub fn n_bundles(&self) -> usize {
        self.n_bundles
    }

    pub fn list(&self, user: usize) -> &[u32] {
        self.lists.get(user).map_or(&[], Vec::as_slice)
    }

    pub fn lists(&self) -> &[Vec<u32>] {
        &self.lists
    }

    /// Writes the run in the predictions TSV format, skipping empty lists.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (user, list) in self.lists.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let joined: Vec<String> = list.iter().map(u32::to_string).collect();
            writeln!(out, "{user}\t{}", joined.join(","))?;
        }
        Ok(())
    }
}

/// Parses predictions text: one `user<TAB>b1,b2,...` line per user.
/// `source` only labels error messages.
pub fn parse_recommendations(
    source: &Path,
    text: &str,
    k: usize,
    n_users: usize,
    n_bundles: usize,
) -> Result<RecommendationRun> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut lists: Vec<Option<Vec<u32>>> = vec![None; n_users];
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (user_field, bundles_field) = line
            .split_once('\t')
            .unwrap_or((line, ""));
        let user: usize = user_field
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad user id {user_field:?}")))?;
        if user >= n_users {
            return Err(Error::Range {
                line: line_no,
                message: format!("user {user} (n_users = {n_users})"),
            });
        }
        let mut list = Vec::new();
        for field in bundles_field.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            let b: usize = field
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad bundle id {field:?}")))?;
            if b >= n_bundles {
                return Err(Error::Range {
                    line: line_no,
                    message: format!("bundle {b} (n_bundles = {n_bundles})"),
                });
            }
            if list.contains(&(b as u32)) {
                return Err(Error::DuplicateBundle { user, bundle: b });
            }
            list.push(b as u32);
        }
        if lists[user].is_some() {
            return Err(Error::DuplicateUser(user));
        }
        lists[user] = Some(list);
    }
    RecommendationRun::new(k, n_bundles, lists.into_iter().map(Option::unwrap_or_default).collect())
}

/// Reads a predictions file; see [`parse_recommendations`].
pub fn load_recommendations(
    path: impl AsRef<Path>,
    k: usize,
    n_users: usize,
    n_bundles: usize,
) -> Result<RecommendationRun> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_recommendations(path, &text, k, n_users, n_bundles)
}
