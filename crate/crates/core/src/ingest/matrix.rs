use std::io::Write;

use crate::error::{Error, Result};

/// Binary matrix in compressed-row form.
///
/// Column indices are sorted and unique within every row, so membership tests
/// are a binary search and two matrices with the same entry set compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
}

impl SparseBinaryMatrix {
    pub fn empty(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_ptr: vec![0; n_rows + 1],
            cols: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col)` pairs, dropping duplicates.
    pub fn from_pairs<I>(n_rows: usize, n_cols: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Ok(Self::from_pairs_counted(n_rows, n_cols, pairs)?.0)
    }

    /// Like [`from_pairs`](Self::from_pairs), also returning how many
    /// duplicate pairs were dropped.
    pub fn from_pairs_counted<I>(n_rows: usize, n_cols: usize, pairs: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut entries = Vec::new();
        for (i, (row, col)) in pairs.into_iter().enumerate() {
            if row >= n_rows || col >= n_cols {
                return Err(Error::IndexOutOfBounds {
                    line: i + 1,
                    row,
                    col,
                    n_rows,
                    n_cols,
                });
            }
            entries.push((row, col as u32));
        }
        Ok(Self::from_checked(n_rows, n_cols, entries))
    }

    /// `entries` must already be in bounds.
    pub(crate) fn from_checked(
        n_rows: usize,
        n_cols: usize,
        mut entries: Vec<(usize, u32)>,
    ) -> (Self, usize) {
        entries.sort_unstable();
        let before = entries.len();
        entries.dedup();
        let duplicates = before - entries.len();

        let mut row_ptr = vec![0usize; n_rows + 1];
        for &(r, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let cols = entries.into_iter().map(|(_, c)| c).collect();
        (
            Self {
                n_rows,
                n_cols,
                row_ptr,
                cols,
            },
            duplicates,
        )
    }

    /// Builds a matrix from per-row column lists. Rows are sorted and deduplicated.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let n_rows = rows.len();
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable();
            row.dedup();
            if let Some(&c) = row.last() {
                if c as usize >= n_cols {
                    return Err(Error::IndexOutOfBounds {
                        line: r + 1,
                        row: r,
                        col: c as usize,
                        n_rows,
                        n_cols,
                    });
                }
            }
            cols.extend(row);
            row_ptr.push(cols.len());
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            cols,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored (non-zero) entries.
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Sorted column indices of `row`.
    pub fn row(&self, row: usize) -> &[u32] {
        &self.cols[self.row_ptr[row]..self.row_ptr[row + 1]]
    }

    pub fn row_len(&self, row: usize) -> usize {
        self.row_ptr[row + 1] - self.row_ptr[row]
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.n_rows && self.row(row).binary_search(&(col as u32)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_rows).flat_map(move |r| self.row(r).iter().map(move |&c| (r, c as usize)))
    }

    pub fn row_counts(&self) -> Vec<usize> {
        (0..self.n_rows).map(|r| self.row_len(r)).collect()
    }

    pub fn col_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_cols];
        for &c in &self.cols {
            counts[c as usize] += 1;
        }
        counts
    }

    pub fn transpose(&self) -> Self {
        let mut row_ptr = vec![0usize; self.n_cols + 1];
        for &c in &self.cols {
            row_ptr[c as usize + 1] += 1;
        }
        for c in 0..self.n_cols {
            row_ptr[c + 1] += row_ptr[c];
        }
        let mut next = row_ptr.clone();
        let mut cols = vec![0u32; self.cols.len()];
        // rows are visited in ascending order, so every output row stays sorted
        for r in 0..self.n_rows {
            for &c in self.row(r) {
                let slot = &mut next[c as usize];
                cols[*slot] = r as u32;
                *slot += 1;
            }
        }
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr,
            cols,
        }
    }

    /// Entry-wise union of two equally shaped matrices.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot union {}x{} with {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let rows = (0..self.n_rows)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend_from_slice(other.row(r));
                row
            })
            .collect();
        Self::from_rows(self.n_cols, rows)
    }

    /// Writes one `row col` line per entry, in row-major order.
    pub fn write_pairs<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (r, c) in self.iter() {
            writeln!(out, "{r} {c}")?;
        }
        Ok(())
    }
}
