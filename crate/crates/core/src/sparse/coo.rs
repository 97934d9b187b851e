use alloc::vec;
use alloc::vec::Vec;

use super::{Axis, CscMatrix, CsrMatrix};
use crate::{Error, Result};

/// One stored coefficient `a[row, col] = val`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub val: f64,
}

impl Entry {
    pub fn new(row: usize, col: usize, val: f64) -> Self {
        Entry { row, col, val }
    }

    /// Index of the line holding this entry along `axis`.
    #[inline]
    pub fn line(&self, axis: Axis) -> usize {
        match axis {
            Axis::Row => self.row,
            Axis::Column => self.col,
        }
    }
}

/// Coordinate-list matrix with unique, in-range coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<Entry>,
}

impl CooMatrix {
    /// Builds a matrix from an entry list, rejecting out-of-range and
    /// duplicate coordinates. Entry order is kept as given.
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<Entry>) -> Result<Self> {
        for e in &entries {
            if e.row >= n_rows || e.col >= n_cols {
                return Err(Error::IndexOutOfRange {
                    row: e.row,
                    col: e.col,
                    n_rows,
                    n_cols,
                });
            }
        }
        let mut keys: Vec<(usize, usize)> = entries.iter().map(|e| (e.row, e.col)).collect();
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }
        Ok(CooMatrix {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let entries = triplets
            .into_iter()
            .map(|(r, c, v)| Entry::new(r, c, v))
            .collect();
        Self::new(n_rows, n_cols, entries)
    }

    /// Caller guarantees the invariants (used when restricting an already
    /// valid matrix).
    pub(crate) fn from_valid_parts(n_rows: usize, n_cols: usize, entries: Vec<Entry>) -> Self {
        debug_assert!(Self::new(n_rows, n_cols, entries.clone()).is_ok());
        CooMatrix {
            n_rows,
            n_cols,
            entries,
        }
    }

    pub fn empty(n_rows: usize, n_cols: usize) -> Self {
        CooMatrix {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CooMatrix {
            n_rows: n,
            n_cols: n,
            entries: (0..n).map(|i| Entry::new(i, i, 1.0)).collect(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Entry> {
        self.entries
    }

    /// Number of lines along `axis`.
    pub fn n_lines(&self, axis: Axis) -> usize {
        match axis {
            Axis::Row => self.n_rows,
            Axis::Column => self.n_cols,
        }
    }

    pub fn row_nnz_counts(&self) -> Vec<u64> {
        self.line_nnz_counts(Axis::Row)
    }

    pub fn col_nnz_counts(&self) -> Vec<u64> {
        self.line_nnz_counts(Axis::Column)
    }

    pub fn line_nnz_counts(&self, axis: Axis) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_lines(axis)];
        for e in &self.entries {
            counts[e.line(axis)] += 1;
        }
        counts
    }

    /// Entries sorted row-major.
    pub fn sorted_row_major(&self) -> Vec<Entry> {
        let mut v = self.entries.clone();
        v.sort_unstable_by_key(|e| (e.row, e.col));
        v
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let mut ptr = vec![0usize; self.n_rows + 1];
        for e in &self.entries {
            ptr[e.row + 1] += 1;
        }
        for i in 0..self.n_rows {
            ptr[i + 1] += ptr[i];
        }
        let sorted = self.sorted_row_major();
        let col = sorted.iter().map(|e| e.col).collect();
        let val = sorted.iter().map(|e| e.val).collect();
        CsrMatrix::from_valid_parts(self.n_rows, self.n_cols, ptr, col, val)
    }

    pub fn to_csc(&self) -> CscMatrix {
        let mut ptr = vec![0usize; self.n_cols + 1];
        for e in &self.entries {
            ptr[e.col + 1] += 1;
        }
        for j in 0..self.n_cols {
            ptr[j + 1] += ptr[j];
        }
        let mut sorted = self.entries.clone();
        sorted.sort_unstable_by_key(|e| (e.col, e.row));
        let row = sorted.iter().map(|e| e.row).collect();
        let val = sorted.iter().map(|e| e.val).collect();
        CscMatrix::from_valid_parts(self.n_rows, self.n_cols, ptr, row, val)
    }

    /// Entries whose line along `axis` satisfies `keep`, original coordinates
    /// preserved.
    pub fn restrict(&self, axis: Axis, mut keep: impl FnMut(usize) -> bool) -> CooMatrix {
        let entries = self
            .entries
            .iter()
            .filter(|e| keep(e.line(axis)))
            .copied()
            .collect();
        CooMatrix::from_valid_parts(self.n_rows, self.n_cols, entries)
    }

    /// Dense row-major copy. Test and debugging helper for small matrices.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for e in &self.entries {
            d[e.row][e.col] = e.val;
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        let err = CooMatrix::from_triplets(2, 2, [(0, 2, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { row: 0, col: 2, .. }));
    }

    #[test]
    fn rejects_duplicates() {
        let err =
            CooMatrix::from_triplets(3, 3, [(1, 1, 1.0), (0, 0, 2.0), (1, 1, 3.0)]).unwrap_err();
        assert_eq!(err, Error::DuplicateEntry { row: 1, col: 1 });
    }

    #[test]
    fn explicit_zero_counts_as_entry() {
        let m = CooMatrix::from_triplets(2, 2, [(0, 0, 0.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.col_nnz_counts(), [2, 0]);
        assert_eq!(m.row_nnz_counts(), [1, 1]);
    }

    #[test]
    fn diagonal_counts_are_one() {
        let m = CooMatrix::identity(7);
        assert!(m.row_nnz_counts().iter().all(|&c| c == 1));
        assert!(m.col_nnz_counts().iter().all(|&c| c == 1));
    }

    #[test]
    fn empty_matrix_csr_ptr() {
        let csr = CooMatrix::empty(3, 3).to_csr();
        assert_eq!(csr.ptr(), [0, 0, 0, 0]);
    }
}
