use alloc::vec::Vec;

use super::{CooMatrix, Entry};
use crate::{Error, Result};

/// Compressed sparse row storage (`Val` / `Col` / `Ptr`).
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

/// Compressed sparse column storage (`Val` / `Lig` / `Ptr`).
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    n_rows: usize,
    n_cols: usize,
    ptr: Vec<usize>,
    row: Vec<usize>,
    val: Vec<f64>,
}

/// Checks the shared compressed-storage invariants: `ptr` spans the major
/// dimension, starts at 0, ends at NNZ, never decreases, and minor indices
/// are in range and strictly increasing within each major line.
fn check_compressed(
    n_major: usize,
    n_minor: usize,
    ptr: &[usize],
    idx: &[usize],
    val: &[f64],
    entry: impl Fn(usize, usize) -> (usize, usize),
    dims: (usize, usize),
) -> Result<()> {
    if ptr.len() != n_major + 1 {
        return Err(Error::DimensionMismatch {
            expected: n_major + 1,
            got: ptr.len(),
        });
    }
    if idx.len() != val.len() {
        return Err(Error::DimensionMismatch {
            expected: idx.len(),
            got: val.len(),
        });
    }
    if ptr[0] != 0 || ptr[n_major] != idx.len() || ptr.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::DimensionMismatch {
            expected: idx.len(),
            got: ptr[n_major],
        });
    }
    for major in 0..n_major {
        let line = &idx[ptr[major]..ptr[major + 1]];
        for (k, &minor) in line.iter().enumerate() {
            let (row, col) = entry(major, minor);
            if minor >= n_minor {
                return Err(Error::IndexOutOfRange {
                    row,
                    col,
                    n_rows: dims.0,
                    n_cols: dims.1,
                });
            }
            if k > 0 && line[k - 1] >= minor {
                return Err(Error::DuplicateEntry { row, col });
            }
        }
    }
    Ok(())
}

impl CsrMatrix {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        ptr: Vec<usize>,
        col: Vec<usize>,
        val: Vec<f64>,
    ) -> Result<Self> {
        check_compressed(
            n_rows,
            n_cols,
            &ptr,
            &col,
            &val,
            |r, c| (r, c),
            (n_rows, n_cols),
        )?;
        Ok(Self::from_valid_parts(n_rows, n_cols, ptr, col, val))
    }

    pub(crate) fn from_valid_parts(
        n_rows: usize,
        n_cols: usize,
        ptr: Vec<usize>,
        col: Vec<usize>,
        val: Vec<f64>,
    ) -> Self {
        CsrMatrix {
            n_rows,
            n_cols,
            ptr,
            col,
            val,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn ptr(&self) -> &[usize] {
        &self.ptr
    }

    pub fn col(&self) -> &[usize] {
        &self.col
    }

    pub fn val(&self) -> &[f64] {
        &self.val
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.ptr[i]..self.ptr[i + 1];
        (&self.col[r.clone()], &self.val[r])
    }

    pub fn to_coo(&self) -> CooMatrix {
        let mut entries = Vec::with_capacity(self.nnz());
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            entries.extend(cols.iter().zip(vals).map(|(&j, &v)| Entry::new(i, j, v)));
        }
        CooMatrix::from_valid_parts(self.n_rows, self.n_cols, entries)
    }
}

impl CscMatrix {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        ptr: Vec<usize>,
        row: Vec<usize>,
        val: Vec<f64>,
    ) -> Result<Self> {
        check_compressed(
            n_cols,
            n_rows,
            &ptr,
            &row,
            &val,
            |c, r| (r, c),
            (n_rows, n_cols),
        )?;
        Ok(Self::from_valid_parts(n_rows, n_cols, ptr, row, val))
    }

    pub(crate) fn from_valid_parts(
        n_rows: usize,
        n_cols: usize,
        ptr: Vec<usize>,
        row: Vec<usize>,
        val: Vec<f64>,
    ) -> Self {
        CscMatrix {
            n_rows,
            n_cols,
            ptr,
            row,
            val,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn ptr(&self) -> &[usize] {
        &self.ptr
    }

    /// Row indices (`Lig`).
    pub fn row_idx(&self) -> &[usize] {
        &self.row
    }

    pub fn val(&self) -> &[f64] {
        &self.val
    }

    /// Row indices and values of column `j`.
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.ptr[j]..self.ptr[j + 1];
        (&self.row[r.clone()], &self.val[r])
    }

    pub fn to_coo(&self) -> CooMatrix {
        let mut entries = Vec::with_capacity(self.nnz());
        for j in 0..self.n_cols {
            let (rows, vals) = self.column(j);
            entries.extend(rows.iter().zip(vals).map(|(&i, &v)| Entry::new(i, j, v)));
        }
        CooMatrix::from_valid_parts(self.n_rows, self.n_cols, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// The 4x4 pattern with entries a00 a03 a12 a20 a21 a22 a31 a33.
    fn four_by_four() -> CooMatrix {
        CooMatrix::from_triplets(
            4,
            4,
            [
                (2, 1, 21.0),
                (0, 3, 3.0),
                (3, 3, 33.0),
                (1, 2, 12.0),
                (2, 0, 20.0),
                (0, 0, 1.0),
                (3, 1, 31.0),
                (2, 2, 22.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn csr_arrays_of_four_by_four() {
        let csr = four_by_four().to_csr();
        assert_eq!(csr.ptr(), [0, 2, 3, 6, 8]);
        assert_eq!(csr.col(), [0, 3, 2, 0, 1, 2, 1, 3]);
        assert_eq!(csr.val(), [1.0, 3.0, 12.0, 20.0, 21.0, 22.0, 31.0, 33.0]);
    }

    #[test]
    fn csc_arrays_of_four_by_four() {
        let csc = four_by_four().to_csc();
        assert_eq!(csc.ptr(), [0, 2, 4, 6, 8]);
        assert_eq!(csc.row_idx(), [0, 2, 2, 3, 1, 2, 0, 3]);
        assert_eq!(csc.val(), [1.0, 20.0, 21.0, 31.0, 12.0, 22.0, 3.0, 33.0]);
    }

    #[test]
    fn csr_new_validates() {
        assert!(CsrMatrix::new(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0, 2.0]).is_ok());
        assert!(CsrMatrix::new(2, 2, vec![0, 1], vec![0], vec![1.0]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![0, 2, 2], vec![1, 1], vec![1.0, 2.0]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![0, 1, 2], vec![0, 2], vec![1.0, 2.0]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![1, 1, 2], vec![0, 1], vec![1.0, 2.0]).is_err());
        assert!(CscMatrix::new(2, 2, vec![0, 2, 2], vec![1, 0], vec![1.0, 2.0]).is_err());
    }
}
