use alloc::vec;
use alloc::vec::Vec;

use super::{CscMatrix, CsrMatrix};
use crate::{Error, Result};

fn check_len(x: &[f64], n_cols: usize) -> Result<()> {
    if x.len() != n_cols {
        return Err(Error::DimensionMismatch {
            expected: n_cols,
            got: x.len(),
        });
    }
    Ok(())
}

/// Row-by-row product `y = A x`. Each `y[i]` accumulates from 0.0 in
/// ascending column order.
pub fn spmv_csr(a: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>> {
    check_len(x, a.n_cols())?;
    let mut y = vec![0.0; a.n_rows()];
    for (i, yi) in y.iter_mut().enumerate() {
        let (cols, vals) = a.row(i);
        let mut acc = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            acc += v * x[j];
        }
        *yi = acc;
    }
    Ok(y)
}

/// Column-oriented product: every column scales `x[j]` into the partial sums
/// of the rows it touches. Columns are visited in ascending order and rows in
/// ascending order within a column, so each `y[i]` sees its terms in the
/// same order as [`spmv_csr`].
pub fn spmv_csc(a: &CscMatrix, x: &[f64]) -> Result<Vec<f64>> {
    check_len(x, a.n_cols())?;
    let mut y = vec![0.0; a.n_rows()];
    for (j, &xj) in x.iter().enumerate() {
        let (rows, vals) = a.column(j);
        for (&i, &v) in rows.iter().zip(vals) {
            y[i] += v * xj;
        }
    }
    Ok(y)
}
