use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CooMatrix, Entry};
use crate::{Error, Result};

/// Random matrix with `round(density * n_rows * n_cols)` distinct
/// coordinates and integer values in `1..=9`. Integer values keep every
/// summation order exact, which the equivalence checks rely on.
pub fn generate_random_sparse(
    n_rows: usize,
    n_cols: usize,
    density: f64,
    seed: u64,
) -> Result<CooMatrix> {
    generate(n_rows, n_cols, density, seed, |rng| {
        f64::from(rng.gen_range(1u8..=9))
    })
}

/// Same coordinates as [`generate_random_sparse`] for a given seed, with
/// values uniform in `[-1, 1)`.
pub fn generate_random_sparse_real(
    n_rows: usize,
    n_cols: usize,
    density: f64,
    seed: u64,
) -> Result<CooMatrix> {
    generate(n_rows, n_cols, density, seed, |rng| {
        rng.gen_range(-1.0..1.0)
    })
}

fn generate(
    n_rows: usize,
    n_cols: usize,
    density: f64,
    seed: u64,
    mut value: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> Result<CooMatrix> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidDensity(density));
    }
    let cells = n_rows * n_cols;
    let target = ((density * cells as f64) + 0.5) as usize;
    let target = target.min(cells);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, cells, target).into_vec();
    picked.sort_unstable();
    // Values are drawn from a second stream so real and integer variants
    // share coordinates.
    let mut vrng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let entries: Vec<Entry> = picked
        .into_iter()
        .map(|cell| Entry::new(cell / n_cols, cell % n_cols, value(&mut vrng)))
        .collect();
    Ok(CooMatrix::from_valid_parts(n_rows, n_cols, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_count() {
        assert_eq!(generate_random_sparse(10, 10, 0.1, 1).unwrap().nnz(), 10);
        let m = generate_random_sparse(100, 100, 0.05, 7).unwrap();
        assert_eq!(m.nnz(), 500);
        assert!(m.entries().iter().all(|e| e.row < 100 && e.col < 100));
        assert!(CooMatrix::new(100, 100, m.entries().to_vec()).is_ok());
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            generate_random_sparse(40, 30, 0.2, 11).unwrap(),
            generate_random_sparse(40, 30, 0.2, 11).unwrap()
        );
        assert_ne!(
            generate_random_sparse(40, 30, 0.2, 11).unwrap(),
            generate_random_sparse(40, 30, 0.2, 12).unwrap()
        );
    }

    #[test]
    fn density_range() {
        assert_eq!(
            generate_random_sparse(5, 5, 0.0, 1).unwrap_err(),
            Error::InvalidDensity(0.0)
        );
        assert!(generate_random_sparse(5, 5, 1.5, 1).is_err());
        assert!(generate_random_sparse(5, 5, f64::NAN, 1).is_err());
        assert_eq!(generate_random_sparse(5, 5, 1.0, 1).unwrap().nnz(), 25);
    }

    #[test]
    fn real_variant_shares_pattern() {
        let a = generate_random_sparse(20, 20, 0.1, 5).unwrap();
        let b = generate_random_sparse_real(20, 20, 0.1, 5).unwrap();
        let ka: Vec<_> = a.entries().iter().map(|e| (e.row, e.col)).collect();
        let kb: Vec<_> = b.entries().iter().map(|e| (e.row, e.col)).collect();
        assert_eq!(ka, kb);
    }
}
