//! Sparse storage (COO, CSR, CSC), sequential SpMV kernels and synthetic
//! matrix generation.
//!
//! Indices are 0-based everywhere. Explicitly stored zeros are ordinary
//! entries: they count toward NNZ and toward every load derived from it.

mod compressed;
mod coo;
mod generate;
mod kernels;

pub use compressed::{CscMatrix, CsrMatrix};
pub use coo::{CooMatrix, Entry};
pub use generate::{generate_random_sparse, generate_random_sparse_real};
pub use kernels::{spmv_csc, spmv_csr};

/// Orientation of a matrix line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Row,
    Column,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Row => Axis::Column,
            Axis::Column => Axis::Row,
        }
    }

    /// Short token used in text formats: `row` or `col`.
    pub fn token(self) -> &'static str {
        match self {
            Axis::Row => "row",
            Axis::Column => "col",
        }
    }

    pub fn from_token(token: &str) -> Option<Axis> {
        match token {
            "row" => Some(Axis::Row),
            "col" => Some(Axis::Column),
            _ => None,
        }
    }
}
