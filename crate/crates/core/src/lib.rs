//! Two-level sparse matrix decomposition for distributed SpMV.
//!
//! The crate partitions a sparse matrix across the nodes of a cluster with the
//! NEZGT load-balancing heuristic (row or column variant), splits every node
//! fragment across the node's cores with a 1D hypergraph partitioner, and
//! replays the distributed product `y = A x` over the resulting plan with a
//! deterministic cost model.
//!
//! Everything here is pure computation on `alloc` collections. File formats,
//! wall-clock execution and the command line live in the `twolevel` crate.
//!
//! ```
//! use twolevel_core::decomposition::{decompose, Combination, DecomposeConfig};
//! use twolevel_core::simulator::simulate;
//! use twolevel_core::sparse::{generate_random_sparse, spmv_csr};
//!
//! let a = generate_random_sparse(60, 60, 0.05, 3).unwrap();
//! let plan = decompose(&a, Combination::NL_HL, 4, 2, &DecomposeConfig::default()).unwrap();
//! let x = vec![1.0; 60];
//! let report = simulate(&plan, &x).unwrap();
//! assert_eq!(report.y, spmv_csr(&a.to_csr(), &x).unwrap());
//! assert!(report.lb_nodes >= 1.0);
//! ```
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod decomposition;
pub mod error;
pub mod hypergraph;
pub mod nezgt;
pub mod simulator;
pub mod sparse;

pub use error::{Error, PlanViolation, Result};
pub use sparse::Axis;
