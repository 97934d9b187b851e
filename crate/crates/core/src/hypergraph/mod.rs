//! Hypergraph models of a sparse matrix and their partitioning.
//!
//! In the 1D row-net model the rows are vertices and every nonempty column is
//! a net over the rows it touches (column-net is the transpose). A vertex
//! weighs as many units as the nets it belongs to, i.e. its nonzero count.
//! The 2D fine-grain model has one vertex per nonzero, of weight 2, and one
//! net per nonempty row and per nonempty column.
//!
//! Partitions are scored with the connectivity-1 metric `sum(lambda_e - 1)`,
//! which equals the number of vector entries communicated by a 1D-partitioned
//! SpMV.

mod fm;
mod multilevel;

use alloc::vec;
use alloc::vec::Vec;

pub use fm::refine_fm;
pub(crate) use multilevel::lpt_makespan;
pub use multilevel::{partition_multilevel, HgConfig};

use crate::sparse::{Axis, CooMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    weights: Vec<u64>,
    nets: Vec<Vec<usize>>,
    /// Nets incident to each vertex, ascending.
    incident: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Validates pins and builds the incidence lists. Pins within a net are
    /// sorted and deduplicated.
    pub fn new(n_vertices: usize, weights: Vec<u64>, nets: Vec<Vec<usize>>) -> Result<Self> {
        if weights.len() != n_vertices {
            return Err(Error::WeightCount {
                expected: n_vertices,
                got: weights.len(),
            });
        }
        let mut clean = Vec::with_capacity(nets.len());
        for (e, mut pins) in nets.into_iter().enumerate() {
            if pins.is_empty() {
                return Err(Error::EmptyNet(e));
            }
            if let Some(&v) = pins.iter().find(|&&v| v >= n_vertices) {
                return Err(Error::InvalidPin {
                    net: e,
                    vertex: v,
                    n_vertices,
                });
            }
            pins.sort_unstable();
            pins.dedup();
            clean.push(pins);
        }
        Ok(Self::from_clean(weights, clean))
    }

    fn from_clean(weights: Vec<u64>, nets: Vec<Vec<usize>>) -> Self {
        let mut incident = vec![Vec::new(); weights.len()];
        for (e, pins) in nets.iter().enumerate() {
            for &v in pins {
                incident[v].push(e);
            }
        }
        Hypergraph {
            weights,
            nets,
            incident,
        }
    }

    /// Builds the model from (vertex, net) incidences. Nets are numbered
    /// `0..n_nets`, empty ones are dropped, and every vertex weighs its
    /// number of distinct incident nets.
    pub fn from_incidence(
        n_vertices: usize,
        n_nets: usize,
        pins: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut nets = vec![Vec::new(); n_nets];
        for (v, e) in pins {
            nets[e].push(v);
        }
        let mut weights = vec![0u64; n_vertices];
        let nets: Vec<Vec<usize>> = nets
            .into_iter()
            .filter(|p| !p.is_empty())
            .map(|mut p| {
                p.sort_unstable();
                p.dedup();
                for &v in &p {
                    weights[v] += 1;
                }
                p
            })
            .collect();
        Self::from_clean(weights, nets)
    }

    pub fn n_vertices(&self) -> usize {
        self.weights.len()
    }

    pub fn n_nets(&self) -> usize {
        self.nets.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn nets(&self) -> &[Vec<usize>] {
        &self.nets
    }

    pub fn net(&self, e: usize) -> &[usize] {
        &self.nets[e]
    }

    pub fn incident_nets(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// Number of pins over all nets.
    pub fn n_pins(&self) -> usize {
        self.nets.iter().map(Vec::len).sum()
    }
}

/// 1D model: `vertex_axis = Row` makes rows the vertices and nonempty columns
/// the nets (row-net / column-split model); `Column` is the transpose.
pub fn build_1d(matrix: &CooMatrix, vertex_axis: Axis) -> Hypergraph {
    let net_axis = vertex_axis.other();
    Hypergraph::from_incidence(
        matrix.n_lines(vertex_axis),
        matrix.n_lines(net_axis),
        matrix
            .entries()
            .iter()
            .map(|e| (e.line(vertex_axis), e.line(net_axis))),
    )
}

/// Fine-grain model: vertex `k` is the k-th stored entry of `matrix`; nets are
/// the nonempty rows (first, ascending) then the nonempty columns.
pub fn build_2d_finegrain(matrix: &CooMatrix) -> Hypergraph {
    let n = matrix.nnz();
    let mut row_nets = vec![Vec::new(); matrix.n_rows()];
    let mut col_nets = vec![Vec::new(); matrix.n_cols()];
    for (k, e) in matrix.entries().iter().enumerate() {
        row_nets[e.row].push(k);
        col_nets[e.col].push(k);
    }
    let nets = row_nets
        .into_iter()
        .chain(col_nets)
        .filter(|p| !p.is_empty())
        .collect();
    Hypergraph::from_clean(vec![2; n], nets)
}

/// A k-way vertex partition with the balance tolerance it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct HgPartition {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub epsilon: f64,
}

impl HgPartition {
    pub fn new(h: &Hypergraph, k: usize, assignment: Vec<usize>, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroParts);
        }
        check_epsilon(epsilon)?;
        if assignment.len() != h.n_vertices() {
            return Err(Error::AssignmentLength {
                expected: h.n_vertices(),
                got: assignment.len(),
            });
        }
        if let Some(&p) = assignment.iter().find(|&&p| p >= k) {
            return Err(Error::LineOutOfRange { index: p, len: k });
        }
        Ok(HgPartition {
            k,
            assignment,
            epsilon,
        })
    }

    pub fn part_weights(&self, h: &Hypergraph) -> Vec<u64> {
        let mut w = vec![0u64; self.k];
        for (v, &p) in self.assignment.iter().enumerate() {
            w[p] += h.weights()[v];
        }
        w
    }

    /// Largest part weight allowed: `floor((1 + epsilon) * W / k)`.
    pub fn capacity(&self, h: &Hypergraph) -> u64 {
        capacity(h.total_weight(), self.k, self.epsilon)
    }

    pub fn is_balanced(&self, h: &Hypergraph) -> bool {
        let cap = self.capacity(h);
        self.part_weights(h).iter().all(|&w| w <= cap)
    }

    /// Vertices of part `p`, ascending.
    pub fn part(&self, p: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &q)| q == p)
            .map(|(v, _)| v)
            .collect()
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// `floor((1 + epsilon) * total / k)`, with a small guard so that products
/// landing exactly on an integer are not rounded down by float error.
pub fn capacity(total: u64, k: usize, epsilon: f64) -> u64 {
    let exact = (1.0 + epsilon) * total as f64 / k as f64;
    (exact + 1e-9) as u64
}

/// Number of distinct parts each net touches.
pub fn connectivity(h: &Hypergraph, assignment: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    h.nets()
        .iter()
        .map(|pins| {
            seen.clear();
            seen.extend(pins.iter().map(|&v| assignment[v]));
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        })
        .collect()
}

/// Number of nets spanning at least two parts.
pub fn cut_hyperedge(h: &Hypergraph, assignment: &[usize]) -> u64 {
    connectivity(h, assignment)
        .into_iter()
        .filter(|&l| l > 1)
        .count() as u64
}

/// Connectivity-1 cut: `sum over nets of (lambda_e - 1)`.
pub fn cut_connectivity(h: &Hypergraph, assignment: &[usize]) -> u64 {
    connectivity(h, assignment)
        .into_iter()
        .map(|l| (l - 1) as u64)
        .sum()
}
