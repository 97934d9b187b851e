//! Replays the distributed product `y = A x` over a [`TwoLevelPlan`].
//!
//! The run has four phases: scatter (every core receives its sub-matrix and
//! the slice of `x` it reads), compute (one local CSR product per core),
//! node construction (core partials are summed or concatenated) and gather
//! (node partials are summed or concatenated by the master). Each phase is a
//! public function so that callers can time them on real threads; the
//! [`simulate`] entry point charges them with a deterministic cost model.

use alloc::vec;
use alloc::vec::Vec;

use crate::decomposition::{validate_plan, Fragment, TwoLevelPlan};
use crate::sparse::{spmv_csr, Axis, CooMatrix, CsrMatrix, Entry};
use crate::{Error, Result};

/// Distinct column indices touched by `fragment`, ascending.
pub fn needed_x_indices(fragment: &Fragment) -> Vec<usize> {
    distinct(fragment.entries().iter().map(|e| e.col))
}

/// Distinct row indices touched by `fragment`, ascending.
pub fn produced_y_indices(fragment: &Fragment) -> Vec<usize> {
    distinct(fragment.entries().iter().map(|e| e.row))
}

fn distinct(it: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = it.collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// `max / mean` over all units, idle ones included.
pub fn load_balance(loads: &[u64]) -> Result<f64> {
    let total: u64 = loads.iter().sum();
    if total == 0 {
        return Err(Error::AllZeroLoads);
    }
    let max = loads.iter().copied().max().unwrap_or(0);
    Ok((max as f64 * loads.len() as f64) / total as f64)
}

/// Exact non-negative rational `num / den`, kept unreduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self * k == n`, compared without rounding.
    pub fn times_equals(self, k: u64, n: u64) -> bool {
        self.num as u128 * k as u128 == n as u128 * self.den as u128
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeComm {
    pub nz: u64,
    /// Distinct entries of `x` the node reads.
    pub c_x: u64,
    /// `N / c_x`; `None` for an empty fragment.
    pub fr_x: Option<Ratio>,
    /// Reals received: `nz + c_x`.
    pub dr: u64,
    /// Reals sent back to the master: distinct rows produced.
    pub de: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommStats {
    pub nodes: Vec<NodeComm>,
}

impl CommStats {
    pub fn sum_dr(&self) -> u64 {
        self.nodes.iter().map(|n| n.dr).sum()
    }

    pub fn sum_de(&self) -> u64 {
        self.nodes.iter().map(|n| n.de).sum()
    }
}

pub fn compute_comm_stats(plan: &TwoLevelPlan) -> CommStats {
    let n = plan.n_cols as u64;
    let nodes = plan
        .nodes
        .iter()
        .map(|node| {
            let nz = node.fragment.nnz() as u64;
            let c_x = needed_x_indices(&node.fragment).len() as u64;
            NodeComm {
                nz,
                c_x,
                fr_x: (c_x > 0).then_some(Ratio { num: n, den: c_x }),
                dr: nz + c_x,
                de: produced_y_indices(&node.fragment).len() as u64,
            }
        })
        .collect();
    CommStats { nodes }
}

/// Entries of `x` read by node `k` but owned by another node under
/// `x_owner`, summed over nodes.
pub fn fanout_volume(plan: &TwoLevelPlan, x_owner: &[usize]) -> Result<u64> {
    if x_owner.len() != plan.n_cols {
        return Err(Error::DimensionMismatch {
            expected: plan.n_cols,
            got: x_owner.len(),
        });
    }
    Ok(plan
        .nodes
        .iter()
        .enumerate()
        .map(|(k, node)| {
            needed_x_indices(&node.fragment)
                .into_iter()
                .filter(|&j| x_owner[j] != k)
                .count() as u64
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingMode {
    CostModel,
    WallClock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionReport {
    pub lb_nodes: f64,
    pub lb_cores: f64,
    pub t_scatter: f64,
    pub t_compute: f64,
    pub t_gather: f64,
    pub t_construct_y: f64,
    pub y: Vec<f64>,
    pub comm: CommStats,
    pub mode: TimingMode,
}

impl ExecutionReport {
    pub fn t_gather_plus_construct(&self) -> f64 {
        self.t_gather + self.t_construct_y
    }

    pub fn t_total(&self) -> f64 {
        self.t_scatter + self.t_compute + self.t_gather + self.t_construct_y
    }
}

/// Sparse result vector: `values[i]` belongs to global row `rows[i]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartialVector {
    pub rows: Vec<usize>,
    pub values: Vec<f64>,
}

impl PartialVector {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, row: usize) -> Option<f64> {
        self.rows.binary_search(&row).ok().map(|i| self.values[i])
    }
}

/// What one core receives: its fragment compacted to the rows it produces
/// and the columns it reads, plus the matching slice of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreTask {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub local: CsrMatrix,
    pub x: Vec<f64>,
}

impl CoreTask {
    pub fn new(fragment: &Fragment, x: &[f64]) -> Self {
        let rows = produced_y_indices(fragment);
        let cols = needed_x_indices(fragment);
        let entries = fragment
            .entries()
            .iter()
            .map(|e| {
                Entry::new(
                    rows.binary_search(&e.row).unwrap_or_default(),
                    cols.binary_search(&e.col).unwrap_or_default(),
                    e.val,
                )
            })
            .collect();
        let local = CooMatrix::from_valid_parts(rows.len(), cols.len(), entries).to_csr();
        let x = cols.iter().map(|&j| x[j]).collect();
        CoreTask {
            rows,
            cols,
            local,
            x,
        }
    }

    pub fn nnz(&self) -> usize {
        self.local.nnz()
    }

    /// The core's fragment-vector product.
    pub fn compute(&self) -> PartialVector {
        let values = spmv_csr(&self.local, &self.x).unwrap_or_default();
        PartialVector {
            rows: self.rows.clone(),
            values,
        }
    }
}

/// Builds every core's task, node-major.
pub fn scatter(plan: &TwoLevelPlan, x: &[f64]) -> Result<Vec<Vec<CoreTask>>> {
    if x.len() != plan.n_cols {
        return Err(Error::DimensionMismatch {
            expected: plan.n_cols,
            got: x.len(),
        });
    }
    Ok(plan
        .nodes
        .iter()
        .map(|node| node.cores.iter().map(|c| CoreTask::new(c, x)).collect())
        .collect())
}

/// Merges partial vectors. Summing (`Axis::Column` splits) adds them in
/// slice order and costs the total length of the vectors summed, or nothing
/// when at most one of them is nonempty; concatenating (`Axis::Row` splits)
/// interleaves disjoint rows and is free.
pub fn combine(split: Axis, parts: &[PartialVector], n_rows: usize) -> (PartialVector, u64) {
    let mut acc = vec![0.0; n_rows];
    let mut hit = vec![false; n_rows];
    let summed = split == Axis::Column && parts.iter().filter(|p| !p.is_empty()).count() > 1;
    let mut cost = 0u64;
    for p in parts {
        if summed {
            cost += p.len() as u64;
        }
        for (&r, &v) in p.rows.iter().zip(&p.values) {
            if hit[r] {
                acc[r] += v;
            } else {
                acc[r] = v;
                hit[r] = true;
            }
        }
    }
    let rows: Vec<usize> = (0..n_rows).filter(|&r| hit[r]).collect();
    let values = rows.iter().map(|&r| acc[r]).collect();
    (PartialVector { rows, values }, cost)
}

/// Final `y` from node partials, plus the master's summation cost.
pub fn assemble(split: Axis, node_parts: &[PartialVector], n_rows: usize) -> (Vec<f64>, u64) {
    let (merged, cost) = combine(split, node_parts, n_rows);
    let mut y = vec![0.0; n_rows];
    for (&r, &v) in merged.rows.iter().zip(&merged.values) {
        y[r] = v;
    }
    (y, cost)
}

/// Runs the plan under the cost model without checking it against a
/// matrix; see [`run_distributed_spmv`] for the checked variant.
///
/// Costs: compute is the largest `2 * nnz` over cores, scatter is `Σ dr_k`,
/// gather is `Σ de_k`, and construction is the total length of the vectors
/// entering a summation (at node level for column intra splits, at the
/// master for column inter splits).
pub fn simulate(plan: &TwoLevelPlan, x: &[f64]) -> Result<ExecutionReport> {
    let tasks = scatter(plan, x)?;
    let comm = compute_comm_stats(plan);
    let intra = plan.combination.intra_axis();
    let inter = plan.combination.inter_axis();

    let mut construct = 0u64;
    let mut node_parts = Vec::with_capacity(tasks.len());
    for node in &tasks {
        let partials: Vec<PartialVector> = node.iter().map(CoreTask::compute).collect();
        let (p, c) = combine(intra, &partials, plan.n_rows);
        construct += c;
        node_parts.push(p);
    }
    let (y, c) = assemble(inter, &node_parts, plan.n_rows);
    construct += c;

    let t_compute = tasks
        .iter()
        .flatten()
        .map(|t| 2 * t.nnz() as u64)
        .max()
        .unwrap_or(0);
    Ok(ExecutionReport {
        lb_nodes: load_balance_or_one(&plan.node_loads()),
        lb_cores: load_balance_or_one(&plan.core_loads()),
        t_scatter: comm.sum_dr() as f64,
        t_compute: t_compute as f64,
        t_gather: comm.sum_de() as f64,
        t_construct_y: construct as f64,
        y,
        comm,
        mode: TimingMode::CostModel,
    })
}

/// An empty matrix is perfectly balanced.
pub fn load_balance_or_one(loads: &[u64]) -> f64 {
    load_balance(loads).unwrap_or(1.0)
}

/// [`simulate`] after checking that `plan` is a valid cover of `matrix`.
pub fn run_distributed_spmv(
    plan: &TwoLevelPlan,
    matrix: &CooMatrix,
    x: &[f64],
) -> Result<ExecutionReport> {
    validate_plan(plan, matrix).map_err(Error::InvalidPlan)?;
    simulate(plan, x)
}
