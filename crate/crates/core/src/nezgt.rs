//! NEZGT: assigns matrix lines (rows or columns) to `f` fragments so that
//! fragment nonzero loads are balanced.
//!
//! Three phases:
//! 0. sort lines by nonzero count (descending gives LPT, ascending SPT);
//! 1. list scheduling: the first `f` lines seed one fragment each, every
//!    following line goes to the least-loaded fragment;
//! 2. iterative refinement between the most- and least-loaded fragments by
//!    transferring one line or exchanging a pair of lines.

use alloc::vec;
use alloc::vec::Vec;

use crate::sparse::{Axis, CooMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortOrder {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineStrategy {
    /// Accept the first admissible move in scan order.
    FirstImproving,
    /// Accept the admissible move whose size is closest to half the gap.
    BestImproving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefineConfig {
    pub max_iterations: u32,
    pub strategy: RefineStrategy,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            max_iterations: 100,
            strategy: RefineStrategy::BestImproving,
        }
    }
}

/// Assignment of every line along `axis` to one of `loads.len()` fragments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinePartition {
    pub axis: Axis,
    /// Fragment index of each line.
    pub assignment: Vec<usize>,
    /// Nonzero load of each fragment.
    pub loads: Vec<u64>,
}

impl LinePartition {
    pub fn fragment_count(&self) -> usize {
        self.loads.len()
    }

    /// Lines of fragment `k` in ascending index order.
    pub fn lines_of(&self, k: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p == k)
            .map(|(line, _)| line)
            .collect()
    }

    pub fn fragments(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.loads.len()];
        for (line, &k) in self.assignment.iter().enumerate() {
            out[k].push(line);
        }
        out
    }

    pub fn max_load(&self) -> u64 {
        self.loads.iter().copied().max().unwrap_or(0)
    }

    pub fn min_load(&self) -> u64 {
        self.loads.iter().copied().min().unwrap_or(0)
    }

    /// Balance criterion FD: spread between the extreme fragment loads.
    pub fn fd(&self) -> u64 {
        self.max_load() - self.min_load()
    }

    /// Lowest-index fragment carrying the maximum (resp. minimum) load.
    fn extremes(&self) -> (usize, usize) {
        let mut hi = 0;
        let mut lo = 0;
        for (k, &l) in self.loads.iter().enumerate() {
            if l > self.loads[hi] {
                hi = k;
            }
            if l < self.loads[lo] {
                lo = k;
            }
        }
        (hi, lo)
    }
}

/// Phase 0: stable sort of line indices by nonzero count. Equal counts keep
/// ascending line order.
pub fn phase0_sort(counts: &[u64], order: SortOrder) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..counts.len()).collect();
    match order {
        SortOrder::Ascending => idx.sort_by_key(|&i| counts[i]),
        SortOrder::Descending => idx.sort_by(|&a, &b| counts[b].cmp(&counts[a])),
    }
    idx
}

/// Phase 1: list scheduling of `order` over `f` fragments.
///
/// The i-th line of `order` seeds fragment i for `i < f`; every later line
/// goes to the least-loaded fragment, lowest index on ties. With more
/// fragments than lines the surplus fragments stay empty.
pub fn phase1_ls(order: &[usize], counts: &[u64], f: usize, axis: Axis) -> Result<LinePartition> {
    if f == 0 {
        return Err(Error::ZeroFragments);
    }
    let mut assignment = vec![usize::MAX; counts.len()];
    let mut loads = vec![0u64; f];
    for (pos, &line) in order.iter().enumerate() {
        let k = if pos < f { pos } else { least_loaded(&loads) };
        assignment[line] = k;
        loads[k] += counts[line];
    }
    debug_assert!(assignment.iter().all(|&k| k < f));
    Ok(LinePartition {
        axis,
        assignment,
        loads,
    })
}

fn least_loaded(loads: &[u64]) -> usize {
    let mut best = 0;
    for (k, &l) in loads.iter().enumerate().skip(1) {
        if l < loads[best] {
            best = k;
        }
    }
    best
}

/// One accepted phase-2 move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMove {
    Transfer {
        line: usize,
        from: usize,
        to: usize,
    },
    Exchange {
        heavy_line: usize,
        light_line: usize,
        heavy: usize,
        light: usize,
    },
}

/// FD the partition would have after moving `delta` nonzeros from
/// fragment `hi` to fragment `lo`.
fn fd_after(loads: &[u64], hi: usize, lo: usize, delta: u64) -> u64 {
    let mut max = 0;
    let mut min = u64::MAX;
    for (k, &l) in loads.iter().enumerate() {
        let l = if k == hi {
            l - delta
        } else if k == lo {
            l + delta
        } else {
            l
        };
        max = max.max(l);
        min = min.min(l);
    }
    max - min
}

/// Applies one phase-2 move if an admissible one strictly reduces FD.
///
/// Candidates between the most-loaded fragment (`hi`) and the least-loaded
/// one (`lo`), with `diff = load(hi) - load(lo)`:
/// * transfer of a line of `hi` with `0 < nz < diff`;
/// * exchange of a line of `hi` and a line of `lo` with
///   `0 < nz_hi - nz_lo < diff`.
///
/// Lines of `hi` are scanned by descending count (ascending index on ties),
/// transfer before exchanges, exchange partners by descending count.
pub fn refine_step(
    p: &mut LinePartition,
    counts: &[u64],
    strategy: RefineStrategy,
) -> Option<RefineMove> {
    if p.loads.len() < 2 {
        return None;
    }
    let (hi, lo) = p.extremes();
    let diff = p.loads[hi] - p.loads[lo];
    if diff == 0 {
        return None;
    }
    let current_fd = p.fd();
    let by_count_desc = |k: usize| {
        let mut lines = p.lines_of(k);
        lines.sort_by(|&a, &b| counts[b].cmp(&counts[a]));
        lines
    };
    let heavy_lines = by_count_desc(hi);
    let light_lines = by_count_desc(lo);

    // (score, move, delta); score = |diff - 2 * delta| = 2 * |diff/2 - delta|
    let mut best: Option<(u64, RefineMove, u64)> = None;
    let mut consider = |mv: RefineMove, delta: u64| -> bool {
        if fd_after(&p.loads, hi, lo, delta) >= current_fd {
            return false;
        }
        let score = diff.abs_diff(2 * delta);
        match strategy {
            RefineStrategy::FirstImproving => {
                best = Some((score, mv, delta));
                true
            }
            RefineStrategy::BestImproving => {
                if best.is_none_or(|(s, _, _)| score < s) {
                    best = Some((score, mv, delta));
                }
                false
            }
        }
    };

    'scan: for &x in &heavy_lines {
        let nzx = counts[x];
        if nzx > 0 && nzx < diff {
            let mv = RefineMove::Transfer {
                line: x,
                from: hi,
                to: lo,
            };
            if consider(mv, nzx) {
                break 'scan;
            }
        }
        for &y in &light_lines {
            let nzn = counts[y];
            if nzx > nzn && nzx - nzn < diff {
                let mv = RefineMove::Exchange {
                    heavy_line: x,
                    light_line: y,
                    heavy: hi,
                    light: lo,
                };
                if consider(mv, nzx - nzn) {
                    break 'scan;
                }
            }
        }
    }

    let (_, mv, delta) = best?;
    match mv {
        RefineMove::Transfer { line, .. } => p.assignment[line] = lo,
        RefineMove::Exchange {
            heavy_line,
            light_line,
            ..
        } => {
            p.assignment[heavy_line] = lo;
            p.assignment[light_line] = hi;
        }
    }
    p.loads[hi] -= delta;
    p.loads[lo] += delta;
    Some(mv)
}

/// Phase 2: repeats [`refine_step`] until no admissible move strictly reduces
/// FD or `cfg.max_iterations` moves have been applied.
pub fn phase2_refine(p: &LinePartition, counts: &[u64], cfg: &RefineConfig) -> LinePartition {
    let mut out = p.clone();
    for _ in 0..cfg.max_iterations {
        if refine_step(&mut out, counts, cfg.strategy).is_none() {
            break;
        }
    }
    out
}

/// Full NEZGT on the lines of `matrix` along `axis`: descending sort, list
/// scheduling, refinement.
pub fn nezgt_partition(
    matrix: &CooMatrix,
    axis: Axis,
    f: usize,
    cfg: &RefineConfig,
) -> Result<LinePartition> {
    let counts = matrix.line_nnz_counts(axis);
    nezgt_counts(&counts, axis, f, cfg)
}

/// [`nezgt_partition`] on a bare count array.
pub fn nezgt_counts(
    counts: &[u64],
    axis: Axis,
    f: usize,
    cfg: &RefineConfig,
) -> Result<LinePartition> {
    let order = phase0_sort(counts, SortOrder::Descending);
    let p = phase1_ls(&order, counts, f, axis)?;
    Ok(phase2_refine(&p, counts, cfg))
}
