//! Two-level plans: NEZGT splits the matrix lines across nodes, then a 1D
//! hypergraph partition splits every node fragment across that node's cores.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::hypergraph::{
    capacity, check_epsilon, lpt_makespan, partition_multilevel, HgConfig, Hypergraph,
};
use crate::nezgt::{nezgt_partition, RefineConfig};
use crate::sparse::{Axis, CooMatrix, Entry};
use crate::{Error, PlanViolation, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterMethod {
    NezgtRow,
    NezgtColumn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntraMethod {
    HyperRow,
    HyperColumn,
}

impl InterMethod {
    pub fn axis(self) -> Axis {
        match self {
            InterMethod::NezgtRow => Axis::Row,
            InterMethod::NezgtColumn => Axis::Column,
        }
    }
}

impl IntraMethod {
    pub fn axis(self) -> Axis {
        match self {
            IntraMethod::HyperRow => Axis::Row,
            IntraMethod::HyperColumn => Axis::Column,
        }
    }
}

/// Inter-node method crossed with intra-node method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Combination {
    pub inter: InterMethod,
    pub intra: IntraMethod,
}

impl Combination {
    pub const NC_HC: Combination = Combination {
        inter: InterMethod::NezgtColumn,
        intra: IntraMethod::HyperColumn,
    };
    pub const NC_HL: Combination = Combination {
        inter: InterMethod::NezgtColumn,
        intra: IntraMethod::HyperRow,
    };
    pub const NL_HC: Combination = Combination {
        inter: InterMethod::NezgtRow,
        intra: IntraMethod::HyperColumn,
    };
    pub const NL_HL: Combination = Combination {
        inter: InterMethod::NezgtRow,
        intra: IntraMethod::HyperRow,
    };
    pub const ALL: [Combination; 4] = [Self::NC_HC, Self::NC_HL, Self::NL_HC, Self::NL_HL];

    pub fn name(self) -> &'static str {
        match (self.inter, self.intra) {
            (InterMethod::NezgtColumn, IntraMethod::HyperColumn) => "NC-HC",
            (InterMethod::NezgtColumn, IntraMethod::HyperRow) => "NC-HL",
            (InterMethod::NezgtRow, IntraMethod::HyperColumn) => "NL-HC",
            (InterMethod::NezgtRow, IntraMethod::HyperRow) => "NL-HL",
        }
    }

    pub fn inter_axis(self) -> Axis {
        self.inter.axis()
    }

    pub fn intra_axis(self) -> Axis {
        self.intra.axis()
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownCombination;

impl fmt::Display for UnknownCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one of NC-HC, NC-HL, NL-HC, NL-HL")
    }
}

impl core::error::Error for UnknownCombination {}

impl FromStr for Combination {
    type Err = UnknownCombination;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Combination::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or(UnknownCombination)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Node,
    Core,
}

/// Lines owned by one node or core, with the nonzeros they hold in original
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub level: Level,
    pub axis: Axis,
    /// Owned line indices, ascending.
    pub lines: Vec<usize>,
    /// Same shape as the full matrix, restricted to the owned lines.
    pub sub: CooMatrix,
}

impl Fragment {
    pub fn nnz(&self) -> usize {
        self.sub.nnz()
    }

    pub fn is_empty(&self) -> bool {
        self.sub.nnz() == 0
    }

    pub fn entries(&self) -> &[Entry] {
        self.sub.entries()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeFragment {
    pub fragment: Fragment,
    pub cores: Vec<Fragment>,
}

/// Node fragments, each holding its core fragments. Fields are public so
/// that plans read from files or built by hand can be checked with
/// [`validate_plan`].
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelPlan {
    pub combination: Combination,
    pub n_rows: usize,
    pub n_cols: usize,
    pub n_nodes: usize,
    pub cores_per_node: usize,
    pub nodes: Vec<NodeFragment>,
}

impl TwoLevelPlan {
    pub fn nnz(&self) -> usize {
        self.nodes.iter().map(|n| n.fragment.nnz()).sum()
    }

    pub fn node_loads(&self) -> Vec<u64> {
        self.nodes.iter().map(|n| n.fragment.nnz() as u64).collect()
    }

    /// Loads of all cores, node-major.
    pub fn core_loads(&self) -> Vec<u64> {
        self.nodes
            .iter()
            .flat_map(|n| n.cores.iter().map(|c| c.nnz() as u64))
            .collect()
    }

    /// Node owning each line along the inter-node axis.
    pub fn inter_line_owner(&self) -> Vec<Option<usize>> {
        let n = match self.combination.inter_axis() {
            Axis::Row => self.n_rows,
            Axis::Column => self.n_cols,
        };
        let mut owner = vec![None; n];
        for (k, node) in self.nodes.iter().enumerate() {
            for &l in &node.fragment.lines {
                owner[l] = Some(k);
            }
        }
        owner
    }

    /// Row owners for an inter=Row plan, `None` otherwise.
    pub fn row_owner(&self) -> Option<Vec<Option<usize>>> {
        (self.combination.inter_axis() == Axis::Row).then(|| self.inter_line_owner())
    }

    /// Column owners for an inter=Column plan, `None` otherwise.
    pub fn col_owner(&self) -> Option<Vec<Option<usize>>> {
        (self.combination.inter_axis() == Axis::Column).then(|| self.inter_line_owner())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecomposeConfig {
    pub nezgt: RefineConfig,
    pub hypergraph: HgConfig,
}

/// Restricts `matrix` to the lines `lines` along `axis`.
pub fn extract_fragment(
    matrix: &CooMatrix,
    lines: &[usize],
    axis: Axis,
    level: Level,
) -> Result<Fragment> {
    let n = matrix.n_lines(axis);
    let mut mask = vec![false; n];
    for &l in lines {
        if l >= n {
            return Err(Error::LineOutOfRange { index: l, len: n });
        }
        if mask[l] {
            return Err(Error::DuplicateLine(l));
        }
        mask[l] = true;
    }
    let mut sorted = lines.to_vec();
    sorted.sort_unstable();
    Ok(Fragment {
        level,
        axis,
        lines: sorted,
        sub: matrix.restrict(axis, |l| mask[l]),
    })
}

/// Builds the plan for `combination` with `f` nodes and `fc` cores per node.
pub fn decompose(
    matrix: &CooMatrix,
    combination: Combination,
    f: usize,
    fc: usize,
    cfg: &DecomposeConfig,
) -> Result<TwoLevelPlan> {
    if fc == 0 {
        return Err(Error::ZeroParts);
    }
    let inter_axis = combination.inter_axis();
    let intra_axis = combination.intra_axis();
    let lp = nezgt_partition(matrix, inter_axis, f, &cfg.nezgt)?;
    let mut nodes = Vec::with_capacity(f);
    for (k, lines) in lp.fragments().into_iter().enumerate() {
        let fragment = extract_fragment(matrix, &lines, inter_axis, Level::Node)?;
        let hg = HgConfig {
            seed: cfg
                .hypergraph
                .seed
                .wrapping_add((k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            ..cfg.hypergraph
        };
        let core_lines = intra_partition(&fragment, intra_axis, fc, &hg)?;
        let cores = core_lines
            .iter()
            .map(|l| extract_fragment(&fragment.sub, l, intra_axis, Level::Core))
            .collect::<Result<Vec<_>>>()?;
        nodes.push(NodeFragment { fragment, cores });
    }
    Ok(TwoLevelPlan {
        combination,
        n_rows: matrix.n_rows(),
        n_cols: matrix.n_cols(),
        n_nodes: f,
        cores_per_node: fc,
        nodes,
    })
}

/// Splits a node fragment's lines along `axis` into `fc` core line sets with
/// the 1D hypergraph partitioner.
///
/// Vertices are the fragment's nonempty lines along `axis`; nets are the
/// lines along the other axis. Lines without nonzeros in the fragment (only
/// possible when `axis` is the node's own axis) are attached afterwards to
/// the least-loaded core. When the configured tolerance is tighter than
/// what heaviest-first list scheduling achieves, the capacity is raised to
/// that schedule's makespan, which is always feasible.
pub fn intra_partition(
    node: &Fragment,
    axis: Axis,
    fc: usize,
    cfg: &HgConfig,
) -> Result<Vec<Vec<usize>>> {
    if fc == 0 {
        return Err(Error::ZeroParts);
    }
    let sub = &node.sub;
    let counts = sub.line_nnz_counts(axis);
    let universe: Vec<usize> = if axis == node.axis {
        node.lines.clone()
    } else {
        (0..counts.len()).filter(|&l| counts[l] > 0).collect()
    };
    let (nonempty, empty): (Vec<usize>, Vec<usize>) =
        universe.iter().partition(|&&l| counts[l] > 0);

    let mut local = vec![usize::MAX; counts.len()];
    for (i, &l) in nonempty.iter().enumerate() {
        local[l] = i;
    }
    let other = axis.other();
    let h = Hypergraph::from_incidence(
        nonempty.len(),
        sub.n_lines(other),
        sub.entries()
            .iter()
            .map(|e| (local[e.line(axis)], e.line(other))),
    );

    let assignment = if fc == 1 || nonempty.is_empty() {
        vec![0; nonempty.len()]
    } else {
        check_epsilon(cfg.epsilon)?;
        let total = h.total_weight();
        let needed = lpt_makespan(&h, fc);
        let cfg = if needed <= capacity(total, fc, cfg.epsilon) {
            *cfg
        } else {
            HgConfig {
                epsilon: needed as f64 * fc as f64 / total as f64 - 1.0,
                ..*cfg
            }
        };
        partition_multilevel(&h, fc, &cfg)?.assignment
    };

    let mut cores = vec![Vec::new(); fc];
    let mut loads = vec![0u64; fc];
    for (i, &p) in assignment.iter().enumerate() {
        cores[p].push(nonempty[i]);
        loads[p] += h.weights()[i];
    }
    let lightest = (0..fc).min_by_key(|&p| (loads[p], p)).unwrap_or(0);
    cores[lightest].extend(empty);
    for c in &mut cores {
        c.sort_unstable();
    }
    Ok(cores)
}

/// Builds a plan from explicit line sets: `node_lines[k]` along the inter
/// axis and `core_lines[k][c]` along the intra axis. The result is checked
/// with [`validate_plan`].
pub fn from_line_sets(
    matrix: &CooMatrix,
    combination: Combination,
    node_lines: &[Vec<usize>],
    core_lines: &[Vec<Vec<usize>>],
) -> Result<TwoLevelPlan> {
    if node_lines.is_empty() {
        return Err(Error::ZeroFragments);
    }
    if core_lines.len() != node_lines.len() {
        return Err(Error::InvalidPlan(PlanViolation::NodeCount {
            expected: node_lines.len(),
            got: core_lines.len(),
        }));
    }
    let fc = core_lines[0].len();
    let mut nodes = Vec::with_capacity(node_lines.len());
    for (k, (lines, cores)) in node_lines.iter().zip(core_lines).enumerate() {
        if cores.len() != fc {
            return Err(Error::InvalidPlan(PlanViolation::CoreCount {
                node: k,
                expected: fc,
                got: cores.len(),
            }));
        }
        let fragment = extract_fragment(matrix, lines, combination.inter_axis(), Level::Node)?;
        let cores = cores
            .iter()
            .map(|l| extract_fragment(&fragment.sub, l, combination.intra_axis(), Level::Core))
            .collect::<Result<Vec<_>>>()?;
        nodes.push(NodeFragment { fragment, cores });
    }
    let plan = TwoLevelPlan {
        combination,
        n_rows: matrix.n_rows(),
        n_cols: matrix.n_cols(),
        n_nodes: node_lines.len(),
        cores_per_node: fc,
        nodes,
    };
    validate_plan(&plan, matrix).map_err(Error::InvalidPlan)?;
    Ok(plan)
}

/// Checks that `plan` is a well-formed two-level cover of `matrix`:
/// shape, node and core counts, axes and levels, then exact cover of the
/// nonzeros at node level and at core level, then that every entry lies on
/// its fragment's lines (and, for cores, inside the parent node).
pub fn validate_plan(
    plan: &TwoLevelPlan,
    matrix: &CooMatrix,
) -> core::result::Result<(), PlanViolation> {
    if (plan.n_rows, plan.n_cols) != (matrix.n_rows(), matrix.n_cols()) {
        return Err(PlanViolation::Shape {
            expected: (matrix.n_rows(), matrix.n_cols()),
            got: (plan.n_rows, plan.n_cols),
        });
    }
    if plan.nodes.len() != plan.n_nodes {
        return Err(PlanViolation::NodeCount {
            expected: plan.n_nodes,
            got: plan.nodes.len(),
        });
    }
    let inter = plan.combination.inter_axis();
    let intra = plan.combination.intra_axis();
    for (k, node) in plan.nodes.iter().enumerate() {
        if node.cores.len() != plan.cores_per_node {
            return Err(PlanViolation::CoreCount {
                node: k,
                expected: plan.cores_per_node,
                got: node.cores.len(),
            });
        }
        if node.fragment.level != Level::Node || node.fragment.axis != inter {
            return Err(PlanViolation::Axis {
                node: k,
                core: None,
            });
        }
        for (c, core) in node.cores.iter().enumerate() {
            if core.level != Level::Core || core.axis != intra {
                return Err(PlanViolation::Axis {
                    node: k,
                    core: Some(c),
                });
            }
        }
    }

    let mut keys: Vec<(usize, usize)> = matrix.entries().iter().map(|e| (e.row, e.col)).collect();
    keys.sort_unstable();
    let cover = |fragments: &mut dyn Iterator<Item = &Fragment>| {
        let mut seen = vec![false; keys.len()];
        for frag in fragments {
            for e in frag.entries() {
                let Ok(i) = keys.binary_search(&(e.row, e.col)) else {
                    return Err(PlanViolation::Foreign {
                        row: e.row,
                        col: e.col,
                    });
                };
                if seen[i] {
                    return Err(PlanViolation::Duplicate {
                        row: e.row,
                        col: e.col,
                    });
                }
                seen[i] = true;
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(i) => Err(PlanViolation::Uncovered {
                row: keys[i].0,
                col: keys[i].1,
            }),
            None => Ok(()),
        }
    };
    cover(&mut plan.nodes.iter().map(|n| &n.fragment))?;
    cover(&mut plan.nodes.iter().flat_map(|n| n.cores.iter()))?;

    let owns = |frag: &Fragment, e: &Entry| frag.lines.binary_search(&e.line(frag.axis)).is_ok();
    for (k, node) in plan.nodes.iter().enumerate() {
        for e in node.fragment.entries() {
            if !owns(&node.fragment, e) {
                return Err(PlanViolation::Misplaced {
                    node: k,
                    core: None,
                    row: e.row,
                    col: e.col,
                });
            }
        }
        for (c, core) in node.cores.iter().enumerate() {
            for e in core.entries() {
                if !owns(core, e) || !owns(&node.fragment, e) {
                    return Err(PlanViolation::Misplaced {
                        node: k,
                        core: Some(c),
                        row: e.row,
                        col: e.col,
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::generate_random_sparse;

    #[test]
    fn combination_names_round_trip() {
        for c in Combination::ALL {
            assert_eq!(c.name().parse::<Combination>().unwrap(), c);
        }
        assert_eq!("nl-hl".parse::<Combination>().unwrap(), Combination::NL_HL);
        assert!("NL-NC".parse::<Combination>().is_err());
    }

    #[test]
    fn extract_validates_lines() {
        let m = CooMatrix::identity(3);
        assert_eq!(
            extract_fragment(&m, &[0, 3], Axis::Row, Level::Node).unwrap_err(),
            Error::LineOutOfRange { index: 3, len: 3 }
        );
        assert_eq!(
            extract_fragment(&m, &[1, 1], Axis::Row, Level::Node).unwrap_err(),
            Error::DuplicateLine(1)
        );
        let empty = extract_fragment(&m, &[], Axis::Column, Level::Core).unwrap();
        assert!(empty.is_empty());
        let all = extract_fragment(&m, &[2, 0, 1], Axis::Column, Level::Core).unwrap();
        assert_eq!(all.sub, m);
        assert_eq!(all.lines, [0, 1, 2]);
    }

    #[test]
    fn single_node_single_core_is_whole_matrix() {
        let m = generate_random_sparse(30, 30, 0.1, 2).unwrap();
        for c in Combination::ALL {
            let plan = decompose(&m, c, 1, 1, &DecomposeConfig::default()).unwrap();
            assert_eq!(plan.nodes.len(), 1);
            assert_eq!(plan.nodes[0].cores[0].nnz(), m.nnz());
            validate_plan(&plan, &m).unwrap();
        }
    }

    #[test]
    fn surplus_cores_are_empty() {
        let m = CooMatrix::from_triplets(4, 4, [(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let plan = decompose(&m, Combination::NL_HL, 2, 4, &DecomposeConfig::default()).unwrap();
        validate_plan(&plan, &m).unwrap();
        assert!(plan.nodes.iter().all(|n| n.cores.len() == 4));
        assert_eq!(plan.core_loads().iter().filter(|&&l| l == 0).count(), 6);
    }

    #[test]
    fn validation_locates_problems() {
        let m = generate_random_sparse(20, 20, 0.2, 4).unwrap();
        let plan = decompose(&m, Combination::NC_HC, 2, 2, &DecomposeConfig::default()).unwrap();
        validate_plan(&plan, &m).unwrap();

        let mut dup = plan.clone();
        let e = dup.nodes[0].cores[0].entries()[0];
        let target = &mut dup.nodes[0].cores[1];
        let mut entries = target.sub.entries().to_vec();
        entries.push(e);
        target.sub = CooMatrix::new(20, 20, entries).unwrap();
        assert_eq!(
            validate_plan(&dup, &m).unwrap_err(),
            PlanViolation::Duplicate {
                row: e.row,
                col: e.col
            }
        );

        let mut missing = plan.clone();
        let core = &mut missing.nodes[1].cores[0];
        let mut entries = core.sub.entries().to_vec();
        let gone = entries.pop().unwrap();
        core.sub = CooMatrix::new(20, 20, entries).unwrap();
        assert_eq!(
            validate_plan(&missing, &m).unwrap_err(),
            PlanViolation::Uncovered {
                row: gone.row,
                col: gone.col
            }
        );
        assert_eq!(
            alloc::format!("{}", PlanViolation::Uncovered { row: 3, col: 4 }),
            "uncovered nonzero (3,4)"
        );

        let mut counts = plan.clone();
        counts.nodes[0].cores.pop();
        assert!(matches!(
            validate_plan(&counts, &m).unwrap_err(),
            PlanViolation::CoreCount { node: 0, .. }
        ));

        let mut axes = plan.clone();
        axes.nodes[1].fragment.axis = Axis::Row;
        assert_eq!(
            validate_plan(&axes, &m).unwrap_err(),
            PlanViolation::Axis {
                node: 1,
                core: None
            }
        );
    }

    #[test]
    fn decompose_rejects_zero_counts() {
        let m = CooMatrix::identity(4);
        let cfg = DecomposeConfig::default();
        assert_eq!(
            decompose(&m, Combination::NL_HL, 0, 1, &cfg).unwrap_err(),
            Error::ZeroFragments
        );
        assert_eq!(
            decompose(&m, Combination::NL_HL, 1, 0, &cfg).unwrap_err(),
            Error::ZeroParts
        );
    }
}
