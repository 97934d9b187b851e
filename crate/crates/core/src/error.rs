use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("entry ({row}, {col}) lies outside the {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("duplicate entry ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("density {0} is outside (0, 1]")]
    InvalidDensity(f64),
    #[error("fragment count must be at least 1")]
    ZeroFragments,
    #[error("part count must be at least 1")]
    ZeroParts,
    #[error("balance tolerance {0} must be finite and non-negative")]
    InvalidEpsilon(f64),
    #[error(
        "hypergraph net {net} references vertex {vertex} but there are only {n_vertices} vertices"
    )]
    InvalidPin {
        net: usize,
        vertex: usize,
        n_vertices: usize,
    },
    #[error("hypergraph net {0} is empty")]
    EmptyNet(usize),
    #[error("vertex weight array has {got} entries for {expected} vertices")]
    WeightCount { expected: usize, got: usize },
    #[error("partition assigns {got} vertices, hypergraph has {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("balance infeasible: vertex {vertex} of weight {weight} exceeds the part capacity {capacity}")]
    VertexTooHeavy {
        vertex: usize,
        weight: u64,
        capacity: u64,
    },
    #[error("balance infeasible: no assignment found with part weights at most {capacity}")]
    BalanceInfeasible { capacity: u64 },
    #[error("line index {index} out of range for {len} lines")]
    LineOutOfRange { index: usize, len: usize },
    #[error("line index {0} listed twice")]
    DuplicateLine(usize),
    #[error("all loads are zero")]
    AllZeroLoads,
    #[error("invalid plan: {0}")]
    InvalidPlan(PlanViolation),
}

/// First invariant a [`TwoLevelPlan`](crate::decomposition::TwoLevelPlan) breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanViolation {
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },
    NodeCount {
        expected: usize,
        got: usize,
    },
    CoreCount {
        node: usize,
        expected: usize,
        got: usize,
    },
    Axis {
        node: usize,
        core: Option<usize>,
    },
    /// An entry that the fragment's line set does not own.
    Misplaced {
        node: usize,
        core: Option<usize>,
        row: usize,
        col: usize,
    },
    Foreign {
        row: usize,
        col: usize,
    },
    Duplicate {
        row: usize,
        col: usize,
    },
    Uncovered {
        row: usize,
        col: usize,
    },
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape { expected, got } => write!(
                f,
                "plan shape {}x{} does not match matrix shape {}x{}",
                got.0, got.1, expected.0, expected.1
            ),
            Self::NodeCount { expected, got } => {
                write!(f, "expected {expected} node fragments, found {got}")
            }
            Self::CoreCount {
                node,
                expected,
                got,
            } => write!(
                f,
                "node {node}: expected {expected} core fragments, found {got}"
            ),
            Self::Axis {
                node,
                core: Some(core),
            } => write!(f, "core fragment {node}.{core} has the wrong axis or level"),
            Self::Axis { node, core: None } => {
                write!(f, "node fragment {node} has the wrong axis or level")
            }
            Self::Misplaced {
                node,
                core: Some(core),
                row,
                col,
            } => write!(
                f,
                "core fragment {node}.{core} holds ({row},{col}) outside its lines"
            ),
            Self::Misplaced {
                node,
                core: None,
                row,
                col,
            } => write!(
                f,
                "node fragment {node} holds ({row},{col}) outside its lines"
            ),
            Self::Foreign { row, col } => write!(f, "nonzero ({row},{col}) is not in the matrix"),
            Self::Duplicate { row, col } => write!(f, "duplicate nonzero ({row},{col})"),
            Self::Uncovered { row, col } => write!(f, "uncovered nonzero ({row},{col})"),
        }
    }
}
