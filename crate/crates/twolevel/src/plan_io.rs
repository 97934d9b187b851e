//! Line-oriented plan format.
//!
//! ```text
//! # combination NC-HC
//! # nodes 2 cores 4
//! # shape 15x15
//! # node 0 col 0 4 6 7 8 11 12 13
//! # node 1 col 1 2 3 5 9 10 14
//! 0 0 col 6 12
//! 0 1 col 0 8 13
//! ...
//! ```
//!
//! The `# node` lines carry the inter-node line sets, and every other
//! record is one core fragment: `node core axis lines...`.

use std::fmt::Write as _;

use thiserror::Error;
use twolevel_core::decomposition::{from_line_sets, Combination, TwoLevelPlan};
use twolevel_core::sparse::CooMatrix;
use twolevel_core::Axis;

#[derive(Debug, Error)]
pub enum PlanFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `# {0}` header")]
    MissingHeader(&'static str),
    #[error("plan shape {plan:?} does not match matrix {matrix:?}")]
    Shape {
        plan: (usize, usize),
        matrix: (usize, usize),
    },
    #[error("no record for node {node} core {core}")]
    MissingRecord { node: usize, core: usize },
    #[error(transparent)]
    Plan(#[from] twolevel_core::Error),
}

fn join(lines: &[usize]) -> String {
    let mut s = String::new();
    for l in lines {
        let _ = write!(s, " {l}");
    }
    s
}

pub fn write_plan(plan: &TwoLevelPlan) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# combination {}", plan.combination);
    let _ = writeln!(
        out,
        "# nodes {} cores {}",
        plan.n_nodes, plan.cores_per_node
    );
    let _ = writeln!(out, "# shape {}x{}", plan.n_rows, plan.n_cols);
    for (k, node) in plan.nodes.iter().enumerate() {
        let f = &node.fragment;
        let _ = writeln!(out, "# node {k} {}{}", f.axis.token(), join(&f.lines));
    }
    for (k, node) in plan.nodes.iter().enumerate() {
        for (c, core) in node.cores.iter().enumerate() {
            let _ = writeln!(out, "{k} {c} {}{}", core.axis.token(), join(&core.lines));
        }
    }
    out
}

/// Rebuilds a plan over `matrix` from [`write_plan`] output. The result is
/// validated as an exact cover of `matrix`.
pub fn read_plan(text: &str, matrix: &CooMatrix) -> Result<TwoLevelPlan, PlanFormatError> {
    let mut combination = None;
    let mut counts = None;
    let mut shape = None;
    let mut node_lines: Vec<Option<Vec<usize>>> = Vec::new();
    let mut core_lines: Vec<Vec<Option<Vec<usize>>>> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: &str| PlanFormatError::Syntax {
            line,
            message: message.to_string(),
        };
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(meta) = t.strip_prefix('#') {
            let tok: Vec<&str> = meta.split_whitespace().collect();
            match tok.first().copied() {
                Some("combination") => {
                    let c = tok.get(1).ok_or_else(|| err("missing combination"))?;
                    combination = Some(c.parse::<Combination>().map_err(|e| err(&e.to_string()))?);
                }
                Some("nodes") => {
                    let (f, fc) = match tok[..] {
                        [_, f, "cores", fc] => (f.parse::<usize>(), fc.parse::<usize>()),
                        _ => return Err(err("expected `# nodes F cores FC`")),
                    };
                    let (f, fc) = (
                        f.map_err(|_| err("bad node count"))?,
                        fc.map_err(|_| err("bad core count"))?,
                    );
                    node_lines = vec![None; f];
                    core_lines = vec![vec![None; fc]; f];
                    counts = Some((f, fc));
                }
                Some("shape") => {
                    let dims = tok.get(1).and_then(|s| s.split_once('x'));
                    let parsed = dims.and_then(|(r, c)| Some((r.parse().ok()?, c.parse().ok()?)));
                    shape = Some(parsed.ok_or_else(|| err("expected `# shape RxC`"))?);
                }
                Some("node") => {
                    let c = combination.ok_or(PlanFormatError::MissingHeader("combination"))?;
                    if counts.is_none() {
                        return Err(PlanFormatError::MissingHeader("nodes"));
                    }
                    let k = parse_index(tok.get(1), node_lines.len())
                        .ok_or_else(|| err("bad node index"))?;
                    expect_axis(tok.get(2), c.inter_axis())
                        .ok_or_else(|| err("node axis does not match combination"))?;
                    let lines = parse_lines(&tok[3..]).ok_or_else(|| err("bad line index"))?;
                    node_lines[k] = Some(lines);
                }
                _ => {}
            }
            continue;
        }
        let c = combination.ok_or(PlanFormatError::MissingHeader("combination"))?;
        if counts.is_none() {
            return Err(PlanFormatError::MissingHeader("nodes"));
        }
        let tok: Vec<&str> = t.split_whitespace().collect();
        let k = parse_index(tok.first(), core_lines.len()).ok_or_else(|| err("bad node index"))?;
        let fc = core_lines[k].len();
        let j = parse_index(tok.get(1), fc).ok_or_else(|| err("bad core index"))?;
        expect_axis(tok.get(2), c.intra_axis())
            .ok_or_else(|| err("core axis does not match combination"))?;
        let lines =
            parse_lines(tok.get(3..).unwrap_or(&[])).ok_or_else(|| err("bad line index"))?;
        core_lines[k][j] = Some(lines);
    }

    let combination = combination.ok_or(PlanFormatError::MissingHeader("combination"))?;
    counts.ok_or(PlanFormatError::MissingHeader("nodes"))?;
    let shape = shape.ok_or(PlanFormatError::MissingHeader("shape"))?;
    if shape != (matrix.n_rows(), matrix.n_cols()) {
        return Err(PlanFormatError::Shape {
            plan: shape,
            matrix: (matrix.n_rows(), matrix.n_cols()),
        });
    }
    let node_lines = node_lines
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or(PlanFormatError::MissingHeader("node"))?;
    let mut cores = Vec::with_capacity(core_lines.len());
    for (k, row) in core_lines.into_iter().enumerate() {
        let mut node = Vec::with_capacity(row.len());
        for (c, lines) in row.into_iter().enumerate() {
            node.push(lines.ok_or(PlanFormatError::MissingRecord { node: k, core: c })?);
        }
        cores.push(node);
    }
    Ok(from_line_sets(matrix, combination, &node_lines, &cores)?)
}

fn parse_index(tok: Option<&&str>, bound: usize) -> Option<usize> {
    tok?.parse::<usize>().ok().filter(|&i| i < bound)
}

fn expect_axis(tok: Option<&&str>, axis: Axis) -> Option<()> {
    (Axis::from_token(tok?)? == axis).then_some(())
}

fn parse_lines(tok: &[&str]) -> Option<Vec<usize>> {
    tok.iter().map(|t| t.parse().ok()).collect()
}
