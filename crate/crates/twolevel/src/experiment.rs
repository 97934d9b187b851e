//! Experiment drivers behind the `run`, `verify` and `partition` commands.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twolevel_core::decomposition::{decompose, Combination, DecomposeConfig, TwoLevelPlan};
use twolevel_core::hypergraph::{
    build_1d, cut_connectivity, cut_hyperedge, partition_multilevel, HgConfig,
};
use twolevel_core::nezgt::{nezgt_partition, RefineConfig};
use twolevel_core::simulator::{simulate, ExecutionReport, TimingMode};
use twolevel_core::sparse::{generate_random_sparse, spmv_csr, CooMatrix, Entry};
use twolevel_core::Axis;

use crate::error::AppError;
use crate::mtx::read_matrix_market;
use crate::plan_io::write_plan;
use crate::report::CsvRow;
use crate::wallclock::simulate_wallclock_median;

pub const WALLCLOCK_REPS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    Path(PathBuf),
    Random { n: usize, density: f64, seed: u64 },
}

impl MatrixSource {
    /// Loads the matrix and returns it with a display name.
    pub fn load(&self) -> Result<(String, CooMatrix), AppError> {
        match self {
            MatrixSource::Path(p) => {
                let m = read_matrix_market(p)?;
                let name = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| p.display().to_string());
                Ok((name, m))
            }
            MatrixSource::Random { n, density, seed } => {
                let m = generate_random_sparse(*n, *n, *density, *seed)?;
                Ok((format!("random-{n}-{density}"), m))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: MatrixSource,
    pub combinations: Vec<Combination>,
    pub node_counts: Vec<usize>,
    pub cores_per_node: usize,
    pub mode: TimingMode,
    pub seed: u64,
    pub refine_iters: u32,
    pub epsilon: f64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub plan_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(source: MatrixSource) -> Self {
        ExperimentConfig {
            source,
            combinations: Combination::ALL.to_vec(),
            node_counts: vec![2, 4, 8, 16, 32, 64],
            cores_per_node: 4,
            mode: TimingMode::CostModel,
            seed: 0,
            refine_iters: RefineConfig::default().max_iterations,
            epsilon: HgConfig::default().epsilon,
            workers: 1,
            out: None,
            plan_dir: None,
        }
    }

    pub fn validate(&self) -> Result<(), AppError> {
        let fail = |m: &str| Err(AppError::Config(m.to_string()));
        if self.node_counts.is_empty() {
            return fail("node count list is empty");
        }
        if self.node_counts.contains(&0) {
            return fail("node counts must be at least 1");
        }
        if self.cores_per_node == 0 {
            return fail("cores per node must be at least 1");
        }
        if self.combinations.is_empty() {
            return fail("combination list is empty");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return fail("epsilon must be a finite non-negative number");
        }
        Ok(())
    }

    pub fn decompose_config(&self) -> DecomposeConfig {
        DecomposeConfig {
            nezgt: RefineConfig {
                max_iterations: self.refine_iters,
                ..RefineConfig::default()
            },
            hypergraph: HgConfig {
                epsilon: self.epsilon,
                seed: self.seed,
                ..HgConfig::default()
            },
        }
    }
}

/// Largest deviation between a distributed and the sequential product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub max_abs: f64,
    /// Row of the largest deviation, if any row exceeds the tolerance.
    pub failing_row: Option<usize>,
}

impl Deviation {
    pub fn passed(&self) -> bool {
        self.failing_row.is_none()
    }
}

/// Compares `y` with `A x` row by row. The tolerance of row `i` is
/// `1e-12 * max(1, Σ_j |a_ij x_j|)`, which admits reassociation error only.
pub fn compare_with_sequential(
    matrix: &CooMatrix,
    x: &[f64],
    y: &[f64],
) -> Result<Deviation, AppError> {
    let expected = spmv_csr(&matrix.to_csr(), x)?;
    let abs: Vec<Entry> = matrix
        .entries()
        .iter()
        .map(|e| Entry::new(e.row, e.col, e.val.abs()))
        .collect();
    let abs = CooMatrix::new(matrix.n_rows(), matrix.n_cols(), abs)?;
    let xa: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let scale = spmv_csr(&abs.to_csr(), &xa)?;
    let mut max_abs = 0.0f64;
    let mut worst: Option<(usize, f64)> = None;
    for i in 0..expected.len() {
        let d = (y.get(i).copied().unwrap_or(f64::NAN) - expected[i]).abs();
        let d = if d.is_nan() { f64::INFINITY } else { d };
        max_abs = max_abs.max(d);
        if d > 1e-12 * scale[i].max(1.0) && worst.is_none_or(|(_, w)| d > w) {
            worst = Some((i, d));
        }
    }
    Ok(Deviation {
        max_abs,
        failing_row: worst.map(|(i, _)| i),
    })
}

fn run_plan(
    plan: &TwoLevelPlan,
    x: &[f64],
    cfg: &ExperimentConfig,
) -> Result<ExecutionReport, AppError> {
    Ok(match cfg.mode {
        TimingMode::CostModel => simulate(plan, x)?,
        TimingMode::WallClock => simulate_wallclock_median(plan, x, cfg.workers, WALLCLOCK_REPS)?,
    })
}

/// Every (combination, node count) of `cfg` on one matrix, with `x` all
/// ones. Each product is checked against the sequential kernel before its
/// row is produced.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    name: &str,
    matrix: &CooMatrix,
) -> Result<Vec<CsvRow>, AppError> {
    cfg.validate()?;
    let dc = cfg.decompose_config();
    let x = vec![1.0; matrix.n_cols()];
    let mut rows = Vec::new();
    for &combo in &cfg.combinations {
        for &f in &cfg.node_counts {
            let plan = decompose(matrix, combo, f, cfg.cores_per_node, &dc)?;
            if let Some(dir) = &cfg.plan_dir {
                let path = dir.join(format!("{name}_{combo}_f{f}_fc{}.plan", cfg.cores_per_node));
                std::fs::write(&path, write_plan(&plan)).map_err(|e| AppError::io(&path, e))?;
            }
            let report = run_plan(&plan, &x, cfg)?;
            let dev = compare_with_sequential(matrix, &x, &report.y)?;
            if let Some(row) = dev.failing_row {
                return Err(AppError::Verification(format!(
                    "{combo} with {f} nodes: distributed y differs from sequential at row {row}"
                )));
            }
            rows.push(CsvRow::new(name, combo, f, cfg.cores_per_node, &report));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyCase {
    pub combination: Combination,
    pub nodes: usize,
    pub cores: usize,
    pub vector: &'static str,
    pub deviation: Deviation,
}

impl fmt::Display for VerifyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} f={} fc={} x={} max_dev={:e} ",
            self.combination, self.nodes, self.cores, self.vector, self.deviation.max_abs
        )?;
        match self.deviation.failing_row {
            None => f.write_str("ok"),
            Some(r) => write!(f, "FAIL at row {r}"),
        }
    }
}

/// Seeded vector with integer entries in `-4..=4`.
pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-4i32..=4) as f64).collect()
}

/// Runs `plan` under the cost model for `x = 1` and a seeded `x`, without
/// validating the plan first, so a corrupted plan shows up as a located
/// mismatch in `y`.
pub fn verify_plan(
    plan: &TwoLevelPlan,
    matrix: &CooMatrix,
    seed: u64,
) -> Result<Vec<VerifyCase>, AppError> {
    let vectors = [
        ("ones", vec![1.0; matrix.n_cols()]),
        ("random", random_vector(matrix.n_cols(), seed)),
    ];
    let mut cases = Vec::new();
    for (label, x) in vectors {
        let report = simulate(plan, &x)?;
        cases.push(VerifyCase {
            combination: plan.combination,
            nodes: plan.n_nodes,
            cores: plan.cores_per_node,
            vector: label,
            deviation: compare_with_sequential(matrix, &x, &report.y)?,
        });
    }
    Ok(cases)
}

/// All combinations of `cfg` at every node count of `cfg`.
pub fn verify(cfg: &ExperimentConfig, matrix: &CooMatrix) -> Result<Vec<VerifyCase>, AppError> {
    cfg.validate()?;
    let dc = cfg.decompose_config();
    let mut cases = Vec::new();
    for &combo in &cfg.combinations {
        for &f in &cfg.node_counts {
            let plan = decompose(matrix, combo, f, cfg.cores_per_node, &dc)?;
            cases.extend(verify_plan(&plan, matrix, cfg.seed)?);
        }
    }
    Ok(cases)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMethod {
    NezgtRow,
    NezgtCol,
    HyperRow,
    HyperCol,
}

impl PartitionMethod {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "nezgt-row" => PartitionMethod::NezgtRow,
            "nezgt-col" => PartitionMethod::NezgtCol,
            "hyper-row" => PartitionMethod::HyperRow,
            "hyper-col" => PartitionMethod::HyperCol,
            _ => return None,
        })
    }

    fn axis(self) -> Axis {
        match self {
            PartitionMethod::NezgtRow | PartitionMethod::HyperRow => Axis::Row,
            PartitionMethod::NezgtCol | PartitionMethod::HyperCol => Axis::Column,
        }
    }
}

/// A single-level partition as printed by the `partition` command.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionDump {
    pub axis: Axis,
    pub fragments: Vec<Vec<usize>>,
    pub loads: Vec<u64>,
    /// Hyperedge and connectivity-1 cuts, hypergraph methods only.
    pub cuts: Option<(u64, u64)>,
}

impl PartitionDump {
    pub fn fd(&self) -> u64 {
        let max = self.loads.iter().max().copied().unwrap_or(0);
        let min = self.loads.iter().min().copied().unwrap_or(0);
        max - min
    }
}

impl fmt::Display for PartitionDump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (lines, load)) in self.fragments.iter().zip(&self.loads).enumerate() {
            write!(f, "fragment {k} load {load} {}", self.axis.token())?;
            for l in lines {
                write!(f, " {l}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "total {}", self.loads.iter().sum::<u64>())?;
        writeln!(f, "FD {}", self.fd())?;
        if let Some((he, conn)) = self.cuts {
            writeln!(f, "cut_hyperedge {he}")?;
            writeln!(f, "cut_connectivity {conn}")?;
        }
        Ok(())
    }
}

pub fn partition(
    matrix: &CooMatrix,
    method: PartitionMethod,
    k: usize,
    cfg: &ExperimentConfig,
) -> Result<PartitionDump, AppError> {
    let dc = cfg.decompose_config();
    let axis = method.axis();
    match method {
        PartitionMethod::NezgtRow | PartitionMethod::NezgtCol => {
            let p = nezgt_partition(matrix, axis, k, &dc.nezgt)?;
            Ok(PartitionDump {
                axis,
                fragments: p.fragments(),
                loads: p.loads,
                cuts: None,
            })
        }
        PartitionMethod::HyperRow | PartitionMethod::HyperCol => {
            let h = build_1d(matrix, axis);
            let p = partition_multilevel(&h, k, &dc.hypergraph)?;
            Ok(PartitionDump {
                axis,
                fragments: (0..k).map(|q| p.part(q)).collect(),
                loads: p.part_weights(&h),
                cuts: Some((
                    cut_hyperedge(&h, &p.assignment),
                    cut_connectivity(&h, &p.assignment),
                )),
            })
        }
    }
}

/// Writes `rows` to `path`, or to stdout when `path` is `None`.
pub fn emit_csv(rows: &[CsvRow], path: Option<&Path>) -> Result<(), AppError> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| AppError::io(p, e))?;
            crate::report::write_csv(rows, std::io::BufWriter::new(file))?;
        }
        None => crate::report::write_csv(rows, std::io::stdout().lock())?,
    }
    Ok(())
}
