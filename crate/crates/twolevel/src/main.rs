use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twolevel_core::decomposition::Combination;
use twolevel_core::simulator::TimingMode;

use twolevel::experiment::{
    emit_csv, partition, run_experiment, verify, ExperimentConfig, MatrixSource, PartitionMethod,
};
use twolevel::AppError;

#[derive(Parser)]
#[command(
    name = "twolevel",
    version,
    about = "Two-level sparse matrix decomposition experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep combinations and node counts, write one CSV row per run.
    Run(Common),
    /// Compare distributed and sequential products for every combination.
    Verify(Common),
    /// Print a single-level partition of the matrix.
    Partition {
        #[command(flatten)]
        common: Common,
        /// nezgt-row, nezgt-col, hyper-row or hyper-col
        #[arg(long)]
        method: String,
        /// Number of fragments
        #[arg(long, short)]
        k: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Cost,
    Wall,
}

#[derive(Args)]
struct Common {
    /// Matrix Market file
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    matrix: Option<PathBuf>,
    /// Random square matrix: N,DENSITY
    #[arg(long, value_parser = parse_random)]
    random: Option<(usize, f64)>,
    /// Comma-separated combinations (NC-HC, NC-HL, NL-HC, NL-HL)
    #[arg(long, value_delimiter = ',', default_value = "NC-HC,NC-HL,NL-HC,NL-HL")]
    combos: Vec<Combination>,
    /// Comma-separated node counts
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64")]
    nodes: Vec<usize>,
    /// Cores per node
    #[arg(long, default_value_t = 4)]
    cores: usize,
    #[arg(long, value_enum, default_value_t = Mode::Cost)]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hypergraph balance tolerance
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Maximum NEZGT refinement moves
    #[arg(long, default_value_t = 100)]
    refine_iters: u32,
    /// Worker threads for wall-clock mode
    #[arg(long, default_value_t = 4)]
    workers: u32,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory receiving one plan file per run
    #[arg(long)]
    plans: Option<PathBuf>,
}

fn parse_random(s: &str) -> Result<(usize, f64), String> {
    let (n, d) = s.split_once(',').ok_or("expected N,DENSITY")?;
    let n = n.trim().parse().map_err(|_| format!("bad size {n:?}"))?;
    let d = d.trim().parse().map_err(|_| format!("bad density {d:?}"))?;
    Ok((n, d))
}

impl Common {
    fn config(&self) -> ExperimentConfig {
        let source = match (&self.matrix, self.random) {
            (Some(p), _) => MatrixSource::Path(p.clone()),
            (None, Some((n, density))) => MatrixSource::Random {
                n,
                density,
                seed: self.seed,
            },
            (None, None) => unreachable!("clap requires one source"),
        };
        ExperimentConfig {
            combinations: self.combos.clone(),
            node_counts: self.nodes.clone(),
            cores_per_node: self.cores,
            mode: match self.mode {
                Mode::Cost => TimingMode::CostModel,
                Mode::Wall => TimingMode::WallClock,
            },
            seed: self.seed,
            refine_iters: self.refine_iters,
            epsilon: self.epsilon,
            workers: self.workers as usize,
            out: self.out.clone(),
            plan_dir: self.plans.clone(),
            ..ExperimentConfig::new(source)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<bool, AppError> {
    match command {
        Command::Run(common) => {
            let cfg = common.config();
            cfg.validate()?;
            let (name, m) = cfg.source.load()?;
            if let Some(dir) = &cfg.plan_dir {
                std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
            }
            let rows = match run_experiment(&cfg, &name, &m) {
                Err(e @ AppError::Verification(_)) => {
                    eprintln!("{e}");
                    return Ok(false);
                }
                other => other?,
            };
            emit_csv(&rows, cfg.out.as_deref())?;
            Ok(true)
        }
        Command::Verify(common) => {
            let cfg = common.config();
            let (_, m) = cfg.source.load()?;
            let cases = verify(&cfg, &m)?;
            for case in &cases {
                println!("{case}");
            }
            let failed = cases.iter().filter(|c| !c.deviation.passed()).count();
            if failed == 0 {
                println!("pass ({} cases)", cases.len());
            } else {
                println!("FAIL ({failed} of {} cases)", cases.len());
            }
            Ok(failed == 0)
        }
        Command::Partition { common, method, k } => {
            let cfg = common.config();
            let method = PartitionMethod::parse(&method)
                .ok_or_else(|| AppError::Config(format!("unknown method {method:?}")))?;
            let (_, m) = cfg.source.load()?;
            print!("{}", partition(&m, method, k, &cfg)?);
            Ok(true)
        }
    }
}
