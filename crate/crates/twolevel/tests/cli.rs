use std::path::PathBuf;
use std::process::{Command, Output};

use twolevel::experiment::{verify_plan, ExperimentConfig, MatrixSource};
use twolevel::mtx::{read_matrix_market, write_matrix_market};
use twolevel::plan_io::{read_plan, write_plan};
use twolevel_core::decomposition::{decompose, Combination, DecomposeConfig};
use twolevel_core::sparse::{CooMatrix, Entry};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/ref15.mtx")
}

fn twolevel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twolevel"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_emits_one_row_per_combination_and_node_count() {
    let m = fixture();
    let o = twolevel(&[
        "run",
        "--matrix",
        m.to_str().unwrap(),
        "--nodes",
        "2,4,8",
        "--cores",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    for r in &rows {
        let num = |name: &str| r[col(name)].parse::<f64>().unwrap();
        assert!(num("lb_nodes") >= 1.0 && num("lb_cores") >= 1.0);
        for t in [
            "t_compute",
            "t_scatter",
            "t_gather",
            "t_construct_y",
            "t_total",
        ] {
            assert!(num(t) >= 0.0);
        }
        assert_eq!(
            num("t_gather_plus_construct"),
            num("t_gather") + num("t_construct_y")
        );
    }
    let combos: Vec<&str> = rows.iter().map(|r| &r[col("combination")]).collect();
    for c in ["NC-HC", "NC-HL", "NL-HC", "NL-HL"] {
        assert_eq!(combos.iter().filter(|&&x| x == c).count(), 3);
    }
}

#[test]
fn run_is_byte_identical_in_cost_mode() {
    let args = [
        "run", "--random", "300,0.02", "--nodes", "2,4", "--cores", "3", "--seed", "9",
    ];
    let a = twolevel(&args);
    let b = twolevel(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains(&b'\r'));
}

#[test]
fn single_node_single_core_is_perfectly_balanced() {
    let o = twolevel(&["run", "--random", "50,0.1", "--nodes", "1", "--cores", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!((f[4], f[5]), ("1.0", "1.0"), "{line}");
    }
}

#[test]
fn wall_mode_runs_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let plans = dir.path().join("plans");
    let o = twolevel(&[
        "run",
        "--random",
        "120,0.05",
        "--nodes",
        "2",
        "--cores",
        "2",
        "--mode",
        "wall",
        "--workers",
        "2",
        "--combos",
        "NL-HL,NC-HC",
        "--out",
        out.to_str().unwrap(),
        "--plans",
        plans.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert_eq!(std::fs::read_dir(&plans).unwrap().count(), 2);
}

#[test]
fn missing_file_exits_2_naming_path() {
    let o = twolevel(&["run", "--matrix", "/no/such/matrix.mtx", "--nodes", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/matrix.mtx"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(twolevel(&["run"]).status.code(), Some(2));
    assert_eq!(twolevel(&["run", "--random", "10"]).status.code(), Some(2));
    assert_eq!(
        twolevel(&["run", "--random", "10,0.1", "--combos", "NL-NC"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        twolevel(&["run", "--random", "10,0.1", "--cores", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        twolevel(&["run", "--random", "10,1.5"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_fixture_passes() {
    let m = fixture();
    let o = twolevel(&[
        "verify",
        "--matrix",
        m.to_str().unwrap(),
        "--nodes",
        "2",
        "--cores",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.ends_with(" ok")).count(), 8);
    assert!(text.contains("pass"));
}

#[test]
fn verify_identity_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.mtx");
    std::fs::write(&path, write_matrix_market(&CooMatrix::identity(100))).unwrap();
    let o = twolevel(&[
        "verify",
        "--matrix",
        path.to_str().unwrap(),
        "--nodes",
        "1,4",
        "--cores",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn corrupted_plan_fails_at_located_row() {
    let m = read_matrix_market(&fixture()).unwrap();
    let mut plan = decompose(&m, Combination::NC_HC, 2, 4, &DecomposeConfig::default()).unwrap();
    let core = plan.nodes[1]
        .cores
        .iter_mut()
        .find(|c| !c.is_empty())
        .unwrap();
    let mut entries: Vec<Entry> = core.sub.entries().to_vec();
    let victim = entries[0];
    entries[0].val += 1000.0;
    core.sub = CooMatrix::new(15, 15, entries).unwrap();
    let cases = verify_plan(&plan, &m, 1).unwrap();
    let ones = &cases[0];
    assert!(!ones.deviation.passed());
    assert_eq!(ones.deviation.failing_row, Some(victim.row));
    assert!(ones
        .to_string()
        .contains(&format!("FAIL at row {}", victim.row)));
}

#[test]
fn partition_nezgt_on_fixture() {
    let m = fixture();
    let m = m.to_str().unwrap();
    let total_and_fd = |text: &str| {
        let get = |key: &str| {
            text.lines()
                .find_map(|l| l.strip_prefix(key))
                .map(|v| v.trim().parse::<u64>().unwrap())
                .unwrap()
        };
        (get("total "), get("FD "))
    };
    let loads = |text: &str| {
        let mut v: Vec<u64> = text
            .lines()
            .filter(|l| l.starts_with("fragment"))
            .map(|l| l.split_whitespace().nth(3).unwrap().parse().unwrap())
            .collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    };

    let row = stdout(&twolevel(&[
        "partition",
        "--matrix",
        m,
        "--method",
        "nezgt-row",
        "-k",
        "6",
    ]));
    assert_eq!(total_and_fd(&row), (104, 1));

    let col = stdout(&twolevel(&[
        "partition",
        "--matrix",
        m,
        "--method",
        "nezgt-col",
        "-k",
        "6",
    ]));
    assert_eq!(loads(&col), [18, 18, 17, 17, 17, 17]);

    let one = stdout(&twolevel(&[
        "partition",
        "--matrix",
        m,
        "--method",
        "nezgt-row",
        "-k",
        "1",
    ]));
    assert_eq!(total_and_fd(&one), (104, 0));

    let hyp = stdout(&twolevel(&[
        "partition",
        "--matrix",
        m,
        "--method",
        "hyper-col",
        "-k",
        "3",
    ]));
    assert!(hyp.contains("cut_hyperedge") && hyp.contains("cut_connectivity"));

    let bad = twolevel(&["partition", "--matrix", m, "--method", "metis", "-k", "2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn plan_file_round_trip_for_fixture() {
    let m = read_matrix_market(&fixture()).unwrap();
    let plan = decompose(&m, Combination::NL_HL, 2, 4, &DecomposeConfig::default()).unwrap();
    let text = write_plan(&plan);
    assert!(text.contains("# node 0 row 0 2 3 5 6 7 14"));
    assert!(text.contains("# node 1 row 1 4 8 9 10 11 12 13"));
    assert_eq!(read_plan(&text, &m).unwrap(), plan);
}

#[test]
fn config_validation() {
    let mut cfg = ExperimentConfig::new(MatrixSource::Random {
        n: 10,
        density: 0.1,
        seed: 0,
    });
    assert!(cfg.validate().is_ok());
    cfg.node_counts.clear();
    assert!(cfg.validate().is_err());
}
