//! Measured execution: core products run on a bounded pool of scoped
//! threads, and every reduction happens afterwards in fragment order, so `y`
//! does not depend on the schedule.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use twolevel_core::decomposition::TwoLevelPlan;
use twolevel_core::simulator::{
    assemble, combine, compute_comm_stats, load_balance_or_one, scatter, CoreTask, ExecutionReport,
    PartialVector, TimingMode,
};
use twolevel_core::Result;

/// Runs every core task on at most `workers` threads and returns the
/// partials in task order.
pub fn compute_parallel(tasks: &[&CoreTask], workers: usize) -> Vec<PartialVector> {
    let slots: Vec<Mutex<Option<PartialVector>>> = tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = workers.clamp(1, tasks.len().max(1));
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(task) = tasks.get(i) else { break };
                let p = task.compute();
                *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(p);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .unwrap_or_else(|e| e.into_inner())
                .unwrap_or_default()
        })
        .collect()
}

/// One measured run; times are in seconds.
pub fn simulate_wallclock(
    plan: &TwoLevelPlan,
    x: &[f64],
    workers: usize,
) -> Result<ExecutionReport> {
    let t0 = Instant::now();
    let tasks = scatter(plan, x)?;
    let t_scatter = t0.elapsed().as_secs_f64();

    let flat: Vec<&CoreTask> = tasks.iter().flatten().collect();
    let t0 = Instant::now();
    let mut partials = compute_parallel(&flat, workers).into_iter();
    let t_compute = t0.elapsed().as_secs_f64();

    let intra = plan.combination.intra_axis();
    let t0 = Instant::now();
    let node_parts: Vec<PartialVector> = tasks
        .iter()
        .map(|node| {
            let mine: Vec<PartialVector> = partials.by_ref().take(node.len()).collect();
            combine(intra, &mine, plan.n_rows).0
        })
        .collect();
    let mut t_construct_y = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let received: Vec<PartialVector> = node_parts.to_vec();
    let t_gather = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let (y, _) = assemble(plan.combination.inter_axis(), &received, plan.n_rows);
    t_construct_y += t0.elapsed().as_secs_f64();

    Ok(ExecutionReport {
        lb_nodes: load_balance_or_one(&plan.node_loads()),
        lb_cores: load_balance_or_one(&plan.core_loads()),
        t_scatter,
        t_compute,
        t_gather,
        t_construct_y,
        y,
        comm: compute_comm_stats(plan),
        mode: TimingMode::WallClock,
    })
}

/// `reps` measured runs; each time field is the median over the runs.
pub fn simulate_wallclock_median(
    plan: &TwoLevelPlan,
    x: &[f64],
    workers: usize,
    reps: usize,
) -> Result<ExecutionReport> {
    let runs = (0..reps.max(1))
        .map(|_| simulate_wallclock(plan, x, workers))
        .collect::<Result<Vec<_>>>()?;
    let median = |f: fn(&ExecutionReport) -> f64| {
        let mut v: Vec<f64> = runs.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let mut report = runs[0].clone();
    report.t_scatter = median(|r| r.t_scatter);
    report.t_compute = median(|r| r.t_compute);
    report.t_gather = median(|r| r.t_gather);
    report.t_construct_y = median(|r| r.t_construct_y);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use twolevel_core::decomposition::{decompose, Combination, DecomposeConfig};
    use twolevel_core::simulator::simulate;
    use twolevel_core::sparse::generate_random_sparse_real;

    #[test]
    fn wallclock_matches_cost_model_y() {
        let m = generate_random_sparse_real(150, 150, 0.04, 8).unwrap();
        let x: Vec<f64> = (0..150).map(|i| (i as f64).sin()).collect();
        for c in Combination::ALL {
            let plan = decompose(&m, c, 4, 4, &DecomposeConfig::default()).unwrap();
            let cost = simulate(&plan, &x).unwrap();
            for workers in [1, 3, 16] {
                let wall = simulate_wallclock(&plan, &x, workers).unwrap();
                assert_eq!(wall.y, cost.y);
                assert_eq!(wall.comm, cost.comm);
                assert_eq!(wall.mode, TimingMode::WallClock);
                assert!(wall.t_total() >= 0.0);
            }
            let med = simulate_wallclock_median(&plan, &x, 2, 5).unwrap();
            assert_eq!(med.y, cost.y);
        }
    }
}
