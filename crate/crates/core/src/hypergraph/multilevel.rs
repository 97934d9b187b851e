//! Multilevel k-way partitioning: heavy-connectivity matching to coarsen,
//! greedy net-aware initial partitioning with restarts, FM at every level
//! on the way back up.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fm::KwayState;
use super::{capacity, check_epsilon, cut_connectivity, HgPartition, Hypergraph};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HgConfig {
    /// Balance tolerance: every part weighs at most `(1 + epsilon) * W / k`.
    pub epsilon: f64,
    pub seed: u64,
    /// FM passes per level.
    pub fm_passes: usize,
    /// Initial partitions tried on the coarsest hypergraph; the best one
    /// after refinement is kept.
    pub initial_runs: usize,
}

impl Default for HgConfig {
    fn default() -> Self {
        HgConfig {
            epsilon: 0.05,
            seed: 0,
            fm_passes: 8,
            initial_runs: 16,
        }
    }
}

/// Nets larger than this are ignored when scoring matches.
const MATCH_NET_LIMIT: usize = 256;

/// Partitions `h` into `k` parts minimizing the connectivity-1 cut under the
/// balance constraint of `cfg.epsilon`. Deterministic for a fixed seed.
///
/// Fails with [`Error::VertexTooHeavy`] when a single vertex exceeds the part
/// capacity and with [`Error::BalanceInfeasible`] when no balanced start
/// could be constructed.
pub fn partition_multilevel(h: &Hypergraph, k: usize, cfg: &HgConfig) -> Result<HgPartition> {
    if k == 0 {
        return Err(Error::ZeroParts);
    }
    check_epsilon(cfg.epsilon)?;
    let cap = capacity(h.total_weight(), k, cfg.epsilon);
    if let Some((v, &w)) = h.weights().iter().enumerate().find(|&(_, &w)| w > cap) {
        return Err(Error::VertexTooHeavy {
            vertex: v,
            weight: w,
            capacity: cap,
        });
    }
    let done = |assignment| HgPartition {
        k,
        assignment,
        epsilon: cfg.epsilon,
    };
    if k == 1 || h.n_vertices() == 0 {
        return Ok(done(vec![0; h.n_vertices()]));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let threshold = (4 * k).max(40);
    let w_max = h.weights().iter().copied().max().unwrap_or(0);
    let max_cluster = w_max.max(cap / 3);

    let mut graphs: Vec<Hypergraph> = vec![h.clone()];
    let mut maps: Vec<Vec<usize>> = Vec::new();
    loop {
        let g = graphs.last().expect("at least the input level");
        if g.n_vertices() <= threshold {
            break;
        }
        let (map, n_coarse) = heavy_connectivity_matching(g, max_cluster, &mut rng);
        if n_coarse * 20 > g.n_vertices() * 19 {
            break;
        }
        let coarse = contract(g, &map, n_coarse);
        maps.push(map);
        graphs.push(coarse);
    }

    // Start from the coarsest level that admits a balanced greedy start.
    let mut level = graphs.len() - 1;
    let mut assignment = loop {
        if let Some(a) = initial_partition(&graphs[level], k, cap, cfg, &mut rng) {
            break a;
        }
        if level == 0 {
            return Err(Error::BalanceInfeasible { capacity: cap });
        }
        level -= 1;
    };

    while level > 0 {
        level -= 1;
        let map = &maps[level];
        let projected: Vec<usize> = map.iter().map(|&c| assignment[c]).collect();
        let mut state = KwayState::new(&graphs[level], k, cap, projected);
        state.refine(cfg.fm_passes);
        assignment = state.assignment;
    }
    Ok(done(assignment))
}

/// Greedy matching that pairs each vertex with the unmatched neighbor of
/// highest `sum over shared nets of 1 / (|e| - 1)`, skipping pairs heavier
/// than `max_cluster`. Returns the fine-to-coarse map and coarse size.
fn heavy_connectivity_matching(
    h: &Hypergraph,
    max_cluster: u64,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, usize) {
    let n = h.n_vertices();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut map = vec![usize::MAX; n];
    let mut score = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut n_coarse = 0;
    for &u in &order {
        if map[u] != usize::MAX {
            continue;
        }
        let wu = h.weights()[u];
        for &e in h.incident_nets(u) {
            let pins = h.net(e);
            if pins.len() < 2 || pins.len() > MATCH_NET_LIMIT {
                continue;
            }
            let s = 1.0 / (pins.len() - 1) as f64;
            for &v in pins {
                if v == u || map[v] != usize::MAX || wu + h.weights()[v] > max_cluster {
                    continue;
                }
                if score[v] == 0.0 {
                    touched.push(v);
                }
                score[v] += s;
            }
        }
        let mut partner: Option<usize> = None;
        for &v in &touched {
            partner = match partner {
                Some(p) if score[p] > score[v] || (score[p] == score[v] && p < v) => Some(p),
                _ => Some(v),
            };
        }
        for &v in &touched {
            score[v] = 0.0;
        }
        touched.clear();
        map[u] = n_coarse;
        if let Some(v) = partner {
            map[v] = n_coarse;
        }
        n_coarse += 1;
    }
    (map, n_coarse)
}

fn contract(h: &Hypergraph, map: &[usize], n_coarse: usize) -> Hypergraph {
    let mut weights = vec![0u64; n_coarse];
    for (v, &c) in map.iter().enumerate() {
        weights[c] += h.weights()[v];
    }
    let nets = h
        .nets()
        .iter()
        .filter_map(|pins| {
            let mut c: Vec<usize> = pins.iter().map(|&v| map[v]).collect();
            c.sort_unstable();
            c.dedup();
            (c.len() > 1).then_some(c)
        })
        .collect();
    Hypergraph::from_clean(weights, nets)
}

/// Best of `cfg.initial_runs` refined starts, alternating net-aware greedy
/// and random feasible placement, by (cut, heaviest part).
/// Largest vertex count for the quadratic swap search.
const SWAP_LIMIT: usize = 64;

fn initial_partition(
    h: &Hypergraph,
    k: usize,
    cap: u64,
    cfg: &HgConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let n = h.n_vertices();
    let mut by_weight: Vec<usize> = (0..n).collect();
    by_weight.sort_by(|&a, &b| h.weights()[b].cmp(&h.weights()[a]));

    let mut best: Option<(u64, u64, Vec<usize>)> = None;
    for run in 0..cfg.initial_runs.max(1) {
        let order = if run == 0 {
            by_weight.clone()
        } else {
            let mut o: Vec<usize> = (0..n).collect();
            o.shuffle(rng);
            o
        };
        let start = if run % 2 == 1 {
            random_feasible(h, k, cap, &order, rng)
        } else {
            greedy_net_aware(h, k, cap, &order)
        };
        let Some(start) = start.or_else(|| lpt(h, k, cap, &by_weight)) else {
            continue;
        };
        let mut state = KwayState::new(h, k, cap, start);
        state.refine(cfg.fm_passes);
        if n <= SWAP_LIMIT {
            while state.swap_descent() {
                state.refine(cfg.fm_passes);
            }
        }
        let cut = cut_connectivity(h, &state.assignment);
        let heaviest = state.max_part_weight();
        if best
            .as_ref()
            .is_none_or(|(bc, bh, _)| (cut, heaviest) < (*bc, *bh))
        {
            best = Some((cut, heaviest, state.assignment));
        }
    }
    best.map(|(_, _, a)| a)
}

/// Places vertices in `order`, each into a uniformly chosen part that still
/// has room.
fn random_feasible(
    h: &Hypergraph,
    k: usize,
    cap: u64,
    order: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let mut assignment = vec![usize::MAX; h.n_vertices()];
    let mut weight = vec![0u64; k];
    let mut open = Vec::with_capacity(k);
    for &v in order {
        let w = h.weights()[v];
        open.clear();
        open.extend((0..k).filter(|&p| weight[p] + w <= cap));
        let p = *open.get(rng.gen_range(0..open.len().max(1)))?;
        assignment[v] = p;
        weight[p] += w;
    }
    Some(assignment)
}

/// Places vertices in `order`, each into the feasible part sharing the most
/// of its nets; ties go to the lighter part, then the lower index.
fn greedy_net_aware(h: &Hypergraph, k: usize, cap: u64, order: &[usize]) -> Option<Vec<usize>> {
    let mut assignment = vec![usize::MAX; h.n_vertices()];
    let mut weight = vec![0u64; k];
    let mut pins = vec![0u32; h.n_nets() * k];
    let mut affinity = vec![0u32; k];
    for &v in order {
        let w = h.weights()[v];
        affinity.iter_mut().for_each(|a| *a = 0);
        for &e in h.incident_nets(v) {
            for (p, a) in affinity.iter_mut().enumerate() {
                if pins[e * k + p] > 0 {
                    *a += 1;
                }
            }
        }
        let mut pick: Option<usize> = None;
        for p in 0..k {
            if weight[p] + w > cap {
                continue;
            }
            pick = match pick {
                Some(q)
                    if (affinity[q], core::cmp::Reverse(weight[q]))
                        >= (affinity[p], core::cmp::Reverse(weight[p])) =>
                {
                    Some(q)
                }
                _ => Some(p),
            };
        }
        let p = pick?;
        assignment[v] = p;
        weight[p] += w;
        for &e in h.incident_nets(v) {
            pins[e * k + p] += 1;
        }
    }
    Some(assignment)
}

/// Heaviest part of the heaviest-first list schedule of `h` on `k` parts.
/// Any capacity at least this large lets [`partition_multilevel`] succeed.
pub(crate) fn lpt_makespan(h: &Hypergraph, k: usize) -> u64 {
    let mut by_weight: Vec<usize> = (0..h.n_vertices()).collect();
    by_weight.sort_by(|&a, &b| h.weights()[b].cmp(&h.weights()[a]));
    let mut weight = vec![0u64; k.max(1)];
    for &v in &by_weight {
        let p = (0..weight.len())
            .min_by_key(|&p| (weight[p], p))
            .unwrap_or(0);
        weight[p] += h.weights()[v];
    }
    weight.into_iter().max().unwrap_or(0)
}

/// Heaviest vertex first into the lightest part.
fn lpt(h: &Hypergraph, k: usize, cap: u64, by_weight: &[usize]) -> Option<Vec<usize>> {
    let mut assignment = vec![usize::MAX; h.n_vertices()];
    let mut weight = vec![0u64; k];
    for &v in by_weight {
        let p = (0..k).min_by_key(|&p| (weight[p], p))?;
        weight[p] += h.weights()[v];
        if weight[p] > cap {
            return None;
        }
        assignment[v] = p;
    }
    Some(assignment)
}
