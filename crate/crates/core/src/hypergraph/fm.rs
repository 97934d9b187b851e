//! Direct k-way Fiduccia–Mattheyses refinement on the connectivity-1 metric.

use alloc::vec;
use alloc::vec::Vec;

use super::{HgPartition, Hypergraph};

/// Mutable partition state with per-net pin counts in every part.
pub(crate) struct KwayState<'h> {
    h: &'h Hypergraph,
    k: usize,
    cap: u64,
    pub(crate) assignment: Vec<usize>,
    part_weight: Vec<u64>,
    /// `pins[e * k + p]` = pins of net `e` in part `p`.
    pins: Vec<u32>,
}

impl<'h> KwayState<'h> {
    pub(crate) fn new(h: &'h Hypergraph, k: usize, cap: u64, assignment: Vec<usize>) -> Self {
        let mut part_weight = vec![0u64; k];
        for (v, &p) in assignment.iter().enumerate() {
            part_weight[p] += h.weights()[v];
        }
        let mut pins = vec![0u32; h.n_nets() * k];
        for (e, net) in h.nets().iter().enumerate() {
            for &v in net {
                pins[e * k + assignment[v]] += 1;
            }
        }
        KwayState {
            h,
            k,
            cap,
            assignment,
            part_weight,
            pins,
        }
    }

    fn pin_count(&self, e: usize, p: usize) -> u32 {
        self.pins[e * self.k + p]
    }

    /// Change of the connectivity-1 cut if `v` moved to `to` (positive is an
    /// improvement).
    fn gain(&self, v: usize, to: usize) -> i64 {
        let from = self.assignment[v];
        self.h
            .incident_nets(v)
            .iter()
            .map(|&e| {
                i64::from(self.pin_count(e, from) == 1) - i64::from(self.pin_count(e, to) == 0)
            })
            .sum()
    }

    /// Best feasible move of `v` into a part that already shares a net with
    /// it, and whether some such part was skipped for lack of room.
    fn best_move(&self, v: usize, scratch: &mut Vec<bool>) -> (Option<(i64, usize)>, bool) {
        let from = self.assignment[v];
        let w = self.h.weights()[v];
        scratch.clear();
        scratch.resize(self.k, false);
        for &e in self.h.incident_nets(v) {
            for (p, seen) in scratch.iter_mut().enumerate() {
                if p != from && self.pin_count(e, p) > 0 {
                    *seen = true;
                }
            }
        }
        let mut best: Option<(i64, usize)> = None;
        let mut blocked = false;
        for (to, &adjacent) in scratch.iter().enumerate() {
            if !adjacent {
                continue;
            }
            if self.part_weight[to] + w > self.cap {
                blocked = true;
                continue;
            }
            let g = self.gain(v, to);
            if best.is_none_or(|(bg, _)| g > bg) {
                best = Some((g, to));
            }
        }
        (best, blocked)
    }

    pub(crate) fn apply(&mut self, v: usize, to: usize) {
        let from = self.assignment[v];
        let w = self.h.weights()[v];
        for &e in self.h.incident_nets(v) {
            self.pins[e * self.k + from] -= 1;
            self.pins[e * self.k + to] += 1;
        }
        self.part_weight[from] -= w;
        self.part_weight[to] += w;
        self.assignment[v] = to;
    }

    /// One FM pass. Every vertex moves at most once; the pass keeps the
    /// prefix of moves with the best cumulative gain and undoes the rest.
    /// Returns that gain (0 when nothing was kept).
    pub(crate) fn pass(&mut self) -> i64 {
        let n = self.h.n_vertices();
        let mut locked = vec![false; n];
        let mut dirty = vec![true; n];
        let mut blocked = vec![false; n];
        let mut blocked_list: Vec<usize> = Vec::new();
        let mut cache: Vec<Option<(i64, usize)>> = vec![None; n];
        let mut scratch = Vec::with_capacity(self.k);
        let mut moves: Vec<(usize, usize)> = Vec::new();
        let (mut total, mut best, mut best_len) = (0i64, 0i64, 0usize);
        let patience = (n / 8).max(32);
        let mut since_best = 0usize;

        loop {
            let mut pick: Option<(i64, usize, usize)> = None;
            for v in 0..n {
                if locked[v] {
                    continue;
                }
                let stale = match cache[v] {
                    Some((_, to)) => self.part_weight[to] + self.h.weights()[v] > self.cap,
                    None => false,
                };
                if dirty[v] || stale {
                    let (mv, b) = self.best_move(v, &mut scratch);
                    cache[v] = mv;
                    if b && !blocked[v] {
                        blocked[v] = true;
                        blocked_list.push(v);
                    }
                    dirty[v] = false;
                }
                if let Some((g, to)) = cache[v] {
                    if pick.is_none_or(|(pg, _, _)| g > pg) {
                        pick = Some((g, v, to));
                    }
                }
            }
            let Some((g, v, to)) = pick else { break };
            // Recheck against current state; cached gains of clean vertices
            // are exact, this only guards the capacity.
            debug_assert_eq!(g, self.gain(v, to));
            let from = self.assignment[v];
            self.apply(v, to);
            locked[v] = true;
            moves.push((v, from));
            for &e in self.h.incident_nets(v) {
                for &u in self.h.net(e) {
                    dirty[u] = true;
                }
            }
            // `from` now has room that blocked vertices may want
            for u in blocked_list.drain(..) {
                blocked[u] = false;
                dirty[u] = true;
            }
            total += g;
            if total > best {
                best = total;
                best_len = moves.len();
                since_best = 0;
            } else {
                since_best += 1;
                if since_best > patience {
                    break;
                }
            }
        }
        for &(v, from) in moves[best_len..].iter().rev() {
            self.apply(v, from);
        }
        best
    }

    pub(crate) fn refine(&mut self, passes: usize) {
        for _ in 0..passes {
            if self.pass() <= 0 {
                break;
            }
        }
    }

    /// Applies improving feasible exchanges of two vertices in different
    /// parts until none is left. Reaches states where every part is too full
    /// for single moves. Quadratic in the vertex count.
    pub(crate) fn swap_descent(&mut self) -> bool {
        let n = self.h.n_vertices();
        let mut improved = false;
        loop {
            let mut any = false;
            for u in 0..n {
                for v in u + 1..n {
                    let (pu, pv) = (self.assignment[u], self.assignment[v]);
                    if pu == pv {
                        continue;
                    }
                    let (wu, wv) = (self.h.weights()[u], self.h.weights()[v]);
                    if self.part_weight[pu] - wu + wv > self.cap
                        || self.part_weight[pv] - wv + wu > self.cap
                    {
                        continue;
                    }
                    let g1 = self.gain(u, pv);
                    self.apply(u, pv);
                    let g2 = self.gain(v, pu);
                    if g1 + g2 > 0 {
                        self.apply(v, pu);
                        any = true;
                    } else {
                        self.apply(u, pu);
                    }
                }
            }
            if !any {
                return improved;
            }
            improved = true;
        }
    }

    pub(crate) fn max_part_weight(&self) -> u64 {
        self.part_weight.iter().copied().max().unwrap_or(0)
    }
}

/// Runs up to `passes` FM passes over `p`. Moves never push a part above
/// the capacity implied by `p.epsilon`, and the connectivity-1 cut never
/// increases. Deterministic.
pub fn refine_fm(h: &Hypergraph, p: &HgPartition, passes: usize) -> HgPartition {
    let cap = p.capacity(h);
    let mut state = KwayState::new(h, p.k, cap, p.assignment.clone());
    state.refine(passes);
    HgPartition {
        k: p.k,
        assignment: state.assignment,
        epsilon: p.epsilon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::cut_connectivity;

    #[test]
    fn zero_passes_is_identity() {
        let h = Hypergraph::new(4, vec![1; 4], vec![vec![0, 1], vec![2, 3], vec![1, 2]]).unwrap();
        let p = HgPartition::new(&h, 2, vec![0, 1, 0, 1], 0.0).unwrap();
        assert_eq!(refine_fm(&h, &p, 0), p);
    }

    #[test]
    fn zero_cut_unchanged() {
        let h = Hypergraph::new(4, vec![1; 4], vec![vec![0, 1], vec![2, 3]]).unwrap();
        let p = HgPartition::new(&h, 2, vec![0, 0, 1, 1], 0.0).unwrap();
        assert_eq!(refine_fm(&h, &p, 5), p);
    }

    #[test]
    fn moves_vertex_with_gain_two() {
        // Vertex 4 sits in part 1 but both of its nets live in part 0.
        let h = Hypergraph::new(5, vec![1; 5], vec![vec![0, 4], vec![1, 4], vec![2, 3]]).unwrap();
        let p = HgPartition::new(&h, 2, vec![0, 0, 1, 1, 1], 0.25).unwrap();
        assert_eq!(p.capacity(&h), 3);
        assert_eq!(cut_connectivity(&h, &p.assignment), 2);
        let r = refine_fm(&h, &p, 1);
        assert_eq!(r.assignment, [0, 0, 1, 1, 0]);
        assert_eq!(cut_connectivity(&h, &r.assignment), 0);
        assert!(r.is_balanced(&h));
    }

    #[test]
    fn gain_two_move_is_unique_by_enumeration() {
        let h = Hypergraph::new(5, vec![1; 5], vec![vec![0, 4], vec![1, 4], vec![2, 3]]).unwrap();
        let start = [0, 0, 1, 1, 1];
        let base = cut_connectivity(&h, &start);
        let mut improving = Vec::new();
        for v in 0..5 {
            let mut a = start.to_vec();
            a[v] = 1 - a[v];
            let w0 = a.iter().filter(|&&p| p == 0).count();
            if w0 <= 3 && 5 - w0 <= 3 && cut_connectivity(&h, &a) + 2 == base {
                improving.push(v);
            }
        }
        assert_eq!(improving, [4]);
    }

    #[test]
    fn respects_capacity() {
        // epsilon 0 caps parts at floor(5/2) = 2; part 0 is full, so the
        // improving move of vertex 4 is not allowed.
        let h = Hypergraph::new(5, vec![1; 5], vec![vec![0, 4], vec![1, 4], vec![2, 3]]).unwrap();
        let p = HgPartition::new(&h, 2, vec![0, 0, 1, 1, 1], 0.0).unwrap();
        assert_eq!(refine_fm(&h, &p, 3), p);
    }
}
