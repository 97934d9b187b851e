use proptest::prelude::*;

use twolevel_core::decomposition::{decompose, validate_plan, Combination, DecomposeConfig};
use twolevel_core::hypergraph::{
    build_1d, cut_connectivity, cut_hyperedge, partition_multilevel, HgConfig,
};
use twolevel_core::nezgt::{
    nezgt_counts, phase0_sort, phase1_ls, phase2_refine, RefineConfig, RefineStrategy, SortOrder,
};
use twolevel_core::simulator::{compute_comm_stats, simulate};
use twolevel_core::sparse::{
    generate_random_sparse, generate_random_sparse_real, spmv_csc, spmv_csr, CooMatrix, Entry,
};
use twolevel_core::{Axis, Error};

fn matrix() -> impl Strategy<Value = CooMatrix> {
    (1usize..40, 1usize..40, 0.02f64..0.5, any::<u64>())
        .prop_map(|(r, c, d, s)| generate_random_sparse(r, c, d, s).unwrap())
}

fn dense_mul(m: &CooMatrix, x: &[f64]) -> Vec<f64> {
    let d = m.to_dense();
    d.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compressed_round_trips(m in matrix()) {
        prop_assert_eq!(m.to_csr().to_coo().sorted_row_major(), m.sorted_row_major());
        prop_assert_eq!(m.to_csc().to_coo().sorted_row_major(), m.sorted_row_major());
    }

    #[test]
    fn kernels_agree_with_dense(m in matrix(), seed in any::<u64>()) {
        let x: Vec<f64> = (0..m.n_cols()).map(|j| ((j as u64 ^ seed) % 11) as f64 - 5.0).collect();
        let y = spmv_csr(&m.to_csr(), &x).unwrap();
        prop_assert_eq!(&y, &spmv_csc(&m.to_csc(), &x).unwrap());
        prop_assert_eq!(y, dense_mul(&m, &x));
    }

    #[test]
    fn spmv_is_linear(m in matrix(), a in -4i32..5, b in -4i32..5) {
        let n = m.n_cols();
        let x: Vec<f64> = (0..n).map(|j| (j % 5) as f64).collect();
        let z: Vec<f64> = (0..n).map(|j| (j % 3) as f64 - 1.0).collect();
        let combo: Vec<f64> = x.iter().zip(&z).map(|(p, q)| a as f64 * p + b as f64 * q).collect();
        let csr = m.to_csr();
        let (yx, yz) = (spmv_csr(&csr, &x).unwrap(), spmv_csr(&csr, &z).unwrap());
        let lhs = spmv_csr(&csr, &combo).unwrap();
        for i in 0..lhs.len() {
            prop_assert_eq!(lhs[i], a as f64 * yx[i] + b as f64 * yz[i]);
        }
    }

    #[test]
    fn nezgt_covers_and_refine_never_worsens(
        counts in prop::collection::vec(0u64..30, 1..40),
        f in 1usize..8,
        first in any::<bool>(),
    ) {
        let order = phase0_sort(&counts, SortOrder::Descending);
        let p1 = phase1_ls(&order, &counts, f, Axis::Row).unwrap();
        prop_assert_eq!(p1.loads.iter().sum::<u64>(), counts.iter().sum::<u64>());
        prop_assert!(p1.assignment.iter().all(|&k| k < f));
        let strategy = if first { RefineStrategy::FirstImproving } else { RefineStrategy::BestImproving };
        let p2 = phase2_refine(&p1, &counts, &RefineConfig { max_iterations: 1000, strategy });
        prop_assert!(p2.fd() <= p1.fd());
        for k in 0..f {
            let load: u64 = p2.lines_of(k).iter().map(|&l| counts[l]).sum();
            prop_assert_eq!(load, p2.loads[k]);
        }
        let full = nezgt_counts(&counts, Axis::Row, f, &RefineConfig::default()).unwrap();
        prop_assert!(full.fd() <= p1.fd());
    }

    #[test]
    fn descending_sort_is_stable(counts in prop::collection::vec(0u64..6, 0..30)) {
        let order = phase0_sort(&counts, SortOrder::Descending);
        for w in order.windows(2) {
            let (a, b) = (w[0], w[1]);
            prop_assert!(counts[a] > counts[b] || (counts[a] == counts[b] && a < b));
        }
    }

    #[test]
    fn plans_cover_exactly(m in matrix(), f in 1usize..6, fc in 1usize..5, c in 0usize..4) {
        let combo = Combination::ALL[c];
        let plan = decompose(&m, combo, f, fc, &DecomposeConfig::default()).unwrap();
        prop_assert_eq!(validate_plan(&plan, &m), Ok(()));
        let total: u64 = plan.core_loads().iter().sum();
        prop_assert_eq!(total, m.nnz() as u64);
        // sibling line sets are disjoint
        let inter = combo.inter_axis();
        let mut seen = vec![false; m.n_lines(inter)];
        for node in &plan.nodes {
            for &l in &node.fragment.lines {
                prop_assert!(!seen[l]);
                seen[l] = true;
            }
            let mut inner = vec![false; m.n_lines(combo.intra_axis())];
            for core in &node.cores {
                for &l in &core.lines {
                    prop_assert!(!inner[l]);
                    inner[l] = true;
                }
            }
        }
    }

    #[test]
    fn decomposition_ignores_entry_order(m in matrix(), f in 1usize..5, fc in 1usize..4, c in 0usize..4) {
        let mut entries: Vec<Entry> = m.entries().to_vec();
        entries.reverse();
        let shuffled = CooMatrix::new(m.n_rows(), m.n_cols(), entries).unwrap();
        let cfg = DecomposeConfig::default();
        let a = decompose(&m, Combination::ALL[c], f, fc, &cfg).unwrap();
        let b = decompose(&shuffled, Combination::ALL[c], f, fc, &cfg).unwrap();
        for (na, nb) in a.nodes.iter().zip(&b.nodes) {
            prop_assert_eq!(&na.fragment.lines, &nb.fragment.lines);
            for (ca, cb) in na.cores.iter().zip(&nb.cores) {
                prop_assert_eq!(&ca.lines, &cb.lines);
            }
        }
    }

    #[test]
    fn simulation_reproduces_sequential_real_data(
        n in 2usize..60, d in 0.02f64..0.3, seed in any::<u64>(), f in 1usize..5, fc in 1usize..4, c in 0usize..4,
    ) {
        let m = generate_random_sparse_real(n, n, d, seed).unwrap();
        let x: Vec<f64> = (0..n).map(|j| 1.0 / (j as f64 + 1.0)).collect();
        let y = spmv_csr(&m.to_csr(), &x).unwrap();
        let plan = decompose(&m, Combination::ALL[c], f, fc, &DecomposeConfig::default()).unwrap();
        let r = simulate(&plan, &x).unwrap();
        for (i, (&got, &want)) in r.y.iter().zip(&y).enumerate() {
            let tol = 1e-12 * want.abs().max(1.0);
            prop_assert!((got - want).abs() <= tol, "row {}: {} vs {}", i, got, want);
        }
        prop_assert_eq!(&r, &simulate(&plan, &x).unwrap());
        let stats = compute_comm_stats(&plan);
        let nonempty = stats.nodes.iter().filter(|k| k.nz > 0).count();
        let nnz = m.nnz() as u64;
        for node in stats.nodes.iter().filter(|k| k.nz > 0) {
            prop_assert!(node.dr >= 2 && node.dr <= nnz + n as u64);
            if nonempty >= 2 {
                prop_assert!(node.dr < nnz + n as u64);
            }
        }
    }

    #[test]
    fn row_gather_never_exceeds_column_gather(m in matrix(), f in 1usize..6, fc in 1usize..4) {
        let cfg = DecomposeConfig::default();
        let x = vec![1.0; m.n_cols()];
        let nl_hl = simulate(&decompose(&m, Combination::NL_HL, f, fc, &cfg).unwrap(), &x).unwrap();
        let nc_hc = simulate(&decompose(&m, Combination::NC_HC, f, fc, &cfg).unwrap(), &x).unwrap();
        prop_assert!(nl_hl.t_gather <= nc_hc.t_gather);
        prop_assert!(nl_hl.t_gather_plus_construct() <= nc_hc.t_gather_plus_construct());
    }

    #[test]
    fn multilevel_is_balanced(m in matrix(), k in 1usize..5, seed in any::<u64>()) {
        let h = build_1d(&m, Axis::Row);
        let cfg = HgConfig { epsilon: 0.3, seed, ..HgConfig::default() };
        match partition_multilevel(&h, k, &cfg) {
            Ok(p) => {
                prop_assert!(p.is_balanced(&h));
                prop_assert!(cut_hyperedge(&h, &p.assignment) <= cut_connectivity(&h, &p.assignment));
            }
            Err(e) => {
                let expected = matches!(e, Error::VertexTooHeavy { .. } | Error::BalanceInfeasible { .. });
                prop_assert!(expected, "unexpected error {:?}", e);
            }
        }
    }
}
