//! Property-based checks of the toolkit's invariants.

use proptest::prelude::*;

use qvakit::combinatorics::{
    multinomial_of, rank_in_multiset_usize, transposition_neighbors, unrank_in_multiset_usize,
};
use qvakit::graphs::GraphSpec;
use qvakit::metrics::{
    hamming_coefficient, model_coefficients, msv_graph, msv_hamming, phase_discrepancy, HammingModel,
    MsvMode,
};
use qvakit::optimize::{multistart, nelder_mead, NmOptions};
use qvakit::problems::{PmsInstance, PortfolioInstance};
use qvakit::qva::{expectation, measurement_report, Algorithm, Ansatz};
use qvakit::walks::{
    apply_dense, apply_hamming_mixer, apply_kpartite_mixer, dense_walk_oracle, phase_aligned_distance,
    C64,
};

fn state_strategy(dim: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_map(|v| {
        let s: Vec<C64> = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let n = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
        s.into_iter().map(|z| z / n).collect()
    })
}

fn norm2(s: &[C64]) -> f64 {
    s.iter().map(|z| z.norm_sqr()).sum()
}

// ============================================================================
// Combinatorics
// ============================================================================

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_unrank_bijection(counts in prop::collection::vec(0usize..4, 1..4)) {
        let total = multinomial_of(&counts);
        let total: usize = total.try_into().unwrap();
        prop_assume!(total <= 2000);
        for i in 0..total {
            let s = unrank_in_multiset_usize(i, &counts).unwrap();
            prop_assert_eq!(rank_in_multiset_usize(&s), i);
        }
    }

    #[test]
    fn transposition_neighbours_symmetric(s in prop::collection::vec(0usize..3, 1..7)) {
        for t in transposition_neighbors(&s) {
            prop_assert!(transposition_neighbors(&t).contains(&s));
            let diff = s.iter().zip(&t).filter(|(a, b)| a != b).count();
            prop_assert_eq!(diff, 2);
        }
    }
}

// ============================================================================
// Walks and coefficients
// ============================================================================

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamming_coefficients_form_unit_column(n in 1usize..7, m in 2usize..7, t in 0.0f64..7.0) {
        let c = model_coefficients(&HammingModel::new(n, m).unwrap(), t);
        prop_assert!(c.unitarity_defect() < 1e-10);
    }

    #[test]
    fn hamming_mixer_matches_dense_laplacian(n in 1usize..4, m in 2usize..5, t in 0.0f64..6.0, seed in any::<u64>()) {
        let g = GraphSpec::Hamming { n, m }.build().unwrap();
        let dim = g.num_vertices();
        let x: Vec<C64> = (0..dim)
            .map(|i| C64::new(((i as u64 ^ seed) % 7) as f64 - 3.0, (i % 3) as f64))
            .collect();
        let u = dense_walk_oracle(&g.dense_laplacian(), t).unwrap();
        let want = apply_dense(&u, &x);
        let mut got = x.clone();
        apply_hamming_mixer(&mut got, &vec![m; n], m, t);
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn kpartite_mixer_matches_dense(sizes in prop::collection::vec(1usize..6, 1..4), t in 0.0f64..6.0, x in state_strategy(15)) {
        let dim: usize = sizes.iter().sum();
        let x = &x[..dim];
        let g = GraphSpec::KPartite { sizes: sizes.clone() }.build().unwrap();
        let u = dense_walk_oracle(&g.dense_laplacian(), t).unwrap();
        let want = apply_dense(&u, x);
        let mut got = x.to_vec();
        apply_kpartite_mixer(&mut got, &sizes, t).unwrap();
        prop_assert!(phase_aligned_distance(&got, &want) < 1e-10);
    }

    #[test]
    fn phase_discrepancy_is_a_circular_metric(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let d = phase_discrepancy(a, b);
        prop_assert!((0.0..=std::f64::consts::PI + 1e-15).contains(&d));
        prop_assert!((d - phase_discrepancy(b, a)).abs() < 1e-12);
        prop_assert!(phase_discrepancy(a, a + std::f64::consts::TAU) < 1e-9);
    }
}

#[test]
fn hamming_coefficient_reduces_to_complete_and_hypercube() {
    for &t in &[0.3, 1.1, 2.9] {
        // Complete graph K_m: rank-one closed form for the adjacency walk.
        for m in 2..7 {
            let mf = m as f64;
            let e = (C64::new(0.0, -t * mf)).exp();
            let phase = (C64::new(0.0, t)).exp();
            let diag = phase * ((mf - 1.0) + e) / mf;
            let off = phase * (e - 1.0) / mf;
            assert!((hamming_coefficient(1, m, 0, t) - diag).norm() < 1e-12);
            assert!((hamming_coefficient(1, m, 1, t) - off).norm() < 1e-12);
        }
        // Hypercube: cos^{n-d} (-i sin)^d.
        for n in 1..6 {
            for d in 0..=n {
                let want = C64::new(t.cos(), 0.0).powi((n - d) as i32)
                    * C64::new(0.0, -t.sin()).powi(d as i32);
                assert!((hamming_coefficient(n, 2, d, t) - want).norm() < 1e-12);
            }
        }
    }
}

// ============================================================================
// Ansätze
// ============================================================================

fn pms_instance(n: usize, m: usize, seed: u64) -> PmsInstance {
    let f = |i: usize, k: u64| 1.0 + ((seed.wrapping_mul(31).wrapping_add(k * 17 + i as u64)) % 9) as f64;
    PmsInstance {
        n,
        m,
        w: (0..n).map(|i| f(i, 1)).collect(),
        tau: (0..n).map(|i| f(i, 2)).collect(),
        kappa: (0..m).map(|j| 10.0 + f(j, 3)).collect(),
        kappa_padded: None,
        eta: 0.5,
        alpha: 2.0,
        a: 100.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolution_preserves_norm(theta in prop::collection::vec(0.0f64..6.3, 6), seed in 0u64..50) {
        let a = Ansatz::pms(&pms_instance(4, 3, seed), Algorithm::Qmoa, 3, false).unwrap();
        let s = a.evolve(&theta).unwrap();
        prop_assert!((norm2(&s) - 1.0).abs() < 1e-10);
        let b = Ansatz::pms(&pms_instance(4, 3, seed), Algorithm::Qaoa, 3, false).unwrap();
        let s = b.evolve(&theta).unwrap();
        prop_assert!((norm2(&s) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn qaoa_equals_qmoa_for_binary_registers(theta in prop::collection::vec(0.0f64..6.3, 4), seed in 0u64..50) {
        let inst = pms_instance(5, 2, seed);
        let a = Ansatz::pms(&inst, Algorithm::Qaoa, 2, false).unwrap();
        let b = Ansatz::pms(&inst, Algorithm::Qmoa, 2, false).unwrap();
        let (sa, sb) = (a.evolve(&theta).unwrap(), b.evolve(&theta).unwrap());
        prop_assert!(phase_aligned_distance(&sa, &sb) < 1e-10);
    }

    #[test]
    fn expectation_matches_independent_sum(x in state_strategy(16), costs in prop::collection::vec(-5.0f64..5.0, 16)) {
        let e = expectation(&x, &costs).unwrap();
        let mut direct = 0.0;
        for i in 0..16 {
            direct += (x[i].re * x[i].re + x[i].im * x[i].im) * costs[i];
        }
        prop_assert!((e - direct).abs() < 1e-12);
    }

    #[test]
    fn measurement_report_sorted(x in state_strategy(12), k in 1usize..20) {
        let costs: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let r = measurement_report(&x, &costs, k).unwrap();
        prop_assert!(r.len() <= k);
        prop_assert!(r.windows(2).all(|w| w[0].probability >= w[1].probability));
        prop_assert!(r.iter().map(|e| e.probability).sum::<f64>() <= 1.0 + 1e-12);
        prop_assert!(r.iter().all(|e| e.phase > -std::f64::consts::PI && e.phase <= std::f64::consts::PI));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn qaoaz_stays_in_move_closure(theta in prop::collection::vec(0.0f64..6.3, 4), seed in 0u64..20) {
        let inst = PortfolioInstance::synthetic(4, 1, 0.5, seed);
        for alg in [Algorithm::QaoazParity, Algorithm::QaoazComplete] {
            let a = Ansatz::portfolio(&inst, alg, 2).unwrap();
            let s = a.evolve(&theta).unwrap();
            prop_assert!(a.leakage(&s) < 1e-10);
            prop_assert!((norm2(&s) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn qwoa_cs_zero_inter_part_time_is_disjoint(g in prop::collection::vec(0.0f64..6.3, 4), seed in 0u64..20) {
        let inst = PortfolioInstance::synthetic(4, -1, 0.5, seed);
        let cs = Ansatz::portfolio(&inst, Algorithm::QwoaCs, 2).unwrap();
        let dj = Ansatz::portfolio(&inst, Algorithm::QwoaCsDisjoint, 2).unwrap();
        let a = cs.evolve(&[g[0], g[1], 0.0, g[2], g[3], 0.0]).unwrap();
        let b = dj.evolve(&[g[0], g[1], g[2], g[3]]).unwrap();
        prop_assert_eq!(a, b);
    }
}

// ============================================================================
// Optimisation and MSV
// ============================================================================

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn nelder_mead_is_deterministic_and_bounded(x0 in prop::collection::vec(-3.0f64..3.0, 1..5)) {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (v - i as f64).powi(2)).sum::<f64>();
        let opts = NmOptions::default();
        let a = nelder_mead(f, &x0, &opts).unwrap();
        let b = nelder_mead(f, &x0, &opts).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.iterations <= opts.max_iter);
        prop_assert!(a.trace.iter().all(|(_, v)| a.fx <= *v + 1e-15));
    }

    #[test]
    fn multistart_incumbent_is_minimum(seed in any::<u64>()) {
        let f = |x: &[f64]| x[0].sin() * x[1].cos();
        let ms = multistart(f, 2, 3, seed, &NmOptions::default()).unwrap();
        let min = ms.runs.iter().map(|r| r.fx).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(ms.incumbent().fx, min);
    }

    #[test]
    fn msv_transform_matches_bfs(costs in prop::collection::vec(0.0f64..10.0, 27)) {
        let exact = msv_hamming(&costs, 3, 3, &MsvMode::Exact).unwrap();
        let g = GraphSpec::Hamming { n: 3, m: 3 }.build().unwrap();
        let bfs = msv_graph(&g, &costs, &MsvMode::Exact).unwrap();
        prop_assert!((exact.msv - bfs.msv).abs() < 1e-9);
        for (a, b) in exact.shell_variance.iter().zip(&bfs.shell_variance) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assert!(exact.shell_variance.iter().all(|v| *v >= 0.0));
    }
}
