mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use spca_core::baselines::{complete_nuclear, dtspca, itspca, mc_then_sdp, COMPLETION_MAX_ITER, COMPLETION_TOL};
use spca_core::harness::gen_instance;
use spca_core::numerics::{eigh, SymMatrix};
use spca_core::sdp::{self, kkt_report, solve_restricted, solve_sdp, witness_certificate, DEFAULT_MAX_ITER, DEFAULT_TOL};
use spca_core::spca::{rescaled_parameter, sufficient_conditions_report, tune_rho};
use spca_core::{ObservationGraph, SdpSolution};

use common::{bernoulli_graph, gaussian_sym, rng};

/// KKT residuals of a converged solve; panics on a violation.
fn assert_kkt(m: &SymMatrix, rho: f64, sol: &SdpSolution) {
    assert!(sol.converged);
    let k = kkt_report(m, rho, &sol.x_hat, sol.dual.as_ref()).unwrap();
    assert!(k.stationarity <= 1e-5, "stationarity {k:?}");
    assert!(k.feasibility_violation() <= 1e-6, "feasibility {k:?}");
}

fn spiked(d: usize, support: &[usize], strength: f64, noise: f64, seed: u64) -> SymMatrix {
    let mut r = rng(seed);
    let mut u = vec![0.0; d];
    for &i in support {
        u[i] = if r.random_bool(0.5) { 1.0 } else { -1.0 } / (support.len() as f64).sqrt();
    }
    SymMatrix::outer(&u).scale(strength).add(&gaussian_sym(d, &mut r).scale(noise))
}

#[test]
fn rho_zero_gives_leading_eigenvector() {
    let mut r = rng(8);
    let mut done = 0;
    while done < 25 {
        let d = r.random_range(2..=20);
        let m = gaussian_sym(d, &mut r);
        let e = eigh(&m).unwrap();
        if e.values[0] - e.values[1] < 1e-3 {
            continue;
        }
        let sol = solve_sdp(&m, 0.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let u = e.vector(0);
        assert!(sol.x_hat.sub(&SymMatrix::outer(&u)).frobenius_norm() <= 1e-3);
        assert_kkt(&m, 0.0, &sol);
        done += 1;
    }
}

#[test]
fn solutions_are_feasible_and_kkt() {
    for seed in 0..20 {
        let m = spiked(12, &[1, 4, 7], 3.0, 0.3, seed);
        for rho in [0.05, 0.2, 0.6] {
            let sol = solve_sdp(&m, rho, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            assert_kkt(&m, rho, &sol);
            let low = eigh(&sol.x_hat).unwrap().values.last().copied().unwrap();
            assert!(low >= -1e-7 && (sol.x_hat.trace() - 1.0).abs() <= 1e-7);
        }
    }
}

#[test]
fn merit_settles_before_convergence() {
    for seed in 0..10 {
        let m = spiked(15, &[0, 2, 9, 11], 4.0, 0.2, seed);
        let sol = solve_sdp(&m, 0.3, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(sol.converged);
        // short runs would put the initial transient inside a 50-step window
        let window = 50.min(sol.merit.len() / 2);
        let tail = &sol.merit[sol.merit.len() - window..];
        let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = sol.merit.last().unwrap().abs().max(1.0);
        assert!((hi - lo) / scale < 10.0 * DEFAULT_TOL, "seed {seed}: oscillation {}", (hi - lo) / scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn restricted_never_beats_full(seed in any::<u64>(), d in 3usize..10, rho in 0.0f64..0.8) {
        let mut r = rng(seed);
        let m = gaussian_sym(d, &mut r);
        let mut idx: Vec<usize> = (0..d).collect();
        idx.shuffle(&mut r);
        let k = r.random_range(1..d);
        let support = &idx[..k];
        let full = solve_sdp(&m, rho, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let part = solve_restricted(&m, rho, support, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(part.objective <= full.objective + 1e-6);
        if full.converged {
            assert_kkt(&m, rho, &full);
        }
    }

    #[test]
    fn tuned_rho_is_on_the_grid(seed in any::<u64>()) {
        let m = spiked(10, &[2, 3, 8], 3.0, 0.3, seed);
        let grid = [0.05, 0.15, 0.3, 0.6];
        let t = tune_rho(&m, &grid, 0.5).unwrap();
        prop_assert!(grid.contains(&t.chosen_rho));
        let k = grid.iter().position(|&g| g == t.chosen_rho).unwrap();
        prop_assert_eq!(&t.supports[k], &t.chosen_support);
    }

    #[test]
    fn rescaled_is_permutation_invariant(seed in any::<u64>(), sigma in 0.0f64..1.0) {
        let mut r = rng(seed);
        let g = bernoulli_graph(9, 0.8, &mut r);
        let inst = gen_instance(9, 3, 2.0, sigma, &g, seed).unwrap();
        let base = rescaled_parameter(&inst.m_star, &g, sigma, &inst.support);
        let mut perm: Vec<usize> = (0..9).collect();
        perm.shuffle(&mut r);
        // permute sends old index i to perm[i]
        let pg = ObservationGraph::from_edges(9, g.edges().into_iter().map(|(i, j)| (perm[i], perm[j]))).unwrap();
        let mut pj: Vec<usize> = inst.support.iter().map(|&i| perm[i]).collect();
        pj.sort_unstable();
        let moved = rescaled_parameter(&inst.m_star.permute(&perm), &pg, sigma, &pj);
        match (base, moved) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{a} vs {b}"),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn rescaled_grows_with_sigma(seed in any::<u64>(), s1 in 0.0f64..1.0, ds in 0.0f64..1.0) {
        let g = bernoulli_graph(10, 0.85, &mut rng(seed));
        let inst = gen_instance(10, 4, 3.0, 0.0, &g, seed).unwrap();
        if let (Ok(a), Ok(b)) = (
            rescaled_parameter(&inst.m_star, &g, s1, &inst.support),
            rescaled_parameter(&inst.m_star, &g, s1 + ds, &inst.support),
        ) {
            prop_assert!(b >= a - 1e-12);
        }
    }

    #[test]
    fn homogeneous_conditions_scale(seed in any::<u64>(), t in 0.1f64..10.0) {
        let g = bernoulli_graph(10, 0.85, &mut rng(seed));
        let inst = gen_instance(10, 3, 3.0, 0.1, &g, seed).unwrap();
        let rho = 0.4;
        let a = sufficient_conditions_report(&inst.m_star, &g, 0.1, rho, &inst.support).unwrap();
        let b = sufficient_conditions_report(&inst.m_star.scale(t), &g, 0.1 * t, rho * t, &inst.support).unwrap();
        for k in [0, 2, 3] {
            let (x, y) = (&a.ineq[k], &b.ineq[k]);
            let margin = (x.rhs - x.lhs).abs() / x.rhs.abs().max(x.lhs.abs()).max(1e-300);
            if margin > 1e-9 {
                prop_assert_eq!(x.holds, y.holds, "inequality {}", x.name);
            }
        }
        prop_assert_eq!(a, sufficient_conditions_report(&inst.m_star, &g, 0.1, rho, &inst.support).unwrap());
    }

    #[test]
    fn dtspca_permutes_with_input(seed in any::<u64>(), k in 1usize..8) {
        let mut r = rng(seed);
        let m = gaussian_sym(8, &mut r);
        let mut perm: Vec<usize> = (0..8).collect();
        perm.shuffle(&mut r);
        let base = dtspca(&m, k).unwrap().support;
        let moved = dtspca(&m.permute(&perm), k).unwrap().support;
        // permute sends old index i to perm[i]
        let mut back: Vec<usize> = moved.iter().map(|&p| perm.iter().position(|&q| q == p).unwrap()).collect();
        back.sort_unstable();
        prop_assert_eq!(back, base);
    }

    #[test]
    fn itspca_without_threshold_is_power_method(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = gaussian_sym(7, &mut r);
        let m = b.to_matrix().gram_rows();
        let e = eigh(&m).unwrap();
        prop_assume!(e.values[0] - e.values[1] > 1e-2 * e.values[0]);
        let res = itspca(&m, 0.0, 100_000, 1e-10, None).unwrap();
        let u = e.vector(0);
        let want: Vec<usize> = (0..7).filter(|&i| u[i] != 0.0).collect();
        prop_assert_eq!(res.support, want);
    }
}

#[test]
fn gen_instance_leading_vector_magnitudes() {
    let g = ObservationGraph::complete(15, true);
    for seed in 0..10 {
        let inst = gen_instance(15, 5, 1.5, 0.0, &g, seed).unwrap();
        let u = eigh(&inst.m_star).unwrap().vector(0);
        let min = inst.support.iter().map(|&i| u[i].abs()).fold(f64::INFINITY, f64::min);
        assert!((min - 1.0 / 5f64.sqrt()).abs() <= 1e-12);
        assert_eq!(inst.m, inst.m_star);
        assert!(inst.m.sub(&inst.m.permute(&(0..15).collect::<Vec<_>>())).is_zero());
    }
}

#[test]
fn rank_one_completion() {
    let mut r = rng(21);
    let u: Vec<f64> = (0..10).map(|_| r.random_range(0.5..1.5)).collect();
    let m_star = SymMatrix::outer(&u);
    let g = bernoulli_graph(10, 0.8, &mut r);
    let c = complete_nuclear(&m_star.hadamard(&g.adjacency()), &g, COMPLETION_TOL, COMPLETION_MAX_ITER).unwrap();
    let rel = c.matrix.sub(&m_star).frobenius_norm() / m_star.frobenius_norm();
    assert!(rel <= 0.05, "relative error {rel}");
    for (i, j) in g.edges() {
        assert!((c.matrix[(i, j)] - m_star[(i, j)]).abs() <= COMPLETION_TOL);
    }
}

#[test]
fn full_rank_completion_is_poor() {
    let g = bernoulli_graph(20, 0.5, &mut rng(4));
    let inst = gen_instance(20, 4, 1.0, 0.0, &g, 4).unwrap();
    let c = complete_nuclear(&inst.m, &g, COMPLETION_TOL, COMPLETION_MAX_ITER).unwrap();
    let rel = c.matrix.sub(&inst.m_star).frobenius_norm() / inst.m_star.frobenius_norm();
    assert!(rel > 0.2, "relative error {rel}");
}

#[test]
fn mc_then_sdp_on_well_observed_spike() {
    let support = [1, 4, 6];
    let m_star = spiked(10, &support, 5.0, 0.0, 2);
    let g = bernoulli_graph(10, 0.9, &mut rng(2));
    let r = mc_then_sdp(&m_star.hadamard(&g.adjacency()), &g, 0.2, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(r.support, support);
}

#[test]
fn certified_rank_one_is_recovered() {
    for seed in 0..10 {
        let support = [0, 3, 5, 8];
        let m_star = spiked(10, &support, 4.0, 0.0, seed);
        let g = ObservationGraph::complete(10, true);
        let w = witness_certificate(&m_star, &g, &m_star, 0.2, &support).unwrap();
        assert!(w.certified, "{w:?}");
        let sol = sdp::solve_sdp(&m_star, 0.2, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(sol.support, support);
        assert_kkt(&m_star, 0.2, &sol);
    }
}
