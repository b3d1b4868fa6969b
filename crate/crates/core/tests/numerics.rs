mod common;

use proptest::prelude::*;
use spca_core::numerics::{
    eigh, project_simplex, project_spectrahedron, soft_threshold, spectral_norm, Matrix, SymMatrix,
};

use common::{gaussian_sym, rng};

/// Grid search for the nearest point of the 2-simplex, step 1e-3.
fn simplex_grid_oracle(v: &[f64; 3]) -> [f64; 3] {
    let steps = 1000;
    let mut best = ([0.0; 3], f64::INFINITY);
    for a in 0..=steps {
        for b in 0..=(steps - a) {
            let w = [a as f64 / steps as f64, b as f64 / steps as f64, (steps - a - b) as f64 / steps as f64];
            let dist: f64 = w.iter().zip(v).map(|(x, y)| (x - y) * (x - y)).sum();
            if dist < best.1 {
                best = (w, dist);
            }
        }
    }
    best.0
}

#[test]
fn eigh_reconstructs_1000_matrices() {
    let mut r = rng(17);
    for case in 0..1000 {
        let d = 2 + case % 29;
        let a = gaussian_sym(d, &mut r);
        let e = eigh(&a).unwrap();
        let err = e.reconstruct().sub(&a).max_abs();
        assert!(err <= 1e-8, "case {case}: reconstruction error {err}");
        for p in 0..d {
            for q in p..d {
                let dot: f64 = (0..d).map(|i| e.vectors[(i, p)] * e.vectors[(i, q)]).sum();
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((dot - want).abs() <= 1e-10, "case {case}: vectors {p},{q} dot {dot}");
            }
        }
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn simplex_matches_grid(v in prop::array::uniform3(-2.0f64..2.0)) {
        let w = project_simplex(&v).unwrap();
        let oracle = simplex_grid_oracle(&v);
        for k in 0..3 {
            prop_assert!((w[k] - oracle[k]).abs() <= 2e-3, "{w:?} vs {oracle:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_output_is_feasible(v in prop::collection::vec(-5.0f64..5.0, 1..20)) {
        let w = project_simplex(&v).unwrap();
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrahedron_projection_is_idempotent(seed in any::<u64>(), d in 1usize..12) {
        let a = gaussian_sym(d, &mut rng(seed));
        let p = project_spectrahedron(&a).unwrap();
        let pp = project_spectrahedron(&p).unwrap();
        prop_assert!(pp.sub(&p).max_abs() <= 1e-10);
        prop_assert!((p.trace() - 1.0).abs() <= 1e-10);
        prop_assert!(eigh(&p).unwrap().values.last().copied().unwrap() >= -1e-10);
    }

    #[test]
    fn spectral_norm_of_transpose(seed in any::<u64>(), m in 1usize..9, n in 1usize..9) {
        let mut r = rng(seed);
        let a = Matrix::from_fn(m, n, |_, _| rand::Rng::sample::<f64, _>(&mut r, rand_distr::StandardNormal));
        let x = spectral_norm(&a).unwrap();
        let y = spectral_norm(&a.transpose()).unwrap();
        prop_assert!((x - y).abs() <= 1e-10 * x.max(1.0));
    }

    #[test]
    fn soft_threshold_is_lipschitz(x in -10.0f64..10.0, y in -10.0f64..10.0, t in 0.0f64..5.0) {
        let sx = soft_threshold(&SymMatrix::diag(&[x]), t).unwrap()[(0, 0)];
        let sy = soft_threshold(&SymMatrix::diag(&[y]), t).unwrap()[(0, 0)];
        prop_assert!((sx - sy).abs() <= (x - y).abs() + 1e-15);
    }
}
