#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spca_core::numerics::SymMatrix;
use spca_core::ObservationGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with independent standard normal upper-triangle entries.
pub fn gaussian_sym(d: usize, rng: &mut impl Rng) -> SymMatrix {
    SymMatrix::from_upper_fn(d, |_, _| rng.sample(StandardNormal))
}

/// Graph keeping each unordered pair (loops included) with probability `p`.
pub fn bernoulli_graph(n: usize, p: f64, rng: &mut impl Rng) -> ObservationGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    ObservationGraph::from_edges(n, edges).unwrap()
}
