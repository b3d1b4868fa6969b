use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::graph::ObservationGraph;
use crate::numerics::SymMatrix;
use crate::{Error, Result};

/// Ground truth, sampling pattern and the realized zero-imputed observation.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub m_star: SymMatrix,
    /// Sorted support of the leading eigenvector of `m_star`.
    pub support: Vec<usize>,
    pub sigma: f64,
    pub graph: ObservationGraph,
    /// `A_G ∘ (M* + N)`.
    pub m: SymMatrix,
    pub seed: u64,
}

/// Random instance with a uniformly chosen support of size `s`.
pub fn gen_instance(
    d: usize,
    s: usize,
    gap: f64,
    sigma: f64,
    graph: &ObservationGraph,
    rng_seed: u64,
) -> Result<ProblemInstance> {
    check_sizes(d, s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let support = random_support(d, s, &mut rng);
    let mut inst = gen_instance_on_support(&support, d, gap, sigma, graph, &mut rng)?;
    inst.seed = rng_seed;
    Ok(inst)
}

fn check_sizes(d: usize, s: usize) -> Result<()> {
    if s == 0 || s > d {
        return Err(Error::invalid(format!("need 1 <= s <= d, got s = {s}, d = {d}")));
    }
    Ok(())
}

/// Uniform size-`s` subset of `0..d`, sorted.
pub fn random_support<R: Rng + ?Sized>(d: usize, s: usize, rng: &mut R) -> Vec<usize> {
    let mut j = index::sample(rng, d, s).into_vec();
    j.sort_unstable();
    j
}

/// Instance whose leading eigenvector is `1/√s` on `support` and zero
/// elsewhere.
///
/// The other eigenvectors complete it to a random orthonormal basis; the
/// eigenvalues λ₂ ≥ … ≥ λ_d are sorted standard normals and λ₁ = λ₂ + gap.
/// Noise is `N(0, σ²)`, drawn once per observed unordered pair. The `seed`
/// field of the result is 0; callers that own a seed should set it.
pub fn gen_instance_on_support<R: Rng + ?Sized>(
    support: &[usize],
    d: usize,
    gap: f64,
    sigma: f64,
    graph: &ObservationGraph,
    rng: &mut R,
) -> Result<ProblemInstance> {
    check_sizes(d, support.len())?;
    if !(gap > 0.0) {
        return Err(Error::invalid(format!("spectral gap must be > 0, got {gap}")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::invalid(format!("sigma must be >= 0, got {sigma}")));
    }
    if graph.n() != d {
        return Err(Error::invalid("graph size differs from d"));
    }
    let mut support = support.to_vec();
    support.sort_unstable();
    if support.windows(2).any(|w| w[0] == w[1]) || support.iter().any(|&i| i >= d) {
        return Err(Error::invalid("support must hold distinct indices below d"));
    }

    let s = support.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut u1 = vec![0.0; d];
    for &i in &support {
        u1[i] = 1.0 / (s as f64).sqrt();
    }
    basis.push(u1);
    while basis.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        // two passes of Gram-Schmidt keep the basis orthonormal to rounding
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }

    let mut rest: Vec<f64> = (1..d).map(|_| rng.sample(StandardNormal)).collect();
    rest.sort_by(|a: &f64, b| b.total_cmp(a));
    let top = rest.first().copied().unwrap_or(0.0) + gap;
    let values: Vec<f64> = std::iter::once(top).chain(rest).collect();

    let m_star = SymMatrix::from_upper_fn(d, |i, j| {
        basis.iter().zip(&values).map(|(v, l)| l * v[i] * v[j]).sum()
    });

    let m = observe(&m_star, graph, sigma, rng);

    Ok(ProblemInstance {
        m_star,
        support,
        sigma,
        graph: graph.clone(),
        m,
        seed: 0,
    })
}

/// `A_G ∘ (M* + N)` with `N_ij ~ N(0, σ²)` drawn once per observed unordered
/// pair, in edge order.
pub(crate) fn observe<R: Rng + ?Sized>(
    m_star: &SymMatrix,
    graph: &ObservationGraph,
    sigma: f64,
    rng: &mut R,
) -> SymMatrix {
    let mut m = SymMatrix::zeros(m_star.dim());
    for (i, j) in graph.edges() {
        let noise: f64 = if sigma > 0.0 {
            sigma * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        m.set(i, j, m_star[(i, j)] + noise);
    }
    m
}
