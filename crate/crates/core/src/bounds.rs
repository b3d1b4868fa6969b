//! Executable checks of the two auxiliary bounds: the deterministic
//! difference bound between a matrix and its masked, rescaled copy, and the
//! spectral-norm tail bound for a random matrix supported on a fixed pattern.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::graph::{BipartiteSubgraph, ObservationGraph};
use crate::numerics::{eigh, spectral_norm, sym_spectral_norm, Matrix, SymMatrix};
use crate::{Error, Result};

/// Eigenvalues with `|λ| ≤ RANK_TOL · ‖Y‖₂` are outside the rank support.
pub const RANK_TOL: f64 = 1e-10;
/// Relative slack of the difference-bound comparison.
pub const DIFF_BOUND_SLACK: f64 = 1e-8;
pub const MIN_TRIALS: usize = 1000;

/// `τ = max_i Σ_k v²_{k,i}` over the eigenvectors of nonzero eigenvalues;
/// 0 for the zero matrix.
pub fn tau(y: &SymMatrix) -> Result<f64> {
    let e = eigh(y)?;
    let n = e.dim();
    let norm = e.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if norm == 0.0 {
        return Ok(0.0);
    }
    let rank: Vec<usize> = (0..n).filter(|&k| e.values[k].abs() > RANK_TOL * norm).collect();
    let mut best: f64 = 0.0;
    for i in 0..n {
        let w: f64 = rank.iter().map(|&k| e.vectors[(i, k)].powi(2)).sum();
        best = best.max(w);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffBoundCheck {
    /// `‖Y − (n/φ)·A_G ∘ Y‖₂`
    pub lhs: f64,
    /// `(nτψ/φ)·‖Y‖₂`
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates both sides of `‖Y − (n/φ(G))A_G∘Y‖₂ ≤ (nτψ(G)/φ(G))‖Y‖₂`.
pub fn theorem3_check(y: &SymMatrix, g: &ObservationGraph) -> Result<DiffBoundCheck> {
    let n = y.dim();
    if g.n() != n {
        return Err(Error::invalid("graph size differs from matrix"));
    }
    let phi = g.algebraic_connectivity()?;
    if phi == 0.0 {
        return Err(Error::Disconnected);
    }
    let psi = g.irregularity()?;
    let nf = n as f64;
    let masked = y.hadamard(&g.adjacency()).scale(nf / phi);
    let lhs = sym_spectral_norm(&y.sub(&masked))?;
    let y_norm = sym_spectral_norm(y)?;
    let rhs = nf * tau(y)? * psi / phi * y_norm;
    Ok(DiffBoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + DIFF_BOUND_SLACK * y_norm,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailBoundCheck {
    pub t: f64,
    /// `2(m+n)·exp(−t²/(2σ²Δmax))`
    pub bound: f64,
    /// Fraction of trials with `‖Z‖₂ ≥ t`.
    pub empirical: f64,
    pub trials: usize,
    /// Binomial standard error at `p = min(bound, 1)`.
    pub standard_error: f64,
    pub holds: bool,
}

/// `2(m+n)·exp(−t²/(2σ²Δmax))`. With no edges the exponent is `−∞` for
/// `t > 0` (bound 0) and taken as 0 at `t = 0`.
pub fn tail_bound(sigma: f64, rows: usize, cols: usize, max_degree: usize, t: f64) -> f64 {
    let prefactor = 2.0 * (rows + cols) as f64;
    if t == 0.0 {
        return prefactor;
    }
    let denom = 2.0 * sigma * sigma * max_degree as f64;
    if denom == 0.0 {
        return 0.0;
    }
    prefactor * (-t * t / denom).exp()
}

/// Monte-Carlo check of the tail bound with Gaussian entries on `pattern`.
///
/// Trial `k` draws from its own ChaCha stream `k` under `rng_seed`, so the
/// result does not depend on how trials are scheduled across threads.
pub fn theorem2_montecarlo(
    sigma: f64,
    pattern: &BipartiteSubgraph,
    t: f64,
    trials: usize,
    rng_seed: u64,
) -> Result<TailBoundCheck> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be > 0, got {sigma}")));
    }
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("t must be >= 0, got {t}")));
    }
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let (m, n) = (pattern.left().len(), pattern.right().len());
    let positions = pattern.positions();
    let exceed: usize = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(k as u64);
            let mut data = vec![0.0; m * n];
            for &(i, j) in &positions {
                data[i * n + j] = sigma * rng.sample::<f64, _>(StandardNormal);
            }
            let z = Matrix::from_row_major(m, n, data).expect("finite");
            let norm = spectral_norm(&z).expect("finite");
            usize::from(norm >= t)
        })
        .sum();
    let empirical = exceed as f64 / trials as f64;
    let bound = tail_bound(sigma, m, n, pattern.max_degree(), t);
    let p = bound.min(1.0);
    let standard_error = (p * (1.0 - p) / trials as f64).sqrt();
    Ok(TailBoundCheck {
        t,
        bound,
        empirical,
        trials,
        standard_error,
        holds: empirical <= bound + 3.0 * standard_error,
    })
}
