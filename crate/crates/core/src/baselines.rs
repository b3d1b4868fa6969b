//! Comparison methods: diagonal thresholding, iterative thresholding, and
//! nuclear-norm completion followed by the SDP.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::graph::ObservationGraph;
use crate::numerics::{eigh, soft_scalar, SymMatrix};
use crate::sdp;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Sdp,
    Dtspca,
    Itspca,
    McSdp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sdp => "SDP",
            Method::Dtspca => "DTSPCA",
            Method::Itspca => "ITSPCA",
            Method::McSdp => "MC+SDP",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostics {
    Diagonal {
        k: usize,
    },
    Iterative {
        threshold: f64,
        iterations: usize,
        converged: bool,
    },
    Completion {
        completion_iterations: usize,
        completion_converged: bool,
        sdp_iterations: usize,
        sdp_converged: bool,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineResult {
    pub method: Method,
    pub support: Vec<usize>,
    pub diagnostics: Diagnostics,
}

/// Indices of the `k` largest diagonal entries (lowest index first on ties),
/// returned sorted.
pub fn dtspca(m: &SymMatrix, k: usize) -> Result<BaselineResult> {
    let d = m.dim();
    if k == 0 || k > d {
        return Err(Error::invalid(format!("need 1 <= k <= {d}, got {k}")));
    }
    let diag = m.diagonal();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let mut support = order[..k].to_vec();
    support.sort_unstable();
    Ok(BaselineResult {
        method: Method::Dtspca,
        support,
        diagnostics: Diagnostics::Diagonal { k },
    })
}

/// Power iteration with entrywise soft thresholding after each product.
///
/// Starts from the normalized all-ones vector, or from a random unit vector
/// when `rng_seed` is given.
pub fn itspca(
    m: &SymMatrix,
    threshold: f64,
    max_iter: usize,
    tol: f64,
    rng_seed: Option<u64>,
) -> Result<BaselineResult> {
    let d = m.dim();
    if d == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    if !(threshold >= 0.0) {
        return Err(Error::invalid(format!("threshold must be >= 0, got {threshold}")));
    }
    let mut v: Vec<f64> = match rng_seed {
        None => vec![1.0; d],
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..d).map(|_| rng.sample(StandardNormal)).collect()
        }
    };
    normalize(&mut v);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let mut w: Vec<f64> = m.matvec(&v).into_iter().map(|x| soft_scalar(x, threshold)).collect();
        if w.iter().all(|&x| x == 0.0) {
            return Err(Error::ThresholdTooLarge(threshold));
        }
        normalize(&mut w);
        let step = w.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        v = w;
        if step <= tol {
            converged = true;
            break;
        }
    }
    Ok(BaselineResult {
        method: Method::Itspca,
        support: (0..d).filter(|&i| v[i] != 0.0).collect(),
        diagnostics: Diagnostics::Iterative {
            threshold,
            iterations,
            converged,
        },
    })
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

pub const COMPLETION_TOL: f64 = 1e-6;
pub const COMPLETION_MAX_ITER: usize = 5000;
const COMPLETION_BETA: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct Completion {
    /// Symmetric completion; equals `M` on every observed entry.
    pub matrix: SymMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Final `‖Z − Y‖F` between the low-rank and the data-consistent block.
    pub residual: f64,
}

/// `argmin ‖Y‖* s.t. Y = Yᵀ, A_G ∘ Y = A_G ∘ M` by ADMM.
///
/// Splits into a nuclear-norm block `Z` (symmetric singular-value
/// thresholding via the eigendecomposition) and a data block `Y` that
/// copies the observed entries; the returned matrix is the data block.
pub fn complete_nuclear(
    m: &SymMatrix,
    g: &ObservationGraph,
    tol: f64,
    max_iter: usize,
) -> Result<Completion> {
    let d = m.dim();
    if g.n() != d {
        return Err(Error::invalid("graph size differs from matrix"));
    }
    if g.edge_count() == 0 {
        return Err(Error::invalid("matrix completion needs at least one observed entry"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be > 0, got {tol}")));
    }
    let observed = g.adjacency();
    let mut y = m.hadamard(&observed);
    let mut u = SymMatrix::zeros(d);
    let t = 1.0 / COMPLETION_BETA;
    let scale = m.hadamard(&observed).frobenius_norm().max(1.0);
    let mut iterations = 0;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    while iterations < max_iter {
        iterations += 1;
        let e = eigh(&y.sub(&u))?;
        let shrunk: Vec<f64> = e.values.iter().map(|&l| l.signum() * (l.abs() - t).max(0.0)).collect();
        let z = e.reconstruct_with(&shrunk);
        let free = z.add(&u);
        let next = SymMatrix::from_upper_fn(d, |i, j| {
            if g.has_edge(i, j) {
                m[(i, j)]
            } else {
                free[(i, j)]
            }
        });
        let primal = z.sub(&next).frobenius_norm();
        let dual = COMPLETION_BETA * next.sub(&y).frobenius_norm();
        u = u.add(&z.sub(&next));
        y = next;
        residual = primal;
        if primal <= tol * scale && dual <= tol * scale {
            converged = true;
            break;
        }
    }
    Ok(Completion {
        matrix: y,
        iterations,
        converged,
        residual,
    })
}

/// Completes `M` by nuclear-norm minimization, then runs the SDP at `rho`.
pub fn mc_then_sdp(
    m: &SymMatrix,
    g: &ObservationGraph,
    rho: f64,
    tol: f64,
    max_iter: usize,
) -> Result<BaselineResult> {
    let c = complete_nuclear(m, g, COMPLETION_TOL, COMPLETION_MAX_ITER)?;
    let s = sdp::solve_sdp(&c.matrix, rho, tol, max_iter)?;
    Ok(BaselineResult {
        method: Method::McSdp,
        support: s.support,
        diagnostics: Diagnostics::Completion {
            completion_iterations: c.iterations,
            completion_converged: c.converged,
            sdp_iterations: s.iterations,
            sdp_converged: s.converged,
        },
    })
}
