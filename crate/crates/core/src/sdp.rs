//! The ℓ1-penalized SDP, its KKT diagnostics and the primal-dual witness
//! certificate.
//!
//! The solver is two-block ADMM on
//!
//! ```text
//!     minimize  −⟨M, X⟩ + ρ‖Y‖₁,₁ + 1{X ⪰ 0, tr X = 1}   subject to  X = Y
//! ```
//!
//! with scaled dual `U`: `X ← Π(Y − U + M/β)`, `Y ← soft(X + U, ρ/β)`,
//! `U ← U + X − Y`. At every iterate `βU/ρ` is an exact subgradient of
//! `‖·‖₁,₁` at `Y`, which is what the KKT report consumes.

use crate::graph::ObservationGraph;
use crate::numerics::{
    eigh, project_spectrahedron_with_basis, soft_scalar, EigDecomp, Matrix, SymMatrix,
};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 20_000;
/// Diagonal entries above this fraction of the largest one are in the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-4;

/// Margin for the strict inequalities of the witness certificate.
const STRICT_MARGIN: f64 = 1e-10;

const BETA_INIT: f64 = 1.0;
const BETA_MIN: f64 = 1e-6;
const BETA_MAX: f64 = 1e6;
/// Residual ratio that triggers a penalty update.
const BALANCE_RATIO: f64 = 10.0;
/// Iterations between penalty updates.
const BALANCE_EVERY: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// The primal iterate `X`, feasible up to eigensolver accuracy.
    pub x_hat: SymMatrix,
    /// `⟨M, X̂⟩ − ρ‖X̂‖₁,₁`.
    pub objective: f64,
    pub iterations: usize,
    /// `‖X − Y‖F / max(‖X‖F, ‖Y‖F)`.
    pub primal_residual: f64,
    /// `β‖Yₖ₊₁ − Yₖ‖F / max(‖M‖F, ‖βU‖F)`.
    pub dual_residual: f64,
    pub support: Vec<usize>,
    /// False when `max_iter` was reached first.
    pub converged: bool,
    /// Subgradient `Ẑ = βU/ρ` of the penalty; `None` when ρ = 0.
    pub dual: Option<SymMatrix>,
    /// Augmented Lagrangian after every iteration.
    pub merit: Vec<f64>,
}

impl SdpSolution {
    /// Turns a non-converged solution into [`Error::NotConverged`].
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
            })
        }
    }
}

/// Solver state carried between solves on the same `M`, e.g. along a ρ grid.
#[derive(Clone, Debug)]
pub struct WarmStart {
    y: SymMatrix,
    /// Penalty subgradient, rescaled to the new ρ on reuse.
    z: Option<SymMatrix>,
    beta: f64,
    basis: Matrix,
}

pub fn solve_sdp(m: &SymMatrix, rho: f64, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    solve_sdp_warm(m, rho, SolverOptions { tol, max_iter }, None).map(|(s, _)| s)
}

/// [`solve_sdp`] from an optional warm start; also returns the final state.
pub fn solve_sdp_warm(
    m: &SymMatrix,
    rho: f64,
    opts: SolverOptions,
    warm: Option<&WarmStart>,
) -> Result<(SdpSolution, WarmStart)> {
    check_args(m, rho, opts)?;
    let d = m.dim();
    let warm = warm.filter(|w| w.y.dim() == d);

    let mut beta = warm.map_or(BETA_INIT, |w| w.beta);
    let mut y = warm.map_or_else(|| SymMatrix::identity(d).scale(1.0 / d as f64), |w| w.y.clone());
    let mut u = match warm.and_then(|w| w.z.as_ref()) {
        Some(z) if rho > 0.0 => z.scale(rho / beta),
        _ => SymMatrix::zeros(d),
    };
    let mut basis = warm.map_or_else(|| SymMatrix::identity(d).to_matrix(), |w| w.basis.clone());

    let m_norm = m.frobenius_norm();
    let mut x = y.clone();
    let mut merit = Vec::new();
    let mut primal_residual = f64::INFINITY;
    let mut dual_residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    let mut w = SymMatrix::zeros(d);
    while iterations < opts.max_iter {
        iterations += 1;

        for ((wi, &yi), (&ui, &mi)) in w
            .data_mut()
            .iter_mut()
            .zip(y.as_slice())
            .zip(u.as_slice().iter().zip(m.as_slice()))
        {
            *wi = yi - ui + mi / beta;
        }
        let (x_new, eig) = project_spectrahedron_with_basis(&w, &basis)?;
        x = x_new;
        basis = eig.vectors;

        let t = rho / beta;
        let mut dy2 = 0.0;
        let mut r2 = 0.0;
        let mut x2 = 0.0;
        let mut y2 = 0.0;
        let mut u2 = 0.0;
        let mut y_l1 = 0.0;
        let mut ux = 0.0;
        let mut lin = 0.0;
        {
            let yd = y.data_mut();
            let ud = u.data_mut();
            for (k, &xk) in x.as_slice().iter().enumerate() {
                let uk = ud[k];
                let yk = soft_scalar(xk + uk, t);
                let diff = xk - yk;
                let step = yk - yd[k];
                dy2 += step * step;
                yd[k] = yk;
                let un = uk + diff;
                ud[k] = un;
                r2 += diff * diff;
                x2 += xk * xk;
                y2 += yk * yk;
                u2 += un * un;
                y_l1 += yk.abs();
                ux += un * diff;
                lin += m.as_slice()[k] * xk;
            }
        }

        merit.push(-lin + rho * y_l1 + beta * ux + 0.5 * beta * r2);

        let scale = x2.sqrt().max(y2.sqrt());
        primal_residual = if scale > 0.0 { r2.sqrt() / scale } else { 0.0 };
        let dual_scale = m_norm.max(beta * u2.sqrt());
        dual_residual = beta * dy2.sqrt() / if dual_scale > 0.0 { dual_scale } else { 1.0 };

        if primal_residual <= opts.tol && dual_residual <= opts.tol {
            converged = true;
            break;
        }

        if iterations % BALANCE_EVERY == 0 {
            let factor = if primal_residual > BALANCE_RATIO * dual_residual {
                2.0
            } else if dual_residual > BALANCE_RATIO * primal_residual {
                0.5
            } else {
                1.0
            };
            let next = (beta * factor).clamp(BETA_MIN, BETA_MAX);
            if next != beta {
                u = u.scale(beta / next);
                beta = next;
            }
        }
    }

    let dual = (rho > 0.0).then(|| u.scale(beta / rho));
    let support = support_of(&x, SUPPORT_THRESHOLD)?;
    let objective = m.inner(&x) - rho * x.l1_norm();
    let state = WarmStart {
        y,
        z: dual.clone(),
        beta,
        basis,
    };
    let solution = SdpSolution {
        x_hat: x,
        objective,
        iterations,
        primal_residual,
        dual_residual,
        support,
        converged,
        dual,
        merit,
    };
    Ok((solution, state))
}

fn check_args(m: &SymMatrix, rho: f64, opts: SolverOptions) -> Result<()> {
    if m.dim() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::invalid(format!("rho must be finite and >= 0, got {rho}")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid(format!("tol must be > 0, got {}", opts.tol)));
    }
    Ok(())
}

/// The SDP with `supp(X) ⊆ support × support`, embedded back into `d × d`.
pub fn solve_restricted(
    m: &SymMatrix,
    rho: f64,
    support: &[usize],
    tol: f64,
    max_iter: usize,
) -> Result<SdpSolution> {
    check_index_set(support, m.dim())?;
    if support.is_empty() {
        return Err(Error::invalid("restricted support must be nonempty"));
    }
    let sub = m.submatrix(support);
    let s = solve_sdp(&sub, rho, tol, max_iter)?;
    let d = m.dim();
    let x_hat = s.x_hat.embed(support, d);
    Ok(SdpSolution {
        support: support_of(&x_hat, SUPPORT_THRESHOLD)?,
        x_hat,
        dual: s.dual.map(|z| z.embed(support, d)),
        ..s
    })
}

/// `{i : X_ii > threshold · max_j X_jj}`; empty when the diagonal has no
/// positive entry.
pub fn support_of(x_hat: &SymMatrix, threshold: f64) -> Result<Vec<usize>> {
    if !(threshold > 0.0) {
        return Err(Error::invalid(format!("support threshold must be > 0, got {threshold}")));
    }
    let diag = x_hat.diagonal();
    let top = diag.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return Ok(Vec::new());
    }
    Ok((0..diag.len()).filter(|&i| diag[i] > threshold * top).collect())
}

fn check_index_set(idx: &[usize], d: usize) -> Result<()> {
    let mut seen = vec![false; d];
    for &i in idx {
        if i >= d {
            return Err(Error::invalid(format!("index {i} out of range for dimension {d}")));
        }
        if seen[i] {
            return Err(Error::invalid(format!("index {i} repeated")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Residuals of the optimality system
/// `X ⪰ 0, tr X = 1, M − ρẐ ⪯ μI, Ẑ ∈ ∂‖X‖₁,₁, (M − ρẐ)X = μX`.
#[derive(Clone, Debug, PartialEq)]
pub struct KktReport {
    /// `μ̂ = λ₁(M − ρẐ)`.
    pub mu: f64,
    /// `‖(M − ρẐ)X̂ − μ̂X̂‖max`.
    pub stationarity: f64,
    /// `|tr X̂ − 1|`.
    pub trace_violation: f64,
    /// `max(0, −λmin(X̂))`.
    pub psd_violation: f64,
    /// Distance of `Ẑ` from `∂‖X̂‖₁,₁` on clearly nonzero entries, plus any
    /// excess of `|Ẑ|` over 1.
    pub subgradient_violation: f64,
    /// `λmin(μ̂I − M + ρẐ)`; nonnegative by construction of μ̂.
    pub dual_min_eig: f64,
}

impl KktReport {
    pub fn feasibility_violation(&self) -> f64 {
        self.trace_violation.max(self.psd_violation)
    }
}

/// KKT residuals of `x_hat`. Uses `dual` as `Ẑ` when given (e.g. the solver's
/// [`SdpSolution::dual`]); otherwise builds one from `x_hat` and `m`.
pub fn kkt_report(
    m: &SymMatrix,
    rho: f64,
    x_hat: &SymMatrix,
    dual: Option<&SymMatrix>,
) -> Result<KktReport> {
    let d = m.dim();
    if x_hat.dim() != d {
        return Err(Error::invalid("kkt_report: dimension mismatch"));
    }
    let x_eig = eigh(x_hat)?;
    let z = match dual {
        Some(z) if z.dim() == d => z.clone(),
        Some(_) => return Err(Error::invalid("kkt_report: dual dimension mismatch")),
        None => constructed_subgradient(m, rho, x_hat, &x_eig),
    };
    let shifted = m.sub(&z.scale(rho));
    let e = eigh(&shifted)?;
    let mu = e.values[0];
    let prod = matmul_sym(&shifted, x_hat);
    let mut stationarity: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            stationarity = stationarity.max((prod[i * d + j] - mu * x_hat[(i, j)]).abs());
        }
    }

    let cut = 1e-6 * x_hat.max_abs();
    let mut subgradient_violation: f64 = 0.0;
    for (&xk, &zk) in x_hat.as_slice().iter().zip(z.as_slice()) {
        subgradient_violation = subgradient_violation.max(zk.abs() - 1.0);
        if xk.abs() > cut {
            subgradient_violation = subgradient_violation.max((zk - xk.signum()).abs());
        }
    }

    Ok(KktReport {
        mu,
        stationarity,
        trace_violation: (x_hat.trace() - 1.0).abs(),
        psd_violation: (-x_eig.values[d - 1]).max(0.0),
        subgradient_violation: subgradient_violation.max(0.0),
        dual_min_eig: mu - e.values[0],
    })
}

/// `sign(X̂)` on nonzero entries; zero entries get the witness formula on the
/// cross block (rows outside the diagonal support, columns inside) and
/// `clamp(M/ρ, −1, 1)` elsewhere.
fn constructed_subgradient(m: &SymMatrix, rho: f64, x_hat: &SymMatrix, x_eig: &EigDecomp) -> SymMatrix {
    let d = m.dim();
    if rho == 0.0 {
        return SymMatrix::zeros(d);
    }
    let cut = 1e-8 * x_hat.max_abs();
    let support = support_of(x_hat, SUPPORT_THRESHOLD).unwrap_or_default();
    let mut inside = vec![false; d];
    for &i in &support {
        inside[i] = true;
    }
    let v = x_eig.vector(0);
    let v_l1: f64 = support.iter().map(|&j| v[j].abs()).sum();
    let cross_row: Vec<f64> = (0..d)
        .map(|i| support.iter().map(|&j| m[(i, j)] * v[j]).sum::<f64>())
        .collect();
    SymMatrix::from_upper_fn(d, |i, j| {
        let x = x_hat[(i, j)];
        if x.abs() > cut {
            return x.signum();
        }
        let raw = match (inside[i], inside[j]) {
            (false, true) if v_l1 > 0.0 => cross_row[i] * v[j].signum() / (rho * v_l1),
            (true, false) if v_l1 > 0.0 => cross_row[j] * v[i].signum() / (rho * v_l1),
            _ => m[(i, j)] / rho,
        };
        raw.clamp(-1.0, 1.0)
    })
}

fn matmul_sym(a: &SymMatrix, b: &SymMatrix) -> Vec<f64> {
    let d = a.dim();
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        let ai = a.row(i);
        for k in 0..d {
            let aik = ai[k];
            if aik == 0.0 {
                continue;
            }
            for (o, &bkj) in out[i * d..(i + 1) * d].iter_mut().zip(b.row(k)) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// Outcome of the primal-dual witness construction.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    /// `sign(x̂) = ±sign(u₁,J)` with no zero entries.
    pub cond_sign: bool,
    /// `‖Ẑ_{Jᶜ,J}‖max < 1`.
    pub cond_offblock: bool,
    pub max_offblock: f64,
    /// `λ₁(M − ρẐ) = λ₁(M_JJ − ρẑẑᵀ)` and `‖Ẑ_{Jᶜ,Jᶜ}‖max < 1`.
    pub cond_eig: bool,
    pub lambda1_full: f64,
    pub lambda1_block: f64,
    pub max_complement_block: f64,
    /// `λ₁ − λ₂` of `M_JJ − ρẑẑᵀ` is positive.
    pub cond_gap: bool,
    pub gap: f64,
    pub certified: bool,
    /// The candidate leading vector on `J`, oriented so `ẑᵀx̂ ≥ 0`.
    pub x_hat: Vec<f64>,
}

/// Builds the witness `(X̂, Ẑ)` for support `support` and checks the
/// conditions under which `X̂ = x̂x̂ᵀ` (embedded) is the unique SDP optimum.
///
/// The `Jᶜ × Jᶜ` block of `Ẑ` uses `E[M] = A_G ∘ M*`, so this needs the
/// ground truth and is meant as an oracle-side diagnostic.
pub fn witness_certificate(
    m_star: &SymMatrix,
    g: &ObservationGraph,
    m: &SymMatrix,
    rho: f64,
    support: &[usize],
) -> Result<WitnessReport> {
    let d = m.dim();
    if m_star.dim() != d || g.n() != d {
        return Err(Error::invalid("witness_certificate: dimension mismatch"));
    }
    if !(rho > 0.0) {
        return Err(Error::invalid("witness_certificate needs rho > 0"));
    }
    check_index_set(support, d)?;
    if support.is_empty() {
        return Err(Error::invalid("witness_certificate: empty support"));
    }
    let s = support.len();
    let u1 = eigh(m_star)?.vector(0);
    let mut z = Vec::with_capacity(s);
    for &i in support {
        if u1[i] == 0.0 {
            return Err(Error::invalid(format!(
                "leading eigenvector of the truth vanishes at support index {i}"
            )));
        }
        z.push(u1[i].signum());
    }
    let mut in_support = vec![false; d];
    for &i in support {
        in_support[i] = true;
    }
    let comp: Vec<usize> = (0..d).filter(|&i| !in_support[i]).collect();

    let block = m.submatrix(support).sub(&SymMatrix::outer(&z).scale(rho));
    let be = eigh(&block)?;
    let lambda1_block = be.values[0];
    let gap = if s == 1 { f64::INFINITY } else { be.values[0] - be.values[1] };
    let mut x = be.vector(0);
    if x.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let cond_sign = x.iter().zip(&z).all(|(&xi, &zi)| xi != 0.0 && xi.signum() == zi);

    let x_l1: f64 = x.iter().map(|v| v.abs()).sum();
    let cross = m.block(&comp, support);
    let cross_x = cross.matvec(&x);

    // full Ẑ, assembled in the original coordinates
    let mut zfull = SymMatrix::zeros(d);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            zfull.set(i, j, z[a] * z[b]);
        }
    }
    let mut max_offblock: f64 = 0.0;
    for (r, &i) in comp.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            let v = cross_x[r] * z[b] / (rho * x_l1);
            max_offblock = max_offblock.max(v.abs());
            zfull.set(i, j, v);
        }
    }
    let mut max_complement_block: f64 = 0.0;
    for &i in &comp {
        for &j in &comp {
            let expected = if g.has_edge(i, j) { m_star[(i, j)] } else { 0.0 };
            let v = (m[(i, j)] - expected) / rho;
            max_complement_block = max_complement_block.max(v.abs());
            zfull.set(i, j, v);
        }
    }
    let lambda1_full = eigh(&m.sub(&zfull.scale(rho)))?.values[0];

    let cond_offblock = max_offblock < 1.0 - STRICT_MARGIN;
    let cond_eig = lambda1_full <= lambda1_block + STRICT_MARGIN * lambda1_block.abs().max(1.0)
        && max_complement_block < 1.0 - STRICT_MARGIN;
    let cond_gap = gap > STRICT_MARGIN;
    Ok(WitnessReport {
        cond_sign,
        cond_offblock,
        max_offblock,
        cond_eig,
        lambda1_full,
        lambda1_block,
        max_complement_block,
        cond_gap,
        gap,
        certified: cond_sign && cond_offblock && cond_eig && cond_gap,
        x_hat: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &SymMatrix, b: &SymMatrix, tol: f64) -> bool {
        a.sub(b).frobenius_norm() <= tol
    }

    fn e1(d: usize) -> SymMatrix {
        let mut v = vec![0.0; d];
        v[0] = 1.0;
        SymMatrix::outer(&v)
    }

    /// Objective on the 2×2 spectrahedron `w·vvᵀ + (1−w)·v⊥v⊥ᵀ`, v at angle θ.
    fn brute_force_2x2(m: &SymMatrix, rho: f64) -> (f64, SymMatrix) {
        let mut best = (f64::NEG_INFINITY, SymMatrix::zeros(2));
        let steps = 1000;
        for a in 0..steps {
            let th = std::f64::consts::PI * a as f64 / steps as f64;
            let (c, s) = (th.cos(), th.sin());
            for b in 0..=steps {
                let w = b as f64 / steps as f64;
                let x = SymMatrix::outer(&[c, s])
                    .scale(w)
                    .add(&SymMatrix::outer(&[-s, c]).scale(1.0 - w));
                let f = m.inner(&x) - rho * x.l1_norm();
                if f > best.0 {
                    best = (f, x);
                }
            }
        }
        best
    }

    #[test]
    fn leading_eigenvector_at_rho_zero() {
        let m = SymMatrix::diag(&[3.0, 1.0]);
        let s = solve_sdp(&m, 0.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(s.converged);
        assert!(close(&s.x_hat, &e1(2), 1e-4));

        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let s = solve_sdp(&m, 0.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(close(&s.x_hat, &SymMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(), 1e-4));
    }

    #[test]
    fn diagonal_with_penalty_matches_brute_force() {
        let m = SymMatrix::diag(&[3.0, 1.0]);
        let (best, x_bf) = brute_force_2x2(&m, 0.5);
        let s = solve_sdp(&m, 0.5, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(close(&s.x_hat, &e1(2), 1e-4));
        assert!(close(&x_bf, &e1(2), 1e-2));
        assert!((s.objective - 2.5).abs() < 1e-6);
        assert!(s.objective >= best - 1e-9);
        assert_eq!(s.support, vec![0]);
    }

    #[test]
    fn brute_force_agrees_on_a_coupled_matrix() {
        let m = SymMatrix::from_rows(&[vec![1.0, 0.8], vec![0.8, 0.6]]).unwrap();
        let (best, _) = brute_force_2x2(&m, 0.3);
        let s = solve_sdp(&m, 0.3, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(s.objective >= best - 1e-6);
        assert!(s.objective <= best + 1e-3);
    }

    #[test]
    fn restricted_examples() {
        let m = SymMatrix::from_upper_fn(4, |i, j| if i == j { 4.0 - i as f64 } else { 0.3 });
        let full = solve_sdp(&m, 0.1, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let r = solve_restricted(&m, 0.1, &[0, 1, 2, 3], DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(close(&full.x_hat, &r.x_hat, 1e-6));

        let r = solve_restricted(&m, 0.2, &[0], DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(close(&r.x_hat, &e1(4), 1e-12));
        assert!((r.objective - (m[(0, 0)] - 0.2)).abs() < 1e-12);

        let m = SymMatrix::diag(&[3.0, 2.0, 10.0]);
        let r = solve_restricted(&m, 0.0, &[0, 1], DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(close(&r.x_hat, &e1(3), 1e-4));
        assert!(solve_restricted(&m, 0.0, &[], 1e-7, 10).is_err());
    }

    #[test]
    fn argument_validation() {
        let m = SymMatrix::identity(2);
        assert!(solve_sdp(&m, -1.0, 1e-7, 10).is_err());
        assert!(solve_sdp(&m, 0.1, 0.0, 10).is_err());
        assert!(solve_sdp(&SymMatrix::zeros(0), 0.1, 1e-7, 10).is_err());
    }

    #[test]
    fn max_iter_reports_not_converged() {
        let m = SymMatrix::from_upper_fn(6, |i, j| ((i * 5 + j * 3) % 7) as f64 - 3.0);
        let s = solve_sdp(&m, 0.2, 1e-12, 3).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 3);
        assert!(matches!(s.ensure_converged(), Err(Error::NotConverged { iterations: 3 })));
    }

    #[test]
    fn support_of_examples() {
        assert_eq!(support_of(&e1(3), SUPPORT_THRESHOLD).unwrap(), vec![0]);
        let u = SymMatrix::identity(4).scale(0.25);
        assert_eq!(support_of(&u, SUPPORT_THRESHOLD).unwrap(), vec![0, 1, 2, 3]);
        let total = 0.999 + 1e-9 + 1e-12;
        let x = SymMatrix::diag(&[0.999 / total, 1e-9 / total, 1e-12 / total]);
        assert_eq!(support_of(&x, 1e-4).unwrap(), vec![0]);
        assert!(support_of(&SymMatrix::zeros(3), 1e-4).unwrap().is_empty());
        assert!(support_of(&x, 0.0).is_err());
    }

    #[test]
    fn kkt_examples() {
        let m = SymMatrix::diag(&[3.0, 1.0]);
        let s = solve_sdp(&m, 0.5, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        for dual in [s.dual.as_ref(), None] {
            let k = kkt_report(&m, 0.5, &s.x_hat, dual).unwrap();
            assert!(k.stationarity <= 1e-6, "{k:?}");
            assert!(k.feasibility_violation() <= 1e-6);
            assert!(k.subgradient_violation <= 1e-6);
        }

        let x = SymMatrix::identity(3).scale(1.0 / 3.0);
        let k = kkt_report(&SymMatrix::zeros(3), 0.0, &x, None).unwrap();
        assert_eq!(k.stationarity, 0.0);

        let bad = SymMatrix::diag(&[0.9, -0.3, 0.8]);
        let k = kkt_report(&m.embed(&[0, 1], 3), 0.1, &bad, None).unwrap();
        assert!(k.trace_violation > 0.3);
        assert!(k.psd_violation > 0.29);
    }

    #[test]
    fn witness_examples() {
        let m_star = SymMatrix::diag(&[2.0, 0.5]);
        let g = ObservationGraph::complete(2, true);
        let w = witness_certificate(&m_star, &g, &m_star, 0.5, &[0]).unwrap();
        assert!(w.cond_sign && w.cond_offblock && w.cond_eig && w.cond_gap && w.certified);
        assert_eq!(w.max_offblock, 0.0);
        assert_eq!(w.max_complement_block, 0.0);
        assert!((w.lambda1_block - 1.5).abs() < 1e-12);
        assert!((w.lambda1_full - 1.5).abs() < 1e-12);

        let w = witness_certificate(&m_star, &g, &m_star, 1.6, &[0]).unwrap();
        assert!(!w.cond_eig && !w.certified);

        assert!(witness_certificate(&m_star, &g, &m_star, 0.0, &[0]).is_err());
        assert!(witness_certificate(&m_star, &g, &m_star, 0.5, &[0, 1]).is_err());
    }

    #[test]
    fn witness_agrees_with_solver_on_rank_one() {
        let u = [0.6, 0.8, 0.0, 0.0];
        let m_star = SymMatrix::outer(&u).scale(4.0);
        let g = ObservationGraph::complete(4, true);
        let w = witness_certificate(&m_star, &g, &m_star, 0.1, &[0, 1]).unwrap();
        assert!(w.certified, "{w:?}");
        let s = solve_sdp(&m_star, 0.1, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(s.support, vec![0, 1]);
    }

    #[test]
    fn warm_start_reaches_the_same_optimum() {
        let m = SymMatrix::from_upper_fn(8, |i, j| {
            if i == j {
                (8 - i) as f64 * 0.5
            } else {
                0.2 * (((i + 2 * j) % 5) as f64 - 2.0)
            }
        });
        let opts = SolverOptions::default();
        let (a, state) = solve_sdp_warm(&m, 0.1, opts, None).unwrap();
        let (b, _) = solve_sdp_warm(&m, 0.2, opts, Some(&state)).unwrap();
        let cold = solve_sdp(&m, 0.2, opts.tol, opts.max_iter).unwrap();
        assert!(a.converged && b.converged && cold.converged);
        assert!(close(&b.x_hat, &cold.x_hat, 1e-5));
    }
}
