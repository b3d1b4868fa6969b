//! Support recovery on top of the SDP: ρ tuning, the theoretical ρ, the
//! rescaled parameter and the sufficient-condition report.

use crate::graph::ObservationGraph;
use crate::numerics::{eigh, spectral_norm, sym_spectral_norm, SymMatrix};
use crate::sdp::{self, SdpSolution, SolverOptions, WarmStart};
use crate::{Error, Result};

/// Criteria within this distance of the maximum count as ties.
pub const TIE_TOL: f64 = 1e-6;

/// `{0.025, 0.05, …, 1.0}`.
pub fn default_rho_grid() -> Vec<f64> {
    (1..=40).map(|k| k as f64 * 0.025).collect()
}

/// Solves the SDP and reads off `supp(diag(X̂))`. Fails if the solver does
/// not converge.
///
/// An all-zero `M` carries no signal and yields the empty support, even
/// though the SDP optimum (`I/d` for ρ > 0) has a full diagonal.
pub fn recover_support(m: &SymMatrix, rho: f64) -> Result<(Vec<usize>, SdpSolution)> {
    let mut s =
        sdp::solve_sdp(m, rho, sdp::DEFAULT_TOL, sdp::DEFAULT_MAX_ITER)?.ensure_converged()?;
    if m.is_zero() {
        s.support.clear();
    }
    Ok((s.support.clone(), s))
}

/// `⟨M, X̂₀⟩`: at ρ = 0 the optimum is the top eigenvalue of `M`.
fn unpenalized_value(m: &SymMatrix) -> Result<f64> {
    let top = eigh(m)?.values[0];
    if top.abs() <= 1e-12 * m.max_abs() {
        return Err(Error::DegenerateBaseline);
    }
    Ok(top)
}

fn check_weight(a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::invalid(format!("criterion weight must lie in (0, 1), got {a}")));
    }
    Ok(())
}

fn criterion_value(m: &SymMatrix, sol: &SdpSolution, baseline: f64, a: f64) -> f64 {
    let d = m.dim() as f64;
    let explained = m.inner(&sol.x_hat) / baseline;
    (1.0 - a) * explained + a * (1.0 - sol.support.len() as f64 / d)
}

/// `C_ρ = (1−a)⟨M, X̂_ρ⟩/⟨M, X̂₀⟩ + a(1 − |supp(diag X̂_ρ)|/d)`.
pub fn criterion(m: &SymMatrix, rho: f64, a: f64) -> Result<f64> {
    check_weight(a)?;
    let baseline = unpenalized_value(m)?;
    let (_, sol) = recover_support(m, rho)?;
    Ok(criterion_value(m, &sol, baseline, a))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuningTrace {
    pub grid: Vec<f64>,
    pub criteria: Vec<f64>,
    pub supports: Vec<Vec<usize>>,
    /// Whether each solve met its tolerance.
    pub converged: Vec<bool>,
    pub chosen_rho: f64,
    pub chosen_support: Vec<usize>,
    pub a: f64,
}

pub fn tune_rho(m: &SymMatrix, grid: &[f64], a: f64) -> Result<TuningTrace> {
    tune_rho_with(m, grid, a, SolverOptions::default())
}

/// Evaluates `C_ρ` along `grid`, warm-starting each solve from the previous
/// one, and picks the maximizer (largest ρ among ties).
pub fn tune_rho_with(
    m: &SymMatrix,
    grid: &[f64],
    a: f64,
    opts: SolverOptions,
) -> Result<TuningTrace> {
    check_weight(a)?;
    if grid.is_empty() {
        return Err(Error::invalid("empty rho grid"));
    }
    if let Some(r) = grid.iter().find(|r| !(**r >= 0.0)) {
        return Err(Error::invalid(format!("rho grid value {r} is negative")));
    }
    let baseline = unpenalized_value(m)?;
    let mut warm: Option<WarmStart> = None;
    let mut criteria = Vec::with_capacity(grid.len());
    let mut supports = Vec::with_capacity(grid.len());
    let mut converged = Vec::with_capacity(grid.len());
    for &rho in grid {
        let (sol, state) = sdp::solve_sdp_warm(m, rho, opts, warm.as_ref())?;
        criteria.push(criterion_value(m, &sol, baseline, a));
        converged.push(sol.converged);
        supports.push(sol.support);
        warm = Some(state);
    }
    let best = criteria.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let chosen = (0..grid.len())
        .filter(|&k| criteria[k] >= best - TIE_TOL)
        .max_by(|&i, &j| grid[i].total_cmp(&grid[j]).then(j.cmp(&i)))
        .expect("nonempty grid");
    Ok(TuningTrace {
        grid: grid.to_vec(),
        chosen_rho: grid[chosen],
        chosen_support: supports[chosen].clone(),
        criteria,
        supports,
        converged,
        a,
    })
}

/// `(support, complement)` after validating `support` as a subset of `[d]`.
fn split(support: &[usize], d: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if support.is_empty() {
        return Err(Error::invalid("support must be nonempty"));
    }
    let mut inside = vec![false; d];
    for &i in support {
        if i >= d || inside[i] {
            return Err(Error::invalid(format!("bad support index {i}")));
        }
        inside[i] = true;
    }
    Ok((support.to_vec(), (0..d).filter(|&i| !inside[i]).collect()))
}

/// Degree quantities of the three sub-graphs around `J`.
struct BlockDegrees {
    inside: f64,
    cross: f64,
    outside: f64,
}

fn block_degrees(g: &ObservationGraph, j: &[usize], jc: &[usize]) -> Result<BlockDegrees> {
    Ok(BlockDegrees {
        inside: g.induced_subgraph(j)?.max_degree() as f64,
        cross: if jc.is_empty() { 0.0 } else { g.bipartite_block(j)?.max_degree() as f64 },
        outside: if jc.is_empty() { 0.0 } else { g.induced_subgraph(jc)?.max_degree() as f64 },
    })
}

fn theoretical_rho_from_parts(sigma: f64, max_block_degree: f64, d: f64, cross_max: f64) -> f64 {
    2.0 * sigma * (max_block_degree * d.ln()).sqrt() + cross_max
}

/// `ρ = 2σ√(max{Δmax(G_{J,Jᶜ}), Δmax(G_{Jᶜ,Jᶜ})}·ln d) + ‖M*_{Jᶜ,J}‖max`.
pub fn theoretical_rho(
    m_star: &SymMatrix,
    g: &ObservationGraph,
    sigma: f64,
    support: &[usize],
) -> Result<f64> {
    let d = check_dims(m_star, g)?;
    let (j, jc) = split(support, d)?;
    if jc.is_empty() {
        return Err(Error::invalid("support must be a proper subset"));
    }
    let deg = block_degrees(g, &j, &jc)?;
    let cross_max = m_star.block(&jc, &j).max_abs();
    Ok(theoretical_rho_from_parts(sigma, deg.cross.max(deg.outside), d as f64, cross_max))
}

fn check_dims(m_star: &SymMatrix, g: &ObservationGraph) -> Result<usize> {
    if m_star.dim() != g.n() {
        return Err(Error::invalid("matrix and graph sizes differ"));
    }
    Ok(m_star.dim())
}

/// The five terms of the recovery condition and its right-hand side without
/// the constant.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledTerms {
    /// `‖M*_JJ‖₂ · ψ(G_JJ)`
    pub irregularity: f64,
    /// `σ√(Δmax(G_JJ) ln s)`
    pub noise_inside: f64,
    /// `s‖M*_{Jᶜ,J}‖₂`
    pub cross: f64,
    /// `‖M*_{Jᶜ,Jᶜ}‖₂ / √s`
    pub outside: f64,
    /// `σs√(max{Δmax(G_{J,Jᶜ}), Δmax(G_{Jᶜ,Jᶜ})} ln d)`
    pub noise_outside: f64,
    /// `φ(G_JJ) · λ̄(M*) · min_{i∈J}|u₁,ᵢ| / s`
    pub denominator: f64,
}

impl RescaledTerms {
    pub fn numerator(&self) -> f64 {
        self.irregularity + self.noise_inside + self.cross + self.outside + self.noise_outside
    }

    pub fn value(&self) -> f64 {
        self.numerator() / self.denominator
    }
}

/// Ingredients shared by the rescaled parameter and the condition report.
struct Quantities {
    s: f64,
    d: f64,
    j: Vec<usize>,
    jc: Vec<usize>,
    phi: f64,
    psi: f64,
    deg: BlockDegrees,
    gap: f64,
    min_abs_u1: f64,
    norm_jj: f64,
    cross_norm: f64,
    cross_max: f64,
    outside_norm: f64,
}

fn quantities(
    m_star: &SymMatrix,
    g: &ObservationGraph,
    support: &[usize],
) -> Result<Quantities> {
    let d = check_dims(m_star, g)?;
    let (j, jc) = split(support, d)?;
    let g_jj = g.induced_subgraph(&j)?;
    let psi = g_jj.irregularity()?;
    let phi = g_jj.connectivity_or_zero();
    let deg = block_degrees(g, &j, &jc)?;
    let e = eigh(m_star)?;
    let gap = if d > 1 { e.values[0] - e.values[1] } else { 0.0 };
    let u1 = e.vector(0);
    let min_abs_u1 = j.iter().map(|&i| u1[i].abs()).fold(f64::INFINITY, f64::min);
    let cross = m_star.block(&jc, &j);
    Ok(Quantities {
        s: j.len() as f64,
        d: d as f64,
        phi,
        psi,
        deg,
        gap,
        min_abs_u1,
        norm_jj: sym_spectral_norm(&m_star.submatrix(&j))?,
        cross_norm: spectral_norm(&cross)?,
        cross_max: cross.max_abs(),
        outside_norm: sym_spectral_norm(&m_star.submatrix(&jc))?,
        j,
        jc,
    })
}

/// Per-term breakdown of [`rescaled_parameter`].
pub fn rescaled_terms(
    m_star: &SymMatrix,
    g: &ObservationGraph,
    sigma: f64,
    support: &[usize],
) -> Result<RescaledTerms> {
    let q = quantities(m_star, g, support)?;
    if q.phi == 0.0 {
        return Err(Error::Disconnected);
    }
    Ok(RescaledTerms {
        irregularity: q.norm_jj * q.psi,
        noise_inside: sigma * (q.deg.inside * q.s.ln()).sqrt(),
        cross: q.s * q.cross_norm,
        outside: q.outside_norm / q.s.sqrt(),
        noise_outside: sigma * q.s * (q.deg.cross.max(q.deg.outside) * q.d.ln()).sqrt(),
        denominator: q.phi * q.gap * q.min_abs_u1 / q.s,
    })
}

/// Left side of the recovery condition over its right side without the
/// constant; small values predict exact recovery.
pub fn rescaled_parameter(
    m_star: &SymMatrix,
    g: &ObservationGraph,
    sigma: f64,
    support: &[usize],
) -> Result<f64> {
    rescaled_terms(m_star, g, sigma, support).map(|t| t.value())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
    pub holds: bool,
}

impl Inequality {
    fn new(name: &'static str, lhs: f64, rhs: f64, strict: bool) -> Self {
        let holds = if strict { lhs < rhs } else { lhs <= rhs };
        Inequality { name, lhs, rhs, strict, holds }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub ineq: Vec<Inequality>,
    pub xi: f64,
    /// [`rescaled_parameter`]; `+∞` when `G_JJ` is disconnected.
    pub rescaled: f64,
    /// `λ₁(M*) − λ₂(M*)`.
    pub spectral_gap: f64,
    pub min_abs_u1: f64,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.ineq.iter().all(|i| i.holds)
    }
}

/// Ratio `‖A ∘ B‖₂ / ‖B‖₂ − 1`, or 0 when `‖B‖₂ = 0`.
fn masked_excess(masked: f64, full: f64) -> f64 {
    if full > 0.0 {
        masked / full - 1.0
    } else {
        0.0
    }
}

/// Evaluates both sides of the five inequalities that together guarantee
/// a unique SDP optimum with support `J` at this ρ.
///
/// A disconnected (or single-vertex) `G_JJ` is reported with `φ = 0` rather
/// than rejected.
pub fn sufficient_conditions_report(
    m_star: &SymMatrix,
    g: &ObservationGraph,
    sigma: f64,
    rho: f64,
    support: &[usize],
) -> Result<ConditionReport> {
    let q = quantities(m_star, g, support)?;
    let (s, d) = (q.s, q.d);

    let block_gap = if q.j.len() > 1 {
        let e = eigh(&m_star.submatrix(&q.j))?;
        e.values[0] - e.values[1]
    } else {
        q.gap
    };

    let adj = g.adjacency();
    let masked_cross = spectral_norm(&m_star.hadamard(&adj).block(&q.jc, &q.j))?;
    let masked_outside = sym_spectral_norm(&m_star.hadamard(&adj).submatrix(&q.jc))?;
    let xi = 0.0_f64
        .max(masked_excess(masked_cross, q.cross_norm))
        .max(masked_excess(masked_outside, q.outside_norm));

    let sqrt2 = std::f64::consts::SQRT_2;
    let noise_cross = 2.0 * sigma * (q.deg.cross * d.ln()).sqrt();
    let base = q.phi / (2.0 * s) * block_gap;
    let ineq = vec![
        Inequality::new(
            "irregularity, in-support noise and penalty",
            q.norm_jj * q.psi + 2.0 * sigma * (q.deg.inside * s.ln()).sqrt() + s * rho,
            q.phi * block_gap * q.min_abs_u1 / (2.0 * sqrt2 * s),
            false,
        ),
        Inequality::new("cross-block penalty domination", noise_cross + q.cross_max, rho, true),
        Inequality::new(
            "cross-block spectral size",
            (1.0 + xi) * (noise_cross + q.cross_norm) * (1.0 + s.sqrt()),
            base * (1.0 - q.min_abs_u1 / sqrt2),
            false,
        ),
        Inequality::new(
            "off-support spectral size",
            (1.0 + xi) * q.outside_norm,
            base * (1.0 - q.min_abs_u1 / (2.0 * sqrt2)),
            false,
        ),
        Inequality::new(
            "off-support noise domination",
            2.0 * sigma * (q.deg.outside * d.ln()).sqrt(),
            rho,
            true,
        ),
    ];

    let rescaled = if q.phi > 0.0 {
        rescaled_terms(m_star, g, sigma, support)?.value()
    } else {
        f64::INFINITY
    };
    Ok(ConditionReport {
        ineq,
        xi,
        rescaled,
        spectral_gap: q.gap,
        min_abs_u1: q.min_abs_u1,
    })
}
