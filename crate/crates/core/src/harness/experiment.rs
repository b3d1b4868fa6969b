use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::random_graph_bucketed_with_rng;
use crate::sdp::SolverOptions;
use crate::spca::{default_rho_grid, rescaled_parameter, tune_rho_with};
use crate::{Error, Result};

use super::instance::{gen_instance_on_support, random_support};

pub const DEFAULT_MAX_TRIES: usize = 100_000;

/// One bucket's aggregate over its completed repetitions.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub bucket_lo: f64,
    pub bucket_hi: f64,
    pub spectral_gap: f64,
    pub sigma: f64,
    /// Completed repetitions; `rate` is NaN when this is 0.
    pub reps: usize,
    pub exact_recovery_rate: f64,
    pub mean_rescaled: f64,
    /// Repetitions dropped because no graph in the bucket was found.
    pub skipped: usize,
}

/// Per-repetition record, kept for rate-vs-rescaled analyses.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub bucket: usize,
    pub rep: usize,
    pub ratio: f64,
    pub rescaled: f64,
    pub chosen_rho: f64,
    pub recovered: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub trials: Vec<TrialOutcome>,
}

#[derive(Clone, Debug)]
pub struct SyntheticConfig {
    pub d: usize,
    pub s: usize,
    pub gap: f64,
    pub sigma: f64,
    /// Observed ordered entries per graph.
    pub budget: usize,
    pub buckets: Vec<(f64, f64)>,
    pub reps: usize,
    /// Index of the first repetition; a run with `first_rep = k` continues
    /// one that stopped after `k` repetitions.
    pub first_rep: usize,
    pub rho_grid: Vec<f64>,
    pub a: f64,
    pub rng_seed: u64,
    pub max_tries: usize,
    pub solver: SolverOptions,
}

impl SyntheticConfig {
    /// d = 50, s = 10, half the entries observed, buckets of width 2 on
    /// `[0, 18)`, 20 repetitions.
    pub fn desk_scale(gap: f64, sigma: f64) -> Self {
        SyntheticConfig {
            d: 50,
            s: 10,
            gap,
            sigma,
            budget: 1250,
            buckets: uniform_buckets(0.0, 2.0, 9),
            reps: 20,
            first_rep: 0,
            rho_grid: default_rho_grid(),
            a: 0.5,
            rng_seed: 0,
            max_tries: DEFAULT_MAX_TRIES,
            solver: SolverOptions::default(),
        }
    }
}

/// `count` adjacent buckets of `width` starting at `start`.
pub fn uniform_buckets(start: f64, width: f64, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|k| (start + k as f64 * width, start + (k + 1) as f64 * width))
        .collect()
}

/// Generator for repetition `rep` of bucket `bucket`: its own ChaCha stream,
/// so results do not depend on scheduling.
pub(crate) fn trial_rng(seed: u64, bucket: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((bucket as u64) << 32) | rep as u64);
    rng
}

pub(crate) fn validate_buckets(buckets: &[(f64, f64)]) -> Result<()> {
    for &(lo, hi) in buckets {
        if !(lo >= 0.0 && lo < hi) {
            return Err(Error::invalid(format!("bad bucket [{lo}, {hi})")));
        }
    }
    Ok(())
}

/// Runs `reps` repetitions per bucket in parallel; `Ok(None)` marks a
/// repetition whose bucket was exhausted.
pub(crate) fn run_reps<T: Send>(
    buckets: usize,
    reps: usize,
    trial: impl Fn(usize, usize) -> Result<Option<T>> + Sync,
) -> Result<Vec<Vec<Option<T>>>> {
    let jobs: Vec<(usize, usize)> = (0..buckets).flat_map(|b| (0..reps).map(move |r| (b, r))).collect();
    let mut results: Vec<Option<T>> = jobs
        .par_iter()
        .map(|&(b, r)| trial(b, r))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(buckets);
    for _ in 0..buckets {
        let rest = results.split_off(reps.min(results.len()));
        out.push(std::mem::replace(&mut results, rest));
    }
    Ok(out)
}

pub(crate) fn aggregate(
    (lo, hi): (f64, f64),
    gap: f64,
    sigma: f64,
    outcomes: &[(bool, f64)],
    skipped: usize,
) -> ExperimentRow {
    let reps = outcomes.len();
    let successes = outcomes.iter().filter(|o| o.0).count();
    let (rate, mean) = if reps == 0 {
        (f64::NAN, f64::NAN)
    } else {
        (
            successes as f64 / reps as f64,
            outcomes.iter().map(|o| o.1).sum::<f64>() / reps as f64,
        )
    };
    ExperimentRow {
        bucket_lo: lo,
        bucket_hi: hi,
        spectral_gap: gap,
        sigma,
        reps,
        exact_recovery_rate: rate,
        mean_rescaled: mean,
        skipped,
    }
}

/// Synthetic recovery experiment: for each bucket and repetition draws a
/// support, a graph whose `ψ/φ` on the support falls in the bucket, and an
/// instance; tunes ρ and checks `Ĵ == J`.
pub fn run_synthetic(cfg: &SyntheticConfig) -> Result<ExperimentReport> {
    if cfg.reps == 0 {
        return Err(Error::invalid("reps must be >= 1"));
    }
    if cfg.s == 0 || cfg.s > cfg.d {
        return Err(Error::invalid(format!("need 1 <= s <= d, got s = {}, d = {}", cfg.s, cfg.d)));
    }
    validate_buckets(&cfg.buckets)?;
    let per_bucket = run_reps(cfg.buckets.len(), cfg.reps, |b, rep| {
        let (lo, hi) = cfg.buckets[b];
        let rep = cfg.first_rep + rep;
        let mut rng = trial_rng(cfg.rng_seed, b, rep);
        let support = random_support(cfg.d, cfg.s, &mut rng);
        let (graph, ratio) = match random_graph_bucketed_with_rng(
            cfg.d,
            cfg.budget,
            &support,
            lo,
            hi,
            cfg.max_tries,
            &mut rng,
        ) {
            Ok(found) => found,
            Err(Error::BucketExhausted { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let inst = gen_instance_on_support(&support, cfg.d, cfg.gap, cfg.sigma, &graph, &mut rng)?;
        let recovered;
        let chosen_rho;
        if inst.m.is_zero() {
            recovered = false;
            chosen_rho = f64::NAN;
        } else {
            let trace = tune_rho_with(&inst.m, &cfg.rho_grid, cfg.a, cfg.solver)?;
            recovered = trace.chosen_support == support;
            chosen_rho = trace.chosen_rho;
        }
        let rescaled = rescaled_parameter(&inst.m_star, &graph, cfg.sigma, &support)?;
        Ok(Some(TrialOutcome {
            bucket: b,
            rep,
            ratio,
            rescaled,
            chosen_rho,
            recovered,
        }))
    })?;

    let mut rows = Vec::with_capacity(cfg.buckets.len());
    let mut trials = Vec::new();
    for (b, outcomes) in per_bucket.into_iter().enumerate() {
        let done: Vec<TrialOutcome> = outcomes.into_iter().flatten().collect();
        let pairs: Vec<(bool, f64)> = done.iter().map(|t| (t.recovered, t.rescaled)).collect();
        rows.push(aggregate(cfg.buckets[b], cfg.gap, cfg.sigma, &pairs, cfg.reps - done.len()));
        trials.extend(done);
    }
    Ok(ExperimentReport { rows, trials })
}

/// [`run_synthetic`] with the remaining settings at their defaults.
#[allow(clippy::too_many_arguments)]
pub fn run_bucket_experiment(
    d: usize,
    s: usize,
    gap: f64,
    sigma: f64,
    budget: usize,
    buckets: &[(f64, f64)],
    reps: usize,
    rho_grid: &[f64],
    a: f64,
    rng_seed: u64,
) -> Result<Vec<ExperimentRow>> {
    let cfg = SyntheticConfig {
        d,
        s,
        gap,
        sigma,
        budget,
        buckets: buckets.to_vec(),
        reps,
        first_rep: 0,
        rho_grid: rho_grid.to_vec(),
        a,
        rng_seed,
        max_tries: DEFAULT_MAX_TRIES,
        solver: SolverOptions::default(),
    };
    run_synthetic(&cfg).map(|r| r.rows)
}
