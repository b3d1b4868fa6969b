use std::path::Path;

use crate::baselines::{complete_nuclear, dtspca, itspca, Method, COMPLETION_MAX_ITER, COMPLETION_TOL};
use crate::graph::random_graph_bucketed_with_rng;
use crate::numerics::{eigh, SymMatrix};
use crate::sdp::SolverOptions;
use crate::spca::{default_rho_grid, rescaled_parameter, tune_rho_with};
use crate::{Error, Result};

use super::experiment::{aggregate, run_reps, trial_rng, uniform_buckets, validate_buckets, DEFAULT_MAX_TRIES};
use super::instance::observe;
use super::io::load_matrix_csv;
use super::ExperimentRow;

/// Column names of the 13×13 pitprops correlation matrix, standard order.
pub const PITPROPS_VARIABLES: [&str; 13] = [
    "topdiam", "length", "moist", "testsg", "ovensg", "ringtop", "ringbut", "bowmax", "bowdist",
    "whorls", "clear", "knots", "diaknot",
];

/// Variables forming the reference support.
pub const PITPROPS_SUPPORT: [&str; 6] = ["topdiam", "length", "ringbut", "bowmax", "bowdist", "whorls"];

pub const ITSPCA_MAX_ITER: usize = 1000;
pub const ITSPCA_TOL: f64 = 1e-8;

/// Thresholds tried for ITSPCA: 0 to 3 in steps of 0.05.
pub fn default_itspca_thresholds() -> Vec<f64> {
    (0..=60).map(|k| k as f64 * 0.05).collect()
}

/// The loaded matrix and the sorted indices of [`PITPROPS_SUPPORT`].
#[derive(Clone, Debug)]
pub struct PitpropsData {
    pub matrix: SymMatrix,
    pub names: Vec<String>,
    pub support: Vec<usize>,
}

/// Loads a fully observed 13×13 matrix with a header naming every pitprops
/// variable (in any order) and locates the reference support by name.
pub fn load_pitprops(path: &Path) -> Result<PitpropsData> {
    let loaded = load_matrix_csv(path, None)?;
    let d = loaded.matrix.dim();
    if d != PITPROPS_VARIABLES.len() {
        return Err(Error::invalid(format!("pitprops matrix must be 13x13, got {d}x{d}")));
    }
    if loaded.graph.ordered_entry_count() != d * d {
        return Err(Error::invalid("pitprops matrix must have no NA cells"));
    }
    let names = loaded
        .names
        .ok_or_else(|| Error::invalid("pitprops file needs a header row of variable names"))?;
    let canon: Vec<String> = names.iter().map(|n| n.trim().to_ascii_lowercase()).collect();
    for v in PITPROPS_VARIABLES {
        if canon.iter().filter(|n| n.as_str() == v).count() != 1 {
            return Err(Error::invalid(format!("header must name {v:?} exactly once")));
        }
    }
    let mut support: Vec<usize> = PITPROPS_SUPPORT
        .iter()
        .map(|v| canon.iter().position(|n| n == v).expect("checked above"))
        .collect();
    support.sort_unstable();
    Ok(PitpropsData {
        matrix: loaded.matrix,
        names,
        support,
    })
}

#[derive(Clone, Debug)]
pub struct PitpropsConfig {
    /// Observed ordered entries per graph, out of 169.
    pub budget: usize,
    pub buckets: Vec<(f64, f64)>,
    pub sigma: f64,
    pub reps: usize,
    pub rho_grid: Vec<f64>,
    pub a: f64,
    pub rng_seed: u64,
    pub max_tries: usize,
    pub methods: Vec<Method>,
    /// DTSPCA is scored at every `k` in `1..=d` and ITSPCA at every
    /// threshold here; each reports its best rate.
    pub itspca_thresholds: Vec<f64>,
    pub solver: SolverOptions,
}

impl Default for PitpropsConfig {
    fn default() -> Self {
        PitpropsConfig {
            budget: 100,
            buckets: uniform_buckets(0.0, 0.2, 11),
            sigma: 0.1,
            reps: 50,
            rho_grid: default_rho_grid(),
            a: 0.4,
            rng_seed: 0,
            max_tries: DEFAULT_MAX_TRIES,
            methods: vec![Method::Sdp, Method::Dtspca, Method::Itspca, Method::McSdp],
            itspca_thresholds: default_itspca_thresholds(),
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodRows {
    pub method: Method,
    pub rows: Vec<ExperimentRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PitpropsReport {
    pub support: Vec<usize>,
    pub methods: Vec<MethodRows>,
}

impl PitpropsReport {
    pub fn rows(&self, method: Method) -> Option<&[ExperimentRow]> {
        self.methods.iter().find(|m| m.method == method).map(|m| m.rows.as_slice())
    }
}

/// Hits of one repetition: one flag per tuning setting of each method.
struct Trial {
    rescaled: f64,
    hits: Vec<Vec<bool>>,
}

fn method_hits(
    method: Method,
    m: &SymMatrix,
    graph: &crate::graph::ObservationGraph,
    truth: &[usize],
    cfg: &PitpropsConfig,
) -> Result<Vec<bool>> {
    let d = m.dim();
    Ok(match method {
        Method::Sdp => {
            let trace = tune_rho_with(m, &cfg.rho_grid, cfg.a, cfg.solver)?;
            vec![trace.chosen_support == truth]
        }
        Method::Dtspca => (1..=d)
            .map(|k| dtspca(m, k).map(|r| r.support == truth))
            .collect::<Result<_>>()?,
        Method::Itspca => cfg
            .itspca_thresholds
            .iter()
            .map(|&t| match itspca(m, t, ITSPCA_MAX_ITER, ITSPCA_TOL, None) {
                Ok(r) => Ok(r.support == truth),
                Err(Error::ThresholdTooLarge(_)) => Ok(false),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?,
        Method::McSdp => {
            let c = complete_nuclear(m, graph, COMPLETION_TOL, COMPLETION_MAX_ITER)?;
            let trace = tune_rho_with(&c.matrix, &cfg.rho_grid, cfg.a, cfg.solver)?;
            vec![trace.chosen_support == truth]
        }
    })
}

/// Recovery experiment on a fixed matrix and support: each repetition draws
/// a graph whose `ψ/φ` on the support falls in the bucket and adds noise on
/// the observed entries. Every configured method sees the same observation.
pub fn run_pitprops(data: &PitpropsData, cfg: &PitpropsConfig) -> Result<PitpropsReport> {
    if cfg.reps == 0 {
        return Err(Error::invalid("reps must be >= 1"));
    }
    if cfg.methods.is_empty() {
        return Err(Error::invalid("no methods selected"));
    }
    validate_buckets(&cfg.buckets)?;
    let d = data.matrix.dim();
    let e = eigh(&data.matrix)?;
    let gap = e.values[0] - e.values.get(1).copied().unwrap_or(0.0);
    let truth = &data.support;

    let per_bucket = run_reps(cfg.buckets.len(), cfg.reps, |b, rep| {
        let (lo, hi) = cfg.buckets[b];
        let mut rng = trial_rng(cfg.rng_seed, b, rep);
        let graph = match random_graph_bucketed_with_rng(d, cfg.budget, truth, lo, hi, cfg.max_tries, &mut rng) {
            Ok((g, _)) => g,
            Err(Error::BucketExhausted { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let m = observe(&data.matrix, &graph, cfg.sigma, &mut rng);
        let hits = cfg
            .methods
            .iter()
            .map(|&method| method_hits(method, &m, &graph, truth, cfg))
            .collect::<Result<Vec<_>>>()?;
        let rescaled = rescaled_parameter(&data.matrix, &graph, cfg.sigma, truth)?;
        Ok(Some(Trial { rescaled, hits }))
    })?;

    let mut methods: Vec<MethodRows> = cfg
        .methods
        .iter()
        .map(|&method| MethodRows {
            method,
            rows: Vec::new(),
        })
        .collect();
    for (b, outcomes) in per_bucket.into_iter().enumerate() {
        let done: Vec<Trial> = outcomes.into_iter().flatten().collect();
        let skipped = cfg.reps - done.len();
        for (k, entry) in methods.iter_mut().enumerate() {
            let settings = done.first().map_or(1, |t| t.hits[k].len());
            // best setting by hit count, first on ties
            let best = (0..settings)
                .max_by_key(|&p| (done.iter().filter(|t| t.hits[k][p]).count(), std::cmp::Reverse(p)))
                .unwrap_or(0);
            let pairs: Vec<(bool, f64)> = done.iter().map(|t| (t.hits[k][best], t.rescaled)).collect();
            entry.rows.push(aggregate(cfg.buckets[b], gap, cfg.sigma, &pairs, skipped));
        }
    }
    Ok(PitpropsReport {
        support: truth.clone(),
        methods,
    })
}

/// SDP rows of [`run_pitprops`] for a matrix file.
#[allow(clippy::too_many_arguments)]
pub fn pitprops_experiment(
    matrix_path: &Path,
    budget: usize,
    buckets: &[(f64, f64)],
    sigma: f64,
    reps: usize,
    rho_grid: &[f64],
    a: f64,
    rng_seed: u64,
) -> Result<Vec<ExperimentRow>> {
    let data = load_pitprops(matrix_path)?;
    let cfg = PitpropsConfig {
        budget,
        buckets: buckets.to_vec(),
        sigma,
        reps,
        rho_grid: rho_grid.to_vec(),
        a,
        rng_seed,
        methods: vec![Method::Sdp],
        ..PitpropsConfig::default()
    };
    let mut report = run_pitprops(&data, &cfg)?;
    Ok(report.methods.remove(0).rows)
}
