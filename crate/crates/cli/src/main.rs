use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spca_core::baselines::Method;
use spca_core::bounds::{tail_bound, theorem2_montecarlo, theorem3_check};
use spca_core::graph::{random_graph, BipartiteSubgraph};
use spca_core::harness::{
    emit_csv, gen_instance, load_mask_csv, load_matrix_csv, load_pitprops, run_pitprops,
    run_synthetic, uniform_buckets, write_mask_csv, write_matrix_csv, LoadedMatrix, PitpropsConfig,
    SyntheticConfig, DEFAULT_MAX_TRIES,
};
use spca_core::sdp::{self, SolverOptions};
use spca_core::spca::{sufficient_conditions_report, tune_rho_with};
use spca_core::{Error, SymMatrix};

/// Sparse PCA support recovery from partially observed symmetric matrices.
///
/// Matrix files are CSV with `NA` marking unobserved cells and an optional
/// header row. Indices on the command line and in output are 1-based.
#[derive(Parser, Debug)]
#[command(name = "spca", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random instance and write its observed matrix.
    Gen(GenArgs),
    /// Solve the penalized SDP at one ρ.
    Solve(SolveArgs),
    /// Pick ρ on a grid by the variance/sparsity criterion.
    Tune(TuneArgs),
    /// Check the witness certificate and sufficient conditions for a support.
    Certify(CertifyArgs),
    /// Run a bucketed recovery experiment and write rows as CSV.
    Experiment(ExperimentArgs),
    /// Check one of the auxiliary bounds.
    Bounds(BoundsArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    gap: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Observed ordered entries; defaults to all d² entries.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the noiseless ground truth here.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Also write the 0/1 observation mask here.
    #[arg(long)]
    mask: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// 0/1 mask; 0 cells are treated as unobserved.
    #[arg(long)]
    mask: Option<PathBuf>,
}

impl InputArgs {
    fn load(&self) -> Result<LoadedMatrix, Failure> {
        // surface mask problems against the mask's own path
        if let Some(mask) = &self.mask {
            load_mask_csv(mask).map_err(at(mask))?;
        }
        load_matrix_csv(&self.input, self.mask.as_deref()).map_err(at(&self.input))
    }
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = sdp::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = sdp::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Exit with status 3 if any solve stops before reaching `tol`.
    #[arg(long)]
    strict: bool,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    rho: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 0.025)]
    grid_start: f64,
    #[arg(long, default_value_t = 1.0)]
    grid_stop: f64,
    #[arg(long, default_value_t = 0.025)]
    grid_step: f64,
}

impl GridArgs {
    /// Inclusive grid; `stop` is kept when it lies within rounding of a step.
    fn values(&self) -> Result<Vec<f64>, Error> {
        if !(self.grid_step > 0.0) || !(self.grid_start >= 0.0) || self.grid_stop < self.grid_start {
            return Err(Error::InvalidInput(format!(
                "bad grid {}..{} step {}",
                self.grid_start, self.grid_stop, self.grid_step
            )));
        }
        let n = ((self.grid_stop - self.grid_start) / self.grid_step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| self.grid_start + k as f64 * self.grid_step).collect())
    }
}

#[derive(Args, Debug)]
struct TuneArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// Ground-truth matrix.
    #[arg(long)]
    truth: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    rho: f64,
    /// Comma-separated 1-based indices.
    #[arg(long)]
    support: String,
    /// Noise level used in the sufficient conditions.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Synthetic,
    Pitprops,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Sdp,
    Dtspca,
    Itspca,
    McSdp,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Sdp => Method::Sdp,
            MethodArg::Dtspca => Method::Dtspca,
            MethodArg::Itspca => Method::Itspca,
            MethodArg::McSdp => Method::McSdp,
        }
    }
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    out: PathBuf,
    /// Pitprops correlation matrix with a header row.
    #[arg(long, default_value = "data/pitprops.csv")]
    matrix: PathBuf,
    #[arg(long, default_value_t = 50)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    s: usize,
    #[arg(long, default_value_t = 10.0)]
    gap: f64,
    /// Defaults to 0 (synthetic) or 0.1 (pitprops).
    #[arg(long)]
    sigma: Option<f64>,
    /// Defaults to d²/2 (synthetic) or 100 (pitprops).
    #[arg(long)]
    budget: Option<usize>,
    /// Explicit buckets such as `0:2,8:10`; overrides width/count.
    #[arg(long)]
    buckets: Option<String>,
    /// Defaults to 2 (synthetic) or 0.2 (pitprops).
    #[arg(long)]
    bucket_width: Option<f64>,
    /// Defaults to 9 (synthetic) or 11 (pitprops).
    #[arg(long)]
    bucket_count: Option<usize>,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    /// Synthetic only: start at this repetition index, continuing an
    /// earlier run with the same seed.
    #[arg(long, default_value_t = 0)]
    first_rep: usize,
    #[command(flatten)]
    grid: GridArgs,
    /// Defaults to 0.5 (synthetic) or 0.4 (pitprops).
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_TRIES)]
    max_tries: usize,
    /// Pitprops only.
    #[arg(long, value_enum, default_value = "sdp")]
    method: MethodArg,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoundCheck {
    Thm2,
    Thm3,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    check: BoundCheck,
    /// thm3: matrix `Y` (fully observed).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// thm3: 0/1 mask defining the graph.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// thm2: pattern rows.
    #[arg(long, default_value_t = 10)]
    rows: usize,
    /// thm2: pattern columns.
    #[arg(long, default_value_t = 10)]
    cols: usize,
    /// thm2: keep each pattern entry with this probability.
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// thm2: defaults to 2σ√(Δmax·ln(m+n)).
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::InvalidInput(_) | Error::Csv(_) => 2,
            Error::NotConverged { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

/// Converts a library error raised while reading or writing `path`.
fn at(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.msg = format!("{}: {}", path.display(), f.msg);
        f
    }
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure {
        code,
        msg: msg.into(),
    }
}

fn one_based(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn parse_support(text: &str, d: usize) -> Result<Vec<usize>, Failure> {
    let mut out = Vec::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let i: usize = tok
            .parse()
            .map_err(|_| fail(2, format!("support index {tok:?} is not a positive integer")))?;
        if i == 0 || i > d {
            return Err(fail(2, format!("support index {i} outside 1..={d}")));
        }
        out.push(i - 1);
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(fail(2, "support is empty"));
    }
    Ok(out)
}

fn parse_buckets(text: &str) -> Result<Vec<(f64, f64)>, Failure> {
    text.split(',')
        .map(|b| {
            let (lo, hi) = b
                .split_once(':')
                .ok_or_else(|| fail(2, format!("bucket {b:?} must look like lo:hi")))?;
            let lo: f64 = lo.trim().parse().map_err(|_| fail(2, format!("bad bucket bound {lo:?}")))?;
            let hi: f64 = hi.trim().parse().map_err(|_| fail(2, format!("bad bucket bound {hi:?}")))?;
            Ok((lo, hi))
        })
        .collect()
}

fn cmd_gen(args: &GenArgs) -> Result<(), Failure> {
    let budget = args.budget.unwrap_or(args.d * args.d);
    let g = random_graph(args.d, budget, args.seed)?;
    let inst = gen_instance(args.d, args.s, args.gap, args.sigma, &g, args.seed)?;
    write_matrix_csv(&args.out, &inst.m, Some(&g), None).map_err(at(&args.out))?;
    if let Some(p) = &args.truth {
        write_matrix_csv(p, &inst.m_star, None, None).map_err(at(p))?;
    }
    if let Some(p) = &args.mask {
        write_mask_csv(p, &g).map_err(at(p))?;
    }
    println!("support: {}", one_based(&inst.support));
    println!("observed_entries: {}", g.ordered_entry_count());
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let loaded = args.input.load()?;
    let opts = args.solver.options();
    let sol = sdp::solve_sdp(&loaded.matrix, args.rho, opts.tol, opts.max_iter)?;
    println!("support: {}", one_based(&sol.support));
    println!("objective: {}", sol.objective);
    println!("iterations: {}", sol.iterations);
    println!("primal_residual: {:e}", sol.primal_residual);
    println!("dual_residual: {:e}", sol.dual_residual);
    println!("converged: {}", sol.converged);
    if args.solver.strict {
        sol.ensure_converged()?;
    }
    Ok(())
}

fn cmd_tune(args: &TuneArgs) -> Result<(), Failure> {
    let loaded = args.input.load()?;
    let grid = args.grid.values()?;
    let trace = tune_rho_with(&loaded.matrix, &grid, args.a, args.solver.options())?;
    println!("rho,criterion,support_size,converged");
    for k in 0..trace.grid.len() {
        println!(
            "{},{},{},{}",
            trace.grid[k],
            trace.criteria[k],
            trace.supports[k].len(),
            trace.converged[k]
        );
    }
    println!("chosen_rho: {}", trace.chosen_rho);
    println!("chosen_support: {}", one_based(&trace.chosen_support));
    if args.solver.strict {
        if let Some(k) = trace.converged.iter().position(|c| !c) {
            return Err(fail(3, format!("solve at rho = {} did not converge", trace.grid[k])));
        }
    }
    Ok(())
}

fn cmd_certify(args: &CertifyArgs) -> Result<(), Failure> {
    let truth = load_matrix_csv(&args.truth, None).map_err(at(&args.truth))?;
    let loaded = args.input.load()?;
    let d = loaded.matrix.dim();
    if truth.matrix.dim() != d {
        return Err(fail(2, "truth and observed matrices differ in size"));
    }
    let support = parse_support(&args.support, d)?;
    let w = sdp::witness_certificate(&truth.matrix, &loaded.graph, &loaded.matrix, args.rho, &support)?;
    println!("witness:");
    println!("  sign_consistent: {}", w.cond_sign);
    println!("  offblock: {} (max {})", w.cond_offblock, w.max_offblock);
    println!(
        "  eigen: {} (lambda1 full {}, block {}, complement max {})",
        w.cond_eig, w.lambda1_full, w.lambda1_block, w.max_complement_block
    );
    println!("  block_gap: {} ({})", w.cond_gap, w.gap);
    println!("  certified: {}", w.certified);
    let c = sufficient_conditions_report(&truth.matrix, &loaded.graph, args.sigma, args.rho, &support)?;
    println!("conditions:");
    for i in &c.ineq {
        let op = if i.strict { "<" } else { "<=" };
        println!("  {}: {} {op} {} -> {}", i.name, i.lhs, i.rhs, i.holds);
    }
    println!("  xi: {}", c.xi);
    println!("  rescaled: {}", c.rescaled);
    println!("  spectral_gap: {}", c.spectral_gap);
    println!("  all_hold: {}", c.all_hold());
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), Failure> {
    let pitprops = matches!(args.mode, Mode::Pitprops);
    let buckets = match &args.buckets {
        Some(text) => parse_buckets(text)?,
        None => {
            let width = args.bucket_width.unwrap_or(if pitprops { 0.2 } else { 2.0 });
            let count = args.bucket_count.unwrap_or(if pitprops { 11 } else { 9 });
            uniform_buckets(0.0, width, count)
        }
    };
    let rho_grid = args.grid.values()?;
    let rows = if pitprops {
        let data = load_pitprops(&args.matrix).map_err(at(&args.matrix))?;
        let cfg = PitpropsConfig {
            budget: args.budget.unwrap_or(100),
            buckets,
            sigma: args.sigma.unwrap_or(0.1),
            reps: args.reps,
            rho_grid,
            a: args.a.unwrap_or(0.4),
            rng_seed: args.seed,
            max_tries: args.max_tries,
            methods: vec![args.method.into()],
            ..PitpropsConfig::default()
        };
        let mut report = run_pitprops(&data, &cfg)?;
        report.methods.remove(0).rows
    } else {
        let cfg = SyntheticConfig {
            d: args.d,
            s: args.s,
            gap: args.gap,
            sigma: args.sigma.unwrap_or(0.0),
            budget: args.budget.unwrap_or(args.d * args.d / 2),
            buckets,
            reps: args.reps,
            first_rep: args.first_rep,
            rho_grid,
            a: args.a.unwrap_or(0.5),
            rng_seed: args.seed,
            max_tries: args.max_tries,
            solver: SolverOptions::default(),
        };
        run_synthetic(&cfg)?.rows
    };
    emit_csv(&rows, &args.out).map_err(at(&args.out))?;
    for r in rows.iter().filter(|r| r.skipped > 0) {
        eprintln!(
            "bucket [{}, {}): {} repetitions skipped, no graph found in {} draws",
            r.bucket_lo, r.bucket_hi, r.skipped, args.max_tries
        );
    }
    Ok(())
}

/// Entries of an `rows × cols` pattern kept with probability `density`,
/// chosen by a graph on `rows + cols` vertices seeded from `seed`.
fn random_pattern(rows: usize, cols: usize, density: f64, seed: u64) -> Result<BipartiteSubgraph, Failure> {
    if !(0.0..=1.0).contains(&density) {
        return Err(fail(2, format!("density must lie in [0, 1], got {density}")));
    }
    let n = rows + cols;
    let budget = (density * (n * n) as f64).round() as usize;
    let g = random_graph(n, budget, seed)?;
    let entries: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .filter(|&(i, j)| g.has_edge(i, rows + j))
        .collect();
    Ok(BipartiteSubgraph::from_pattern(rows, cols, entries)?)
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), Failure> {
    let holds = match args.check {
        BoundCheck::Thm2 => {
            let pattern = random_pattern(args.rows, args.cols, args.density, args.seed)?;
            let delta = pattern.max_degree() as f64;
            let t = args
                .t
                .unwrap_or(2.0 * args.sigma * (delta * ((args.rows + args.cols) as f64).ln()).sqrt());
            let c = theorem2_montecarlo(args.sigma, &pattern, t, args.trials, args.seed)?;
            println!("t: {}", c.t);
            println!("max_degree: {}", pattern.max_degree());
            println!("bound: {}", c.bound);
            println!("bound_check: {}", tail_bound(args.sigma, args.rows, args.cols, pattern.max_degree(), t));
            println!("empirical: {} ({} trials, se {})", c.empirical, c.trials, c.standard_error);
            println!("holds: {}", c.holds);
            c.holds
        }
        BoundCheck::Thm3 => {
            let input = args.input.as_deref().ok_or_else(|| fail(2, "thm3 needs --in"))?;
            let mask = args.mask.as_deref().ok_or_else(|| fail(2, "thm3 needs --mask"))?;
            let y = load_full(input)?;
            let g = load_mask_csv(mask).map_err(at(mask))?;
            let c = theorem3_check(&y, &g)?;
            println!("lhs: {}", c.lhs);
            println!("rhs: {}", c.rhs);
            println!("holds: {}", c.holds);
            c.holds
        }
    };
    if holds {
        Ok(())
    } else {
        Err(fail(1, "bound violated"))
    }
}

fn load_full(path: &Path) -> Result<SymMatrix, Failure> {
    let loaded = load_matrix_csv(path, None).map_err(at(path))?;
    let d = loaded.matrix.dim();
    if loaded.graph.ordered_entry_count() != d * d {
        return Err(fail(2, format!("{} must not contain NA cells", path.display())));
    }
    Ok(loaded.matrix)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Tune(a) => cmd_tune(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Experiment(a) => {
            if a.threads > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(a.threads)
                    .build_global()
                    .map_err(|e| fail(1, e.to_string()))?;
            }
            cmd_experiment(a)
        }
        Command::Bounds(a) => cmd_bounds(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
