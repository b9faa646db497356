//! Command-line front end. `cli_main` returns the process exit code: 0 on
//! success, 1 on usage or configuration errors, 2 when a run fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::{
    run_pegasos, run_projected_sgd, run_spp, BaselineConfig, BaselineMethod, PegasosConfig,
};
use crate::error::SascError;
use crate::io::{config_to_flags, parse_libsvm, parse_returns_csv, read_config_file, write_trace};
use crate::problem::{
    CompositeProblem, ConstraintSample, FiniteConstraints, LinearMap, QuadraticTerm,
};
use crate::problems::{
    gen_basis_pursuit, make_bp_least_squares_problem, make_bp_problem, make_portfolio_problem,
    make_svm_problem, reference_solution, REFERENCE_MAX_DIM, REFERENCE_MAX_SAMPLES,
};
use crate::prox::{ProxHandle, SetProjector};
use crate::sasc::{
    bound_curves, constants_case1, constants_case2, epoch_length, run_sasc,
    schedule_inequalities_check, Budget, Case, RateConstants, SascConfig,
};
use crate::smoothing::{lemma1_residuals, CertificateInputs};
use crate::trace::ConvergenceTrace;

const BUNDLED_RETURNS: &str = include_str!("../data/portfolio_synthetic.csv");

#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(SascError),
}

impl From<SascError> for CliError {
    fn from(e: SascError) -> Self {
        CliError::Run(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage_err(e: SascError) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "sasc",
    version,
    about = "Stochastic approximation with smoothing for almost-surely constrained convex problems",
    args_override_self = true
)]
struct Cli {
    /// Read `key = value` defaults from FILE; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sparse recovery from randomly drawn linear measurements.
    Bp(BpArgs),
    /// Mean-return portfolio with a per-day risk band.
    Portfolio(PortfolioArgs),
    /// Hard-margin linear SVM from a libsvm file.
    Svm(SvmArgs),
    /// Check the step-size schedule inequalities and the smoothed-gap bounds.
    Check(CheckArgs),
    /// Print rate constants and the predicted bound curve.
    Bounds(BoundsArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Solver {
    Sasc,
    Sgd,
    Spp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SvmSolver {
    Sasc,
    Pegasos,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum StepSize {
    Auto,
    Fixed(f64),
}

fn parse_step(s: &str) -> Result<StepSize, String> {
    if s == "auto" {
        return Ok(StepSize::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(StepSize::Fixed(v)),
        _ => Err(format!("expected 'auto' or a positive number, got '{s}'")),
    }
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse().map_err(|e: SascError| e.to_string())
}

/// Options shared by every solver run.
#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Initial step size, or `auto` (bp only, and its default).
    #[arg(long)]
    alpha0: Option<String>,
    /// Epoch growth factor.
    #[arg(long)]
    omega: Option<f64>,
    /// First epoch length.
    #[arg(long)]
    m0: Option<u64>,
    /// 1 (general convex) or 2 (restricted strongly convex).
    #[arg(long, value_parser = parse_case)]
    case: Option<Case>,
    /// Sample budget as a multiple of the data size; overrides --epochs.
    #[arg(long)]
    passes: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Step for the baselines (SGD base step, SPP proximal step).
    #[arg(long)]
    step: Option<f64>,
    /// Baseline iterations; defaults to the sample count of the SASC budget.
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    checkpoint_every: u64,
    #[arg(long, default_value_t = 1000)]
    validation_samples: usize,
    #[arg(long, default_value_t = 1)]
    minibatch: usize,
    /// Trace CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write zero wall times so repeated runs give identical files.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct BpArgs {
    #[arg(long, default_value_t = 50)]
    d: usize,
    #[arg(long, default_value_t = 20_000)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    sparsity: usize,
    /// Feature correlation `rho^|i-j|`.
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    #[arg(long, value_enum, default_value_t = Solver::Sasc)]
    solver: Solver,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct PortfolioArgs {
    /// Price-relative CSV (rows are days, columns assets); a bundled
    /// synthetic set is used when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Half-width of the allowed deviation from the mean return.
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = Solver::Sasc)]
    solver: Solver,
    /// Skip the deterministic reference solve used for `dist_to_ref`.
    #[arg(long)]
    no_reference: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct SvmArgs {
    /// Training set in libsvm format.
    #[arg(long)]
    data: PathBuf,
    /// Held-out set for the reported error rate.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SvmSolver::Sasc)]
    solver: SvmSolver,
    /// Pegasos regularization; defaults to 1/n.
    #[arg(long)]
    lambda: Option<f64>,
    /// Project Pegasos iterates onto the ball of radius 1/sqrt(lambda).
    #[arg(long)]
    project: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, value_parser = parse_case, default_value = "1")]
    case: Case,
    #[arg(long, default_value_t = 2)]
    m0: u64,
    #[arg(long, default_value_t = 2.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha0: f64,
    /// Last epoch index checked.
    #[arg(long, default_value_t = 40)]
    smax: usize,
    /// Bound on the constraint operator norm.
    #[arg(long, default_value_t = 1.0)]
    norm_bound: f64,
    /// Gradient Lipschitz constant; defaults to the largest admissible 3/(4 alpha0).
    #[arg(long)]
    lipschitz: Option<f64>,
    /// Random points for the smoothed-gap suite.
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, value_parser = parse_case, default_value = "1")]
    case: Case,
    #[arg(long, default_value_t = 2)]
    m0: u64,
    #[arg(long, default_value_t = 2.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha0: f64,
    #[arg(long, default_value_t = 1.0)]
    norm_bound: f64,
    /// Distance from the starting point to a solution.
    #[arg(long, default_value_t = 1.0)]
    initial_distance: f64,
    /// Norm of an optimal multiplier.
    #[arg(long, default_value_t = 1.0)]
    y_star_norm: f64,
    /// Gradient noise bound.
    #[arg(long, default_value_t = 0.0)]
    sigma_f: f64,
    /// Lipschitz constant of a smoothed nonsmooth term.
    #[arg(long)]
    lipschitz_g: Option<f64>,
    /// Largest sample count of the curve (log-spaced from m0).
    #[arg(long, default_value_t = 1_000_000)]
    max_samples: u64,
    #[arg(long, default_value_t = 20)]
    points: usize,
    /// Curve CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Bp(a) => cmd_bp(a),
        Command::Portfolio(a) => cmd_portfolio(a),
        Command::Svm(a) => cmd_svm(a),
        Command::Check(a) => cmd_check(a),
        Command::Bounds(a) => cmd_bounds(a),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Removes `--config FILE` and splices the file's flags in right after the
/// subcommand, so flags given on the command line are parsed later and win.
fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => {
                config = Some(PathBuf::from(
                    it.next().ok_or("--config needs a file argument")?,
                ));
            }
            Some(s) if s.starts_with("--config=") => {
                config = Some(PathBuf::from(&s["--config=".len()..]));
            }
            _ => rest.push(a),
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let pairs = read_config_file(&path).map_err(|e| e.to_string())?;
    let at = rest.len().min(2);
    let tail = rest.split_off(at);
    rest.extend(config_to_flags(&pairs).into_iter().map(OsString::from));
    rest.extend(tail);
    Ok(rest)
}

fn emit_csv(
    out: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> csv::Result<()>,
) -> CliResult<()> {
    let io_err = |p: &str, e: &dyn std::fmt::Display| {
        CliError::Run(SascError::Io {
            path: p.to_string(),
            message: e.to_string(),
        })
    };
    match out {
        Some(p) => {
            let name = p.display().to_string();
            let mut f = std::fs::File::create(p).map_err(|e| io_err(&name, &e))?;
            write(&mut f).map_err(|e| io_err(&name, &e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(|e| io_err("<stdout>", &e))
        }
    }
}

fn emit_trace(trace: &ConvergenceTrace, out: Option<&Path>) -> CliResult<()> {
    emit_csv(out, |w| write_trace(trace, w))
}

fn sasc_config(
    run: &RunArgs,
    defaults: SascConfig,
    auto_alpha0: Option<f64>,
    n: usize,
) -> CliResult<SascConfig> {
    let alpha0 = match run
        .alpha0
        .as_deref()
        .map(parse_step)
        .transpose()
        .map_err(CliError::Usage)?
    {
        None => defaults.alpha0,
        Some(StepSize::Fixed(v)) => v,
        Some(StepSize::Auto) => auto_alpha0
            .ok_or_else(|| CliError::Usage("--alpha0 auto is only defined for bp".into()))?,
    };
    let budget = match (run.passes, run.epochs) {
        (Some(p), _) if p > 0.0 && p.is_finite() => Budget::Samples((p * n as f64).round() as u64),
        (Some(p), _) => {
            return Err(CliError::Usage(format!(
                "--passes must be positive, got {p}"
            )))
        }
        (None, Some(e)) => Budget::Epochs(e),
        (None, None) => defaults.budget,
    };
    Ok(SascConfig {
        alpha0,
        omega: run.omega.unwrap_or(defaults.omega),
        m0: run.m0.unwrap_or(defaults.m0),
        case: run.case.unwrap_or(defaults.case),
        budget,
        seed: run.seed,
        minibatch: run.minibatch,
        checkpoint_every: run.checkpoint_every,
        validation_samples: run.validation_samples,
        initial: None,
        timing: !run.no_timing,
    })
}

/// Samples consumed by the full SASC budget.
fn budget_samples(cfg: &SascConfig) -> CliResult<u64> {
    let epochs = cfg.epoch_count().map_err(usage_err)?;
    Ok((0..epochs)
        .map(|s| epoch_length(cfg.m0, cfg.omega, s) as u64 * cfg.minibatch as u64)
        .sum())
}

fn baseline_config(
    run: &RunArgs,
    method: BaselineMethod,
    step: f64,
    sasc: &SascConfig,
) -> CliResult<BaselineConfig> {
    let iterations = match run.iterations {
        Some(i) => i,
        None => budget_samples(sasc)?,
    };
    Ok(BaselineConfig {
        method,
        step: run.step.unwrap_or(step),
        iterations,
        seed: run.seed,
        checkpoint_every: run.checkpoint_every,
        validation_samples: run.validation_samples,
        timing: !run.no_timing,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_solver(
    solver: Solver,
    problem: &CompositeProblem,
    sgd_problem: &CompositeProblem,
    cfg: &SascConfig,
    run: &RunArgs,
    sgd_step: f64,
    spp_step: f64,
    cert: Option<&CertificateInputs>,
) -> CliResult<(Vec<f64>, ConvergenceTrace)> {
    Ok(match solver {
        Solver::Sasc => {
            cfg.validate(problem).map_err(usage_err)?;
            let r = run_sasc(problem, cfg, cert)?;
            (r.x_bar, r.trace)
        }
        Solver::Sgd => {
            let b = baseline_config(run, BaselineMethod::Sgd, sgd_step, cfg)?;
            let r = run_projected_sgd(sgd_problem, &b, cert)?;
            (r.x, r.trace)
        }
        Solver::Spp => {
            let b = baseline_config(run, BaselineMethod::Spp, spp_step, cfg)?;
            let r = run_spp(problem, &b, cert)?;
            (r.x, r.trace)
        }
    })
}

fn summarize(trace: &ConvergenceTrace) {
    if let Some(r) = trace.last() {
        eprintln!(
            "samples {}  objective {:.6e}  feasibility {:.3e}{}",
            r.samples,
            r.objective,
            r.feasibility,
            r.dist_to_ref
                .map(|d| format!("  dist_to_ref {d:.3e}"))
                .unwrap_or_default()
        );
    }
}

fn cmd_bp(a: BpArgs) -> CliResult<()> {
    let inst = gen_basis_pursuit(a.d, a.n, a.sparsity, a.rho, a.run.seed).map_err(usage_err)?;
    let problem = make_bp_problem(&inst)?;
    let defaults = SascConfig {
        alpha0: inst.auto_alpha0(),
        budget: Budget::Samples(2 * a.n as u64),
        ..SascConfig::default()
    };
    let cfg = sasc_config(&a.run, defaults, Some(inst.auto_alpha0()), a.n)?;
    // The planted solution has zero residual; its multiplier is not tracked.
    let p_star = problem.objective(&inst.x_star);
    let cert = CertificateInputs::new(inst.x_star.clone(), p_star, 0.0, 0.0)?;
    let sgd_problem = if a.solver == Solver::Sgd {
        make_bp_least_squares_problem(&inst)?
    } else {
        problem.clone()
    };
    let (x, trace) = run_solver(
        a.solver,
        &problem,
        &sgd_problem,
        &cfg,
        &a.run,
        1.0,
        1e-3,
        Some(&cert),
    )?;
    let rel = crate::linalg::dist(&x, &inst.x_star) / crate::linalg::norm(&inst.x_star);
    eprintln!("relative error {rel:.3e}");
    summarize(&trace);
    emit_trace(&trace, a.run.out.as_deref())
}

fn cmd_portfolio(a: PortfolioArgs) -> CliResult<()> {
    let returns = match &a.data {
        Some(p) => crate::io::read_returns_csv(p)?,
        None => parse_returns_csv(BUNDLED_RETURNS, "bundled portfolio data")?,
    };
    let n = returns.len();
    let problem = make_portfolio_problem(&returns, a.epsilon).map_err(usage_err)?;
    let defaults = SascConfig {
        alpha0: 0.1,
        budget: Budget::Epochs(14),
        ..SascConfig::default()
    };
    let cfg = sasc_config(&a.run, defaults, None, n)?;
    let cert = if a.no_reference || n > REFERENCE_MAX_SAMPLES || problem.dim > REFERENCE_MAX_DIM {
        None
    } else {
        let (x, p) = reference_solution(&problem, 1e-6)?;
        Some(CertificateInputs::new(x, p, 0.0, 0.0)?)
    };
    let (x, trace) = run_solver(
        a.solver,
        &problem,
        &problem,
        &cfg,
        &a.run,
        0.1,
        1e-3,
        cert.as_ref(),
    )?;
    let weights: Vec<String> = x.iter().map(|w| format!("{w:.4}")).collect();
    eprintln!("weights [{}]", weights.join(", "));
    summarize(&trace);
    emit_trace(&trace, a.run.out.as_deref())
}

fn cmd_svm(a: SvmArgs) -> CliResult<()> {
    let train = parse_libsvm(&a.data, None)?;
    let test = a
        .test
        .as_deref()
        .map(|p| parse_libsvm(p, Some(train.dim)))
        .transpose()?;
    let (x, trace) = match a.solver {
        SvmSolver::Pegasos => {
            let lambda = a.lambda.unwrap_or(1.0 / train.len().max(1) as f64);
            let iterations = match (a.run.iterations, a.run.passes) {
                (Some(i), _) => i,
                (None, Some(p)) => (p * train.len() as f64).round() as u64,
                (None, None) => 100 * train.len() as u64,
            };
            let cfg = PegasosConfig {
                checkpoint_every: a.run.checkpoint_every,
                project: a.project,
                timing: !a.run.no_timing,
                ..PegasosConfig::new(lambda, iterations, a.run.seed)
            };
            let r = run_pegasos(&train, test.as_ref(), &cfg).map_err(|e| match e {
                SascError::InvalidParameter { .. } | SascError::Config(_) => usage_err(e),
                e => CliError::Run(e),
            })?;
            (r.x, r.trace)
        }
        SvmSolver::Sasc => {
            let problem = make_svm_problem(&train)?;
            let defaults = SascConfig {
                alpha0: 0.5,
                m0: 4,
                case: Case::RestrictedStronglyConvex,
                budget: Budget::Epochs(16),
                ..SascConfig::default()
            };
            let cfg = sasc_config(&a.run, defaults, None, train.len())?;
            cfg.validate(&problem).map_err(usage_err)?;
            let r = run_sasc(&problem, &cfg, None)?;
            (r.x_bar, r.trace)
        }
    };
    eprintln!("training error {:.4}", train.error_rate(&x));
    if let Some(t) = &test {
        eprintln!("test error {:.4}", t.error_rate(&x));
    }
    summarize(&trace);
    emit_trace(&trace, a.run.out.as_deref())
}

/// `min ||x||^2 / 2  s.t.  x_1 = 1`, with `x* = [1, 0]` and multiplier norm 1.
fn analytic_instance() -> CliResult<(CompositeProblem, CertificateInputs)> {
    let c = ConstraintSample::new(LinearMap::Row(vec![1.0, 0.0]), SetProjector::singleton(1.0))?;
    let src = FiniteConstraints::new(2, vec![c])?;
    let p = CompositeProblem::new(
        2,
        Arc::new(QuadraticTerm::half_squared_norm(2)),
        ProxHandle::Zero,
        Arc::new(src),
        1.0,
    )?;
    Ok((p, CertificateInputs::new(vec![1.0, 0.0], 0.5, 1.0, 0.0)?))
}

fn cmd_check(a: CheckArgs) -> CliResult<()> {
    let cfg = SascConfig {
        alpha0: a.alpha0,
        omega: a.omega,
        m0: a.m0,
        case: a.case,
        ..SascConfig::default()
    };
    let lipschitz = a.lipschitz.unwrap_or(0.75 / a.alpha0);
    let report = schedule_inequalities_check(a.case, &cfg, a.norm_bound, lipschitz, a.smax)
        .map_err(usage_err)?;
    println!(
        "schedule inequalities (case {}, s <= {})",
        if a.case == Case::GeneralConvex { 1 } else { 2 },
        a.smax
    );
    for e in &report.entries {
        println!(
            "  {:<18} worst slack {:>13.6e}  relative {:>13.6e}  at epoch {}",
            e.name, e.worst, e.worst_relative, e.at_epoch
        );
    }
    let (problem, cert) = analytic_instance()?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut worst = [f64::INFINITY; 4];
    for _ in 0..a.draws {
        let x = [rng.random_range(-5.0..=5.0), rng.random_range(-5.0..=5.0)];
        let beta = 10f64.powf(rng.random_range(-3.0..=1.0));
        let s = lemma1_residuals(&x, beta, &problem, &cert, 1, 0)?.as_array();
        for (w, v) in worst.iter_mut().zip(s) {
            *w = w.min(v);
        }
    }
    println!("smoothed-gap bounds ({} draws)", a.draws);
    for (name, w) in [
        "gap_lower",
        "objective_lower",
        "objective_upper",
        "feasibility",
    ]
    .iter()
    .zip(worst)
    {
        println!("  {name:<18} worst slack {w:>13.6e}");
    }
    let min = report
        .min_slack()
        .min(worst.iter().copied().fold(f64::INFINITY, f64::min));
    if min < -1e-9 {
        return Err(CliError::Run(SascError::Numeric(format!(
            "violated inequality, worst slack {min:e}"
        ))));
    }
    println!("all slacks >= -1e-9");
    Ok(())
}

fn cmd_bounds(a: BoundsArgs) -> CliResult<()> {
    let cfg = SascConfig {
        alpha0: a.alpha0,
        omega: a.omega,
        m0: a.m0,
        case: a.case,
        ..SascConfig::default()
    };
    let cert = CertificateInputs::new(vec![a.initial_distance], 0.0, a.y_star_norm, a.sigma_f)
        .map_err(usage_err)?;
    let constants = match a.case {
        Case::GeneralConvex => RateConstants::Case1(
            constants_case1(&cfg, a.norm_bound, &cert, &[0.0]).map_err(usage_err)?,
        ),
        Case::RestrictedStronglyConvex => RateConstants::Case2(
            constants_case2(&cfg, a.norm_bound, &cert, &[0.0]).map_err(usage_err)?,
        ),
    };
    match &constants {
        RateConstants::Case1(c) => {
            eprintln!("C1 {:e}  C2 {:e}  C3 {:e}  C4 {:e}", c.c1, c.c2, c.c3, c.c4)
        }
        RateConstants::Case2(d) => eprintln!("D1 {:e}  D2 {:e}  D3 {:e}", d.d1, d.d2, d.d3),
    }
    if a.points < 2 || a.max_samples <= a.m0 {
        return Err(CliError::Usage(
            "need --points >= 2 and --max-samples > m0".into(),
        ));
    }
    let (lo, hi) = ((a.m0 as f64).ln(), (a.max_samples as f64).ln());
    let mut samples: Vec<u64> = (0..a.points)
        .map(|k| {
            (lo + (hi - lo) * k as f64 / (a.points - 1) as f64)
                .exp()
                .round() as u64
        })
        .map(|m| m.clamp(a.m0, a.max_samples))
        .collect();
    samples.dedup();
    let curve =
        bound_curves(&constants, a.m0, a.omega, &samples, a.lipschitz_g).map_err(usage_err)?;
    emit_csv(a.out.as_deref(), |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([
            "samples",
            "objective_upper",
            "objective_lower",
            "feasibility",
        ])?;
        for p in &curve {
            wr.write_record([
                p.samples.to_string(),
                p.objective_upper.to_string(),
                p.objective_lower.to_string(),
                p.feasibility.to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    })
}
