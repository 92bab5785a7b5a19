use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use coalition_core::experiment::{self, ExperimentGrid, GridOptions};
use coalition_core::lp::{min_feasible_t_traced, ClpOptions};
use coalition_core::{
    claim1_instance, exact_bruteforce, gen_uniform, max_nonpreferred_score, natural_lp_value,
    reverse, solve, Error, ExactLimits, Mode, ProblemInstance, ScoringVector, SolveOptions,
};
use log::{debug, info};

#[derive(Parser, Debug)]
#[command(name = "coalition", version, about = "Coalitional manipulation of positional scoring rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a Borda electorate with uniformly random ballots.
    Gen(GenArgs),
    /// Solve an instance file and print a JSON report.
    Solve(SolveArgs),
    /// Run the comparison grid and write one CSV row per trial.
    ///
    /// CSV columns, in order: m, k, n, mode, trial, seed, t_clp, clp_score,
    /// reverse_score, avgfit_score, largestfit_score, exact_t_star, clp_secs,
    /// reverse_secs, avgfit_secs, largestfit_secs, exact_secs. Scores are
    /// integers; empty cells mean "not computed" (Average/Largest Fit are
    /// unweighted only, the exact oracle needs m <= 6 and k <= 3, runtimes need
    /// --timings). Runtimes carry six decimals.
    Compare(CompareArgs),
    /// REVERSE against the snake construction on the k = 3 tied family.
    Lowerbound(LowerboundArgs),
    /// Natural LP against the configuration LP on k = 1, all scores tied.
    Gap(GapArgs),
}

#[derive(Args, Debug, Clone)]
struct SolverFlags {
    #[arg(long, default_value = "ucm")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rounding repeats (default: m).
    #[arg(long)]
    repeats: Option<usize>,
    /// Constant d in beta = ceil(d * sqrt(m ln m)).
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    /// LP feasibility tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Per-candidate column cap (default: 50 * m * k).
    #[arg(long)]
    max_columns: Option<usize>,
}

impl SolverFlags {
    fn options(&self, natural_lp: bool) -> SolveOptions {
        SolveOptions {
            clp: ClpOptions {
                eps: self.tol,
                max_columns: self.max_columns,
            },
            repeats: self.repeats,
            seed: self.seed,
            d: self.d,
            natural_lp,
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "ucm")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    /// Also report the natural LP value.
    #[arg(long)]
    natural_lp: bool,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    solver: SolverFlags,
    /// Candidate counts; k = floor(sqrt(m)) and n = 2k for each.
    #[arg(long, value_delimiter = ',', default_values_t = [9, 16, 25, 36])]
    m: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-(m, k) summary CSV destination (default: stderr).
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Fill the runtime columns (makes reruns differ).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct LowerboundArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4])]
    t: Vec<usize>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10])]
    m: Vec<usize>,
}

enum Failure {
    Usage(anyhow::Error),
    Solver(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Solver(_) | Error::ColumnCap { .. } | Error::LimitsExceeded(_) | Error::EmptySupport(_) => {
                Failure::Solver(e.into())
            }
            other => Failure::Usage(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_instance(path: &Path) -> Result<ProblemInstance, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    ProblemInstance::from_json(&text)
        .map_err(|e| Failure::Usage(anyhow!("{}: {e}", path.display())))
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let inst = gen_uniform(args.n, args.m, args.k, args.mode, args.seed)?;
    let mut out = output(args.out.as_deref())?;
    writeln!(out, "{}", inst.to_json()).context("write failed")?;
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let inst = read_instance(&args.instance)?;
    let options = args.solver.options(args.natural_lp);
    if log::log_enabled!(log::Level::Debug) {
        min_feasible_t_traced(&inst, args.solver.mode, &options.clp, &mut |t| {
            debug!(
                "T={} round {}: +{} columns (pool {}), dual objective {:.6}",
                t.bound, t.iteration, t.columns_added, t.pool_size, t.dual_objective
            )
        })?;
    }
    let report = solve(&inst, args.solver.mode, &options)?;
    info!("T_clp={} achieved={}", report.t_clp, report.achieved);
    let json = serde_json::to_string_pretty(&report).context("report serialization")?;
    println!("{json}");
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), Failure> {
    let grid = ExperimentGrid::square_root(&args.m, args.trials, args.solver.mode, args.solver.seed);
    let options = GridOptions {
        solve: args.solver.options(false),
        timings: args.timings,
        exact_limits: ExactLimits::default(),
    };
    info!("running {} cells", grid.cells.len());
    let records = experiment::run_grid(&grid, &options)?;
    experiment::write_csv(&records, output(args.out.as_deref())?)?;
    let summaries = experiment::summarize(&records);
    match &args.summary {
        Some(p) => experiment::write_summary(&summaries, output(Some(p))?)?,
        None => experiment::write_summary(&summaries, io::stderr().lock())?,
    }
    Ok(())
}

fn cmd_lowerbound(args: LowerboundArgs) -> Result<(), Failure> {
    println!("t,m,reverse,construction,t_clp,clp");
    for &t in &args.t {
        if t == 0 {
            return Err(Failure::Usage(anyhow!("t must be positive")));
        }
        let (inst, strategy) = claim1_instance(t);
        let rev = max_nonpreferred_score(&inst, &reverse(&inst))?;
        let built = max_nonpreferred_score(&inst, &strategy)?;
        let report = solve(&inst, Mode::Ucm, &args.solver.options(false))?;
        println!("{t},{},{rev},{built},{},{}", inst.m(), report.t_clp, report.achieved);
    }
    Ok(())
}

fn cmd_gap(args: GapArgs) -> Result<(), Failure> {
    println!("m,natural_lp,t_clp,exact_t_star");
    for &m in &args.m {
        if m == 0 {
            return Err(Failure::Usage(anyhow!("m must be positive")));
        }
        let inst = ProblemInstance::unweighted(ScoringVector::borda(m), vec![0; m], 1, None)?;
        let natural = natural_lp_value(&inst)?;
        let report = solve(&inst, Mode::Ucm, &SolveOptions::default())?;
        let exact = if m <= 10 {
            let limits = ExactLimits { max_m: 10, max_k: 1 };
            exact_bruteforce(&inst, limits)?.t_star.to_string()
        } else {
            String::new()
        };
        println!("{m},{natural:.6},{},{exact}", report.t_clp);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Lowerbound(a) => cmd_lowerbound(a),
        Command::Gap(a) => cmd_gap(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver failure: {e:#}");
            ExitCode::from(2)
        }
    }
}
