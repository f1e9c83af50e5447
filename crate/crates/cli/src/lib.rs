//! Command-line front end: `solve`, `indep-test`, `assign` and `bench`
//! subcommands over the library's CSV formats.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or solver errors.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use semiassign::baselines::{
    brute_force_solve, duplicate_columns, hungarian_solve_with, SinkhornParams,
};
use semiassign::bench::{estimate_loglog_slope, run_sweep, summarize, Solver, SweepConfig};
use semiassign::builders::{
    build_general_ot, build_many_to_many, build_one_to_many, extract_plan, many_to_many_payoff,
    one_to_many_payoff, wasserstein_independence_statistic,
};
use semiassign::io::{read_payoff_file, read_problem_file, read_samples_file, write_records};
use semiassign::solver::SolveOptions;
use semiassign::synth::Case;
use semiassign::{verify_certificate, Error, SemiAssignProblem, SolveReport};

#[derive(Parser)]
#[command(
    name = "semiassign",
    version,
    about = "Exact semi-assignment and capacitated optimal-transport solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and print objective, assignment and certificate.
    Solve(SolveArgs),
    /// Compute the Wasserstein independence statistic for paired samples.
    IndepTest(IndepTestArgs),
    /// Solve one-to-many or many-to-many assignment from a payoff file.
    Assign(AssignArgs),
    /// Run benchmark sweeps on the synthetic independence-test family.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Problem CSV: header `caps,<m_1>,...` then one cost row per line.
    problem: PathBuf,
    /// Equality-graph tolerance override.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum, default_value_t = SolverChoice::Modified)]
    solver: SolverChoice,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverChoice {
    Modified,
    Hungarian,
    Brute,
}

#[derive(Args)]
struct IndepTestArgs {
    /// Samples CSV: header `#dy=<d_y>,y_1..,z_1..` then one sample per line.
    samples: PathBuf,
    /// Ground-metric norm order.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    p: u8,
}

#[derive(Args)]
struct AssignArgs {
    #[command(subcommand)]
    kind: AssignKind,
}

#[derive(Subcommand)]
enum AssignKind {
    /// Choose players for roles (payoff rows = players, columns = roles).
    OneToMany {
        payoff: PathBuf,
        /// Players needed per role; falls back to the file's `caps,...` line.
        #[arg(long, value_delimiter = ',')]
        caps: Option<Vec<usize>>,
    },
    /// Assign agent slots to tasks (payoff rows = tasks, columns = agents).
    ManyToMany {
        payoff: PathBuf,
        /// Agent slots each task needs.
        #[arg(long, value_delimiter = ',', required = true)]
        needs: Vec<usize>,
        /// Slot capacity per agent; falls back to the file's `caps,...` line.
        #[arg(long, value_delimiter = ',')]
        caps: Option<Vec<usize>>,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Sample sizes, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "modified")]
    solvers: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Records CSV destination.
    #[arg(long, required = true)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = CaseChoice::Independent)]
    case: CaseChoice,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2), default_value_t = 1)]
    p: u8,
    #[arg(long, default_value_t = 0.1)]
    reg: f64,
    #[arg(long, default_value_t = 1e-4)]
    accuracy: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseChoice {
    Independent,
    Dependent,
}

impl From<CaseChoice> for Case {
    fn from(c: CaseChoice) -> Case {
        match c {
            CaseChoice::Independent => Case::Independent,
            CaseChoice::Dependent => Case::Dependent,
        }
    }
}

/// Parses `argv` and runs the selected subcommand, writing human output to
/// `stdout` and diagnostics to `stderr`. Returns the process exit code.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", err);
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", err);
                    1
                }
            };
        }
    };
    match run(cli, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "error: {}", err);
            2
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Error> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args, out),
        Command::IndepTest(args) => cmd_indep_test(args, out),
        Command::Assign(args) => match args.kind {
            AssignKind::OneToMany { payoff, caps } => cmd_one_to_many(payoff, caps, out),
            AssignKind::ManyToMany {
                payoff,
                needs,
                caps,
            } => cmd_many_to_many(payoff, needs, caps, out),
        },
        Command::Bench(args) => cmd_bench(args, out),
    }
}

fn print_report(
    out: &mut dyn Write,
    problem: &SemiAssignProblem,
    report: &SolveReport,
) -> Result<(), Error> {
    writeln!(out, "objective: {}", report.objective)?;
    writeln!(out, "scaled objective: {}", report.scaled_objective)?;
    let assignment: Vec<String> = report
        .matching
        .row_to_col()
        .iter()
        .map(|j| match j {
            Some(j) => (j + 1).to_string(),
            None => "-".to_string(),
        })
        .collect();
    writeln!(out, "assignment: {}", assignment.join(","))?;
    match &report.dual {
        Some(dual) => {
            let cert = verify_certificate(
                dual,
                &report.matching,
                &problem.to_max_weight(),
                problem.caps(),
            )?;
            writeln!(
                out,
                "certificate: {} (dual_feasible={}, complementary_slack={}, duality_gap={:e})",
                if cert.holds() { "ok" } else { "VIOLATED" },
                cert.dual_feasible,
                cert.complementary_slack,
                cert.duality_gap
            )?;
        }
        None => writeln!(out, "certificate: none (exhaustive enumeration)")?,
    }
    writeln!(out, "op count: {}", report.op_count)?;
    Ok(())
}

fn cmd_solve(args: SolveArgs, out: &mut dyn Write) -> Result<(), Error> {
    let problem = read_problem_file(&args.problem)?;
    let opts = SolveOptions {
        tight_eps: args.eps,
        ..SolveOptions::default()
    };
    let report = match args.solver {
        SolverChoice::Modified => semiassign::solve(&problem, &opts)?,
        SolverChoice::Hungarian => hungarian_solve_with(&duplicate_columns(&problem), &opts)?,
        SolverChoice::Brute => brute_force_solve(&problem)?,
    };
    print_report(out, &problem, &report)
}

fn cmd_indep_test(args: IndepTestArgs, out: &mut dyn Write) -> Result<(), Error> {
    let samples = read_samples_file(&args.samples)?;
    let statistic = wasserstein_independence_statistic(&samples, args.p as f64)?;
    writeln!(out, "{}", statistic)?;
    Ok(())
}

fn resolve_caps(
    cli_caps: Option<Vec<usize>>,
    sidecar: Option<Vec<usize>>,
    what: &str,
) -> Result<Vec<usize>, Error> {
    cli_caps.or(sidecar).ok_or_else(|| {
        Error::InvalidParams(format!(
            "{} required: pass --caps or start the payoff file with a 'caps,...' line",
            what
        ))
    })
}

fn cmd_one_to_many(
    path: PathBuf,
    caps: Option<Vec<usize>>,
    out: &mut dyn Write,
) -> Result<(), Error> {
    let (payoff, sidecar) = read_payoff_file(&path)?;
    let roles = resolve_caps(caps, sidecar, "role capacities")?;
    let (problem, pad) = build_one_to_many(&payoff, &roles)?;
    let report = semiassign::solve(&problem, &SolveOptions::default())?;
    for (player, assigned) in report.matching.row_to_col().iter().enumerate() {
        match assigned {
            Some(j) if pad.dummy_col != Some(*j) => {
                writeln!(out, "player {} -> role {}", player + 1, j + 1)?
            }
            _ => writeln!(out, "player {} -> unselected", player + 1)?,
        }
    }
    writeln!(
        out,
        "total payoff: {}",
        one_to_many_payoff(&report, &payoff, &pad)
    )?;
    Ok(())
}

fn cmd_many_to_many(
    path: PathBuf,
    needs: Vec<usize>,
    caps: Option<Vec<usize>>,
    out: &mut dyn Write,
) -> Result<(), Error> {
    let (payoff, sidecar) = read_payoff_file(&path)?;
    let agent_caps = resolve_caps(caps, sidecar, "agent capacities")?;
    let (spec, pad) = build_many_to_many(&payoff, &needs, &agent_caps)?;
    let (problem, dup) = build_general_ot(&spec)?;
    let report = semiassign::solve(&problem, &SolveOptions::default())?;
    let plan = extract_plan(&report, &dup, &spec)?;
    let total_mass = spec.total_mass();
    for task in 0..payoff.nrows() {
        let mut parts = Vec::new();
        for agent in 0..payoff.ncols() {
            let slots = (plan.mass[(task, agent)] * total_mass as f64).round() as usize;
            if slots > 0 {
                parts.push(format!("agent {} x{}", agent + 1, slots));
            }
        }
        writeln!(out, "task {}: {}", task + 1, parts.join(", "))?;
    }
    writeln!(
        out,
        "total payoff: {}",
        many_to_many_payoff(&plan, &payoff, &pad, total_mass)
    )?;
    Ok(())
}

fn cmd_bench(args: BenchArgs, out: &mut dyn Write) -> Result<(), Error> {
    let solvers: Vec<Solver> = args
        .solvers
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let config = SweepConfig::new(
        solvers,
        args.case.into(),
        args.sizes,
        args.trials,
        args.p as f64,
        args.seed,
        SinkhornParams {
            reg: args.reg,
            accuracy: args.accuracy,
            max_iter: args.max_iter,
        },
    )?;
    let records = run_sweep(&config)?;
    let file = std::fs::File::create(&args.out)?;
    write_records(std::io::BufWriter::new(file), &records)?;
    writeln!(
        out,
        "wrote {} records to {}",
        records.len(),
        args.out.display()
    )?;

    for &solver in &config.solvers {
        writeln!(out, "{} ({} case):", solver.as_str(), config.case.as_str())?;
        for s in summarize(&records, solver) {
            writeln!(
                out,
                "  n={:<3} ops min/mean/max = {}/{:.1}/{}  time(ns) mean = {:.0}",
                s.n, s.min_ops, s.mean_ops, s.max_ops, s.mean_ns
            )?;
        }
        match estimate_loglog_slope(&records, solver) {
            Ok(slope) => writeln!(out, "  fitted log-log op-count slope: {:.3}", slope)?,
            Err(_) => writeln!(out, "  fitted slope: needs >= 3 sizes")?,
        }
    }
    Ok(())
}
