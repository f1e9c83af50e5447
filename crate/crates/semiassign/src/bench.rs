//! Benchmark sweeps over the synthetic independence-test family: build one
//! instance per (size, trial), run each configured solver on it, record
//! operation counts, wall time and objectives, and fit log-log complexity
//! slopes.

use std::time::Instant;

use crate::baselines::{duplicate_columns, hungarian_solve_with, sinkhorn_solve, SinkhornParams};
use crate::builders::build_independence_problem;
use crate::error::{Error, Result};
use crate::solver::{solve, SolveOptions};
use crate::synth::{gen_synthetic, Case};

/// Solvers the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Solver {
    Modified,
    Hungarian,
    Sinkhorn,
}

impl Solver {
    pub fn as_str(&self) -> &'static str {
        match self {
            Solver::Modified => "modified",
            Solver::Hungarian => "hungarian",
            Solver::Sinkhorn => "sinkhorn",
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modified" => Ok(Solver::Modified),
            "hungarian" => Ok(Solver::Hungarian),
            "sinkhorn" => Ok(Solver::Sinkhorn),
            other => Err(Error::InvalidParams(format!("unknown solver '{}'", other))),
        }
    }
}

/// Configuration of one sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Solvers to run; kept sorted and deduplicated by the constructor.
    pub solvers: Vec<Solver>,
    pub case: Case,
    /// Strictly increasing sample sizes.
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Norm order for the ground metric.
    pub p: f64,
    pub seed: u64,
    pub sinkhorn: SinkhornParams,
}

impl SweepConfig {
    pub fn new(
        solvers: Vec<Solver>,
        case: Case,
        sizes: Vec<usize>,
        trials: usize,
        p: f64,
        seed: u64,
        sinkhorn: SinkhornParams,
    ) -> Result<Self> {
        if solvers.is_empty() {
            return Err(Error::InvalidParams("no solvers selected".into()));
        }
        if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(
                "sizes must be nonempty and strictly increasing".into(),
            ));
        }
        if sizes[0] == 0 {
            return Err(Error::InvalidParams("sizes must be positive".into()));
        }
        if trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        let mut solvers = solvers;
        solvers.sort();
        solvers.dedup();
        Ok(Self {
            solvers,
            case,
            sizes,
            trials,
            p,
            seed,
            sinkhorn,
        })
    }
}

/// One measurement: a solver applied to the instance of one (size, trial).
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub solver: Solver,
    pub case: Case,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub op_count: u64,
    pub elapsed_ns: u64,
    /// Probability-scale objective, comparable across exact and approximate
    /// solvers.
    pub objective: f64,
}

/// Per-trial seeds mix the master seed with size and trial index, so adding
/// sizes or trials never perturbs existing ones. SplitMix64 finalizer.
pub fn derive_seed(master: u64, n: usize, trial: usize) -> u64 {
    let mut x = master
        ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

const EXACT_AGREEMENT_TOL: f64 = 1e-8;

fn run_trial(config: &SweepConfig, n: usize, trial: usize) -> Result<Vec<BenchRecord>> {
    let seed = derive_seed(config.seed, n, trial);
    let samples = gen_synthetic(n, seed, config.case);
    let problem = build_independence_problem(&samples, config.p)?;
    let opts = SolveOptions::default();

    let mut records = Vec::with_capacity(config.solvers.len());
    let mut exact: Option<(Solver, f64)> = None;
    for &solver in &config.solvers {
        let (op_count, elapsed_ns, objective, unscaled) = match solver {
            Solver::Modified => {
                let report = solve(&problem, &opts)?;
                (
                    report.op_count,
                    report.elapsed.as_nanos() as u64,
                    report.scaled_objective,
                    Some(report.objective),
                )
            }
            Solver::Hungarian => {
                let started = Instant::now();
                let square = duplicate_columns(&problem);
                let report = hungarian_solve_with(&square, &opts)?;
                (
                    report.op_count,
                    started.elapsed().as_nanos() as u64,
                    report.scaled_objective,
                    Some(report.objective),
                )
            }
            Solver::Sinkhorn => {
                let report = sinkhorn_solve(&problem, &config.sinkhorn)?;
                (
                    report.op_count,
                    report.elapsed.as_nanos() as u64,
                    report.objective,
                    None,
                )
            }
        };
        if let Some(unscaled) = unscaled {
            match exact {
                None => exact = Some((solver, unscaled)),
                Some((first_solver, first_objective)) => {
                    if (first_objective - unscaled).abs() > EXACT_AGREEMENT_TOL {
                        return Err(Error::SolverDisagreement {
                            n,
                            trial,
                            solver_a: first_solver.as_str(),
                            solver_b: solver.as_str(),
                            objective_a: first_objective,
                            objective_b: unscaled,
                        });
                    }
                }
            }
        }
        records.push(BenchRecord {
            solver,
            case: config.case,
            n,
            trial,
            seed,
            op_count,
            elapsed_ns,
            objective,
        });
    }
    Ok(records)
}

fn worker_count(tasks: usize) -> usize {
    let available = std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1);
    let capped = match std::env::var("OT_SEMIASSIGN_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => k.min(available),
            _ => available,
        },
        Err(_) => available,
    };
    capped.min(tasks).max(1)
}

/// Runs every (size, trial) of the sweep, in parallel across worker threads,
/// and returns the records sorted by (solver, size, trial). Exact solvers are
/// cross-checked against each other per trial; disagreement aborts the sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<BenchRecord>> {
    let tasks: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();
    let workers = worker_count(tasks.len());

    let mut slots: Vec<Option<Result<Vec<BenchRecord>>>> = Vec::new();
    slots.resize_with(tasks.len(), || None);
    let slots = std::sync::Mutex::new(slots);
    let next = std::sync::atomic::AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if idx >= tasks.len() {
                    break;
                }
                let (n, trial) = tasks[idx];
                let result = run_trial(config, n, trial);
                slots.lock().unwrap()[idx] = Some(result);
            });
        }
    });

    let mut records = Vec::with_capacity(tasks.len() * config.solvers.len());
    for slot in slots.into_inner().unwrap() {
        records.extend(slot.expect("every task ran")?);
    }
    records.sort_by_key(|r| (r.solver, r.n, r.trial));
    Ok(records)
}

/// Ordinary least squares of `ln(mean op_count per size)` against `ln(n)` for
/// one solver's records. Needs at least three distinct sizes.
pub fn estimate_loglog_slope(records: &[BenchRecord], solver: Solver) -> Result<f64> {
    let mut sizes: Vec<usize> = records
        .iter()
        .filter(|r| r.solver == solver)
        .map(|r| r.n)
        .collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 distinct sizes for solver '{}', found {}",
            solver.as_str(),
            sizes.len()
        )));
    }
    let points: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| {
            let ops: Vec<u64> = records
                .iter()
                .filter(|r| r.solver == solver && r.n == n)
                .map(|r| r.op_count)
                .collect();
            let mean = ops.iter().sum::<u64>() as f64 / ops.len() as f64;
            ((n as f64).ln(), mean.ln())
        })
        .collect();
    let k = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / k;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / k;
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Per-size min/mean/max of a metric for one solver.
#[derive(Debug, Clone)]
pub struct SizeSummary {
    pub n: usize,
    pub min_ops: u64,
    pub mean_ops: f64,
    pub max_ops: u64,
    pub min_ns: u64,
    pub mean_ns: f64,
    pub max_ns: u64,
}

/// Summarizes one solver's records per size, in ascending size order.
pub fn summarize(records: &[BenchRecord], solver: Solver) -> Vec<SizeSummary> {
    let mut sizes: Vec<usize> = records
        .iter()
        .filter(|r| r.solver == solver)
        .map(|r| r.n)
        .collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|n| {
            let rows: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.solver == solver && r.n == n)
                .collect();
            let count = rows.len() as f64;
            SizeSummary {
                n,
                min_ops: rows.iter().map(|r| r.op_count).min().unwrap(),
                mean_ops: rows.iter().map(|r| r.op_count).sum::<u64>() as f64 / count,
                max_ops: rows.iter().map(|r| r.op_count).max().unwrap(),
                min_ns: rows.iter().map(|r| r.elapsed_ns).min().unwrap(),
                mean_ns: rows.iter().map(|r| r.elapsed_ns).sum::<u64>() as f64 / count,
                max_ns: rows.iter().map(|r| r.elapsed_ns).max().unwrap(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(solvers: Vec<Solver>, sizes: Vec<usize>, trials: usize) -> SweepConfig {
        SweepConfig::new(
            solvers,
            Case::Independent,
            sizes,
            trials,
            1.0,
            2024,
            SinkhornParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_record_sweep() {
        let records = run_sweep(&config(vec![Solver::Modified], vec![5], 1)).unwrap();
        assert_eq!(records.len(), 1);
        assert!(records[0].op_count > 0);
    }

    #[test]
    fn exact_solvers_agree_across_the_sweep() {
        let records = run_sweep(&config(
            vec![Solver::Modified, Solver::Hungarian],
            vec![6, 9, 12],
            10,
        ))
        .unwrap();
        assert_eq!(records.len(), 60);
        for n in [6usize, 9, 12] {
            for t in 0..10 {
                let find = |s: Solver| {
                    records
                        .iter()
                        .find(|r| r.solver == s && r.n == n && r.trial == t)
                        .unwrap()
                };
                let a = find(Solver::Modified);
                let b = find(Solver::Hungarian);
                assert!((a.objective - b.objective).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn sinkhorn_objective_bounds_the_exact_one() {
        let records = run_sweep(&config(
            vec![Solver::Modified, Solver::Sinkhorn],
            vec![4, 5, 6],
            2,
        ))
        .unwrap();
        for n in [4usize, 5, 6] {
            for t in 0..2 {
                let find = |s: Solver| {
                    records
                        .iter()
                        .find(|r| r.solver == s && r.n == n && r.trial == t)
                        .unwrap()
                };
                assert!(find(Solver::Sinkhorn).objective >= find(Solver::Modified).objective - 1e-9);
            }
        }
    }

    #[test]
    fn slope_recovers_exact_power_laws() {
        let mk = |n: usize, ops: u64| BenchRecord {
            solver: Solver::Modified,
            case: Case::Independent,
            n,
            trial: 0,
            seed: 0,
            op_count: ops,
            elapsed_ns: 1,
            objective: 0.0,
        };
        let records: Vec<BenchRecord> = [4usize, 8, 16, 32]
            .iter()
            .map(|&n| mk(n, (n as u64).pow(5)))
            .collect();
        let slope = estimate_loglog_slope(&records, Solver::Modified).unwrap();
        assert!((slope - 5.0).abs() < 1e-9);

        let records: Vec<BenchRecord> = [4usize, 8, 16, 32]
            .iter()
            .map(|&n| mk(n, 7 * (n as u64).pow(6)))
            .collect();
        let slope = estimate_loglog_slope(&records, Solver::Modified).unwrap();
        assert!((slope - 6.0).abs() < 1e-9);

        assert!(matches!(
            estimate_loglog_slope(&records[..2], Solver::Modified),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn sweeps_are_reproducible() {
        let cfg = config(vec![Solver::Modified], vec![4, 6], 3);
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        let view =
            |rs: &[BenchRecord]| -> Vec<(u64, u64, String)> {
                rs.iter()
                    .map(|r| (r.seed, r.op_count, format!("{}", r.objective)))
                    .collect()
            };
        assert_eq!(view(&a), view(&b));
    }

    #[test]
    fn thread_cap_does_not_change_results() {
        let cfg = config(vec![Solver::Modified], vec![4, 5], 2);
        let parallel = run_sweep(&cfg).unwrap();
        std::env::set_var("OT_SEMIASSIGN_THREADS", "1");
        let serial = run_sweep(&cfg).unwrap();
        std::env::remove_var("OT_SEMIASSIGN_THREADS");
        let view = |rs: &[BenchRecord]| -> Vec<(u64, u64)> {
            rs.iter().map(|r| (r.op_count, r.objective.to_bits())).collect()
        };
        assert_eq!(view(&parallel), view(&serial));
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig::new(
            vec![],
            Case::Independent,
            vec![3],
            1,
            1.0,
            0,
            SinkhornParams::default()
        )
        .is_err());
        assert!(SweepConfig::new(
            vec![Solver::Modified],
            Case::Independent,
            vec![5, 5],
            1,
            1.0,
            0,
            SinkhornParams::default()
        )
        .is_err());
        assert!(SweepConfig::new(
            vec![Solver::Modified],
            Case::Independent,
            vec![5],
            0,
            1.0,
            0,
            SinkhornParams::default()
        )
        .is_err());
    }
}
