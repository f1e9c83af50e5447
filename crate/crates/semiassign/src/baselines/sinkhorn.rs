//! Entropic-regularized transport baseline. Runs in log-domain from the
//! first iteration: with a small regularizer against cost scales in the tens
//! the naive Gibbs kernel underflows, while log-sum-exp is unconditionally
//! stable.

use std::time::Instant;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::SemiAssignProblem;
use crate::solver::OpCounter;

/// Parameters for [`sinkhorn_solve`].
#[derive(Debug, Clone)]
pub struct SinkhornParams {
    /// Entropic regularization strength.
    pub reg: f64,
    /// Stopping threshold on the l1 violation of both marginals.
    pub accuracy: f64,
    pub max_iter: usize,
}

impl Default for SinkhornParams {
    fn default() -> Self {
        Self {
            reg: 0.1,
            accuracy: 1e-4,
            max_iter: 100_000,
        }
    }
}

/// Approximate transport result on the probability scale (row masses `1/m`,
/// column masses `caps[j]/m`).
#[derive(Debug, Clone)]
pub struct ApproxReport {
    /// Unrounded plan produced by the scaling iterations.
    pub plan: Array2<f64>,
    /// Cost of the rounded (exactly feasible) plan.
    pub objective: f64,
    pub iterations: usize,
    /// l1 violation of both marginals of the unrounded plan at termination.
    pub marginal_violation: f64,
    /// Plan projected onto the transport polytope; row and column sums match
    /// the marginals exactly up to floating-point roundoff.
    pub rounded_plan: Array2<f64>,
    /// False when `max_iter` was reached before hitting `accuracy`.
    pub converged: bool,
    pub op_count: u64,
    pub elapsed: std::time::Duration,
}

#[inline]
fn logsumexp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Solves the entropic relaxation by alternating log-domain scaling until the
/// marginal violation drops below `accuracy`, then projects the plan onto the
/// transport polytope with the rescale-then-residual correction.
///
/// A report is returned even when the iteration limit is hit; `converged`
/// records which case occurred.
pub fn sinkhorn_solve(problem: &SemiAssignProblem, params: &SinkhornParams) -> Result<ApproxReport> {
    if !params.reg.is_finite() || params.reg <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "regularization must be positive, got {}",
            params.reg
        )));
    }
    if !params.accuracy.is_finite() || params.accuracy <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "accuracy must be positive, got {}",
            params.accuracy
        )));
    }
    if params.max_iter == 0 {
        return Err(Error::InvalidParams("max_iter must be at least 1".into()));
    }

    let start = Instant::now();
    let (m, n) = (problem.m(), problem.n());
    let cost = problem.cost();
    let reg = params.reg;
    let mf = m as f64;

    let row_mass = 1.0 / mf;
    let col_mass: Vec<f64> = problem.caps().iter().map(|&c| c as f64 / mf).collect();
    let log_row_mass = row_mass.ln();
    let log_col_mass: Vec<f64> = col_mass.iter().map(|&a| a.ln()).collect();

    let mut f = Array1::<f64>::zeros(m);
    let mut g = Array1::<f64>::zeros(n);
    let mut ops = OpCounter::new(true);

    let mut iterations = 0;
    let mut violation = f64::INFINITY;
    let mut converged = false;
    while iterations < params.max_iter {
        // f_i <- reg * (log beta_i - LSE_j((g_j - C_ij)/reg)) enforces the
        // row marginals; the g update mirrors it for columns.
        for i in 0..m {
            ops.add(n as u64);
            let lse = logsumexp((0..n).map(|j| (g[j] - cost[(i, j)]) / reg));
            f[i] = reg * (log_row_mass - lse);
        }
        for j in 0..n {
            ops.add(m as u64);
            let lse = logsumexp((0..m).map(|i| (f[i] - cost[(i, j)]) / reg));
            g[j] = reg * (log_col_mass[j] - lse);
        }
        iterations += 1;

        ops.add((m * n) as u64);
        violation = marginal_violation(&f, &g, cost, reg, row_mass, &col_mass);
        if violation <= params.accuracy {
            converged = true;
            break;
        }
    }

    let mut plan = Array2::<f64>::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            plan[(i, j)] = ((f[i] + g[j] - cost[(i, j)]) / reg).exp();
        }
    }
    let rounded_plan = round_to_polytope(&plan, row_mass, &col_mass);
    let objective = rounded_plan
        .iter()
        .zip(cost.iter())
        .map(|(&p, &c)| p * c)
        .sum();

    Ok(ApproxReport {
        plan,
        objective,
        iterations,
        marginal_violation: violation,
        rounded_plan,
        converged,
        op_count: ops.count(),
        elapsed: start.elapsed(),
    })
}

fn marginal_violation(
    f: &Array1<f64>,
    g: &Array1<f64>,
    cost: &Array2<f64>,
    reg: f64,
    row_mass: f64,
    col_mass: &[f64],
) -> f64 {
    let (m, n) = cost.dim();
    let mut row_sums = vec![0.0; m];
    let mut col_sums = vec![0.0; n];
    for i in 0..m {
        for j in 0..n {
            let p = ((f[i] + g[j] - cost[(i, j)]) / reg).exp();
            row_sums[i] += p;
            col_sums[j] += p;
        }
    }
    let row_violation: f64 = row_sums.iter().map(|&r| (r - row_mass).abs()).sum();
    let col_violation: f64 = col_sums
        .iter()
        .zip(col_mass)
        .map(|(&c, &target)| (c - target).abs())
        .sum();
    row_violation + col_violation
}

/// Projects an almost-feasible plan onto the transport polytope: scale rows
/// down to their targets, then columns, then spread the remaining deficit as
/// a rank-one correction. The output marginals are exact.
fn round_to_polytope(plan: &Array2<f64>, row_mass: f64, col_mass: &[f64]) -> Array2<f64> {
    let (m, n) = plan.dim();
    let mut x = plan.clone();
    for i in 0..m {
        let sum: f64 = (0..n).map(|j| x[(i, j)]).sum();
        if sum > row_mass {
            let scale = row_mass / sum;
            for j in 0..n {
                x[(i, j)] *= scale;
            }
        }
    }
    for j in 0..n {
        let sum: f64 = (0..m).map(|i| x[(i, j)]).sum();
        if sum > col_mass[j] {
            let scale = col_mass[j] / sum;
            for i in 0..m {
                x[(i, j)] *= scale;
            }
        }
    }
    let row_err: Vec<f64> = (0..m)
        .map(|i| row_mass - (0..n).map(|j| x[(i, j)]).sum::<f64>())
        .collect();
    let col_err: Vec<f64> = (0..n)
        .map(|j| col_mass[j] - (0..m).map(|i| x[(i, j)]).sum::<f64>())
        .collect();
    let deficit: f64 = row_err.iter().sum();
    if deficit > 0.0 {
        for i in 0..m {
            for j in 0..n {
                x[(i, j)] += row_err[i] * col_err[j] / deficit;
            }
        }
    }
    x
}
