//! Exhaustive enumeration over every capacity-respecting assignment. Serves
//! as an independent optimality oracle for the other solvers on small
//! instances.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{PseudoMatching, SemiAssignProblem, SolveReport};

/// Enumeration guard: instances with more assignments than this are refused.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

/// Number of feasible assignments, `m! / (caps[0]! * ... * caps[n-1]!)`,
/// computed as a product of binomials. Exceeding `limit` aborts early.
pub fn feasible_assignment_count(m: usize, caps: &[usize], limit: u64) -> Option<u64> {
    let mut remaining = m as u64;
    let mut total: u64 = 1;
    for &cap in caps {
        let mut choose: u64 = 1;
        for k in 0..cap as u64 {
            choose = choose.checked_mul(remaining - k)? / (k + 1);
        }
        remaining -= cap as u64;
        total = total.checked_mul(choose)?;
        if total > limit {
            return None;
        }
    }
    Some(total)
}

/// Enumerates every assignment of rows to columns respecting the capacities
/// and returns the exact minimum. Ties resolve to the lexicographically
/// smallest row assignment, so oracle output is deterministic.
pub fn brute_force_solve(problem: &SemiAssignProblem) -> Result<SolveReport> {
    let count = feasible_assignment_count(problem.m(), problem.caps(), BRUTE_FORCE_LIMIT);
    if count.is_none() {
        return Err(Error::TooLarge {
            assignments: approx_count(problem.m(), problem.caps()),
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let start = Instant::now();
    let (m, n) = (problem.m(), problem.n());
    let mut search = Enumeration {
        cost: problem.cost(),
        remaining: problem.caps().to_vec(),
        current: vec![0; m],
        best_cost: f64::INFINITY,
        best: Vec::new(),
        ops: 0,
    };
    search.run(0, 0.0);
    let Enumeration { best, ops, .. } = search;

    let matching =
        PseudoMatching::from_assignment(best.into_iter().map(Some).collect(), n)?;
    let objective = matching.total_cost(problem)?;
    Ok(SolveReport {
        scaled_objective: objective / m as f64,
        objective,
        matching,
        dual: None,
        op_count: ops,
        elapsed: start.elapsed(),
    })
}

/// Depth-first search over rows, columns in ascending order: assignments are
/// visited in lexicographic order, so keeping strict improvements retains the
/// lexicographically smallest argmin.
struct Enumeration<'a> {
    cost: &'a ndarray::Array2<f64>,
    remaining: Vec<usize>,
    current: Vec<usize>,
    best_cost: f64,
    best: Vec<usize>,
    ops: u64,
}

impl Enumeration<'_> {
    fn run(&mut self, row: usize, acc: f64) {
        if row == self.cost.nrows() {
            if acc < self.best_cost {
                self.best_cost = acc;
                self.best.clear();
                self.best.extend_from_slice(&self.current);
            }
            return;
        }
        for j in 0..self.cost.ncols() {
            if self.remaining[j] == 0 {
                continue;
            }
            self.ops += 1;
            self.remaining[j] -= 1;
            self.current[row] = j;
            let cost = self.cost[(row, j)];
            self.run(row + 1, acc + cost);
            self.remaining[j] += 1;
        }
    }
}

fn approx_count(m: usize, caps: &[usize]) -> f64 {
    fn ln_factorial(k: usize) -> f64 {
        (2..=k).map(|v| (v as f64).ln()).sum()
    }
    let ln = ln_factorial(m) - caps.iter().map(|&c| ln_factorial(c)).sum::<f64>();
    ln.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn counts_partitions() {
        assert_eq!(feasible_assignment_count(4, &[2, 2], 1_000_000), Some(6));
        assert_eq!(feasible_assignment_count(9, &[2, 3, 4], 1_000_000), Some(1260));
        assert_eq!(
            feasible_assignment_count(4, &[1, 1, 1, 1], 1_000_000),
            Some(24)
        );
        assert_eq!(feasible_assignment_count(30, &[15, 15], 1_000_000), None);
    }

    #[test]
    fn single_column_is_the_column_sum() {
        let p = SemiAssignProblem::new(array![[5.0], [2.0], [7.0]], vec![3]).unwrap();
        let report = brute_force_solve(&p).unwrap();
        assert_eq!(report.objective, 14.0);
        assert_eq!(report.matching.row_to_col(), &[Some(0); 3]);
    }

    #[test]
    fn fixture_minimum_is_three() {
        let p = SemiAssignProblem::new(
            array![[1.0, 2.0], [3.0, 0.0], [2.0, 2.0], [0.0, 5.0]],
            vec![2, 2],
        )
        .unwrap();
        let report = brute_force_solve(&p).unwrap();
        assert_eq!(report.objective, 3.0);
        assert_eq!(
            report.matching.row_to_col(),
            &[Some(0), Some(1), Some(1), Some(0)]
        );
    }

    #[test]
    fn unit_caps_coincide_with_permutations() {
        let p = SemiAssignProblem::new(
            array![[4.0, 2.0, 8.0], [4.0, 3.0, 7.0], [3.0, 1.0, 6.0]],
            vec![1, 1, 1],
        )
        .unwrap();
        let report = brute_force_solve(&p).unwrap();
        // min over all 3! permutations: 2 + 4 + 6 = 12 (cols 1,0,2)
        assert_eq!(report.objective, 12.0);
    }

    #[test]
    fn refuses_oversized_instances() {
        let p =
            SemiAssignProblem::new(ndarray::Array2::zeros((40, 2)), vec![20, 20]).unwrap();
        assert!(matches!(
            brute_force_solve(&p),
            Err(Error::TooLarge { .. })
        ));
    }
}
