//! Classic Hungarian baseline: expand a capacitated instance into an
//! `m x m` assignment problem by duplicating each column to its capacity,
//! solve it with the Kuhn-Munkres search, and map the permutation back.
//!
//! The square solve runs the same slack-tracked core as the capacity-aware
//! solver (with unit capacities it *is* the classic algorithm), so the two
//! produce directly comparable operation counts.

use std::time::Instant;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::{Labeling, PseudoMatching, SemiAssignProblem, SolveReport, WeightMatrix};
use crate::solver::{solve_weights, OpCounter, SolveOptions};

/// Square assignment instance produced by column duplication, with the map
/// from duplicated columns back to their source column.
#[derive(Debug, Clone)]
pub struct SquareAssignInstance {
    cost: Array2<f64>,
    col_origin: Vec<usize>,
    n_source: usize,
}

impl SquareAssignInstance {
    pub fn size(&self) -> usize {
        self.cost.nrows()
    }

    pub fn cost(&self) -> &Array2<f64> {
        &self.cost
    }

    pub fn col_origin(&self) -> &[usize] {
        &self.col_origin
    }

    /// Capacities of the source instance, recovered from the origin map.
    pub fn source_caps(&self) -> Vec<usize> {
        let mut caps = vec![0usize; self.n_source];
        for &j in &self.col_origin {
            caps[j] += 1;
        }
        caps
    }
}

/// Duplicates column `j` of the cost matrix `caps[j]` times, producing an
/// `m x m` instance whose optimal assignment cost equals the semi-assignment
/// optimum exactly.
pub fn duplicate_columns(problem: &SemiAssignProblem) -> SquareAssignInstance {
    let m = problem.m();
    let mut cost = Array2::zeros((m, m));
    let mut col_origin = Vec::with_capacity(m);
    for (j, &cap) in problem.caps().iter().enumerate() {
        for _ in 0..cap {
            col_origin.push(j);
        }
    }
    for i in 0..m {
        for (t, &j) in col_origin.iter().enumerate() {
            cost[(i, t)] = problem.cost()[(i, j)];
        }
    }
    SquareAssignInstance {
        cost,
        col_origin,
        n_source: problem.n(),
    }
}

/// Solves the square instance exactly with the classic Hungarian method and
/// maps the permutation (and its dual certificate) back through
/// `col_origin`.
pub fn hungarian_solve(square: &SquareAssignInstance) -> Result<SolveReport> {
    hungarian_solve_with(square, &SolveOptions::default())
}

pub fn hungarian_solve_with(
    square: &SquareAssignInstance,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    if let Some(eps) = opts.tight_eps {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidOptions(format!(
                "tight_eps must be a finite nonnegative number, got {}",
                eps
            )));
        }
    }
    let m = square.size();
    let offset = square.cost.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights = WeightMatrix {
        w: square.cost.mapv(|c| offset - c),
        offset,
    };
    let eps = opts
        .tight_eps
        .unwrap_or_else(|| weights.default_tight_eps());

    let start = Instant::now();
    let mut ops = OpCounter::new(opts.count_ops);
    let unit_caps = vec![1usize; m];
    let (permutation, labels) =
        solve_weights(&weights, &unit_caps, eps, &mut ops, opts.check_invariants)?;

    let objective: f64 = permutation
        .row_to_col()
        .iter()
        .enumerate()
        .map(|(i, t)| square.cost[(i, t.expect("perfect"))])
        .sum();

    // Map the permutation back to the source columns.
    let n = square.n_source;
    let assignment: Vec<Option<usize>> = permutation
        .row_to_col()
        .iter()
        .map(|t| t.map(|t| square.col_origin[t]))
        .collect();
    let matching = PseudoMatching::from_assignment(assignment, n)?;

    // Duplicate columns are identical, so at optimality their labels agree up
    // to the tolerance; the minimum is a feasible label for the source column
    // and stays tight on matched edges within a small multiple of eps.
    let mut col_labels = vec![f64::INFINITY; n];
    for (t, &j) in square.col_origin.iter().enumerate() {
        col_labels[j] = col_labels[j].min(labels.col_labels()[t]);
    }
    let dual = Labeling::new(labels.row_labels().to_vec(), col_labels, 4.0 * eps);

    Ok(SolveReport {
        scaled_objective: objective / m as f64,
        objective,
        matching,
        dual: Some(dual),
        op_count: ops.count(),
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::brute_force_solve;
    use crate::graph::verify_certificate;
    use ndarray::array;

    fn fixture() -> SemiAssignProblem {
        SemiAssignProblem::new(
            array![[1.0, 2.0], [3.0, 0.0], [2.0, 2.0], [0.0, 5.0]],
            vec![2, 2],
        )
        .unwrap()
    }

    #[test]
    fn duplication_widths_follow_caps() {
        let p = SemiAssignProblem::new(Array2::zeros((9, 3)), vec![2, 3, 4]).unwrap();
        let sq = duplicate_columns(&p);
        assert_eq!(sq.size(), 9);
        assert_eq!(sq.col_origin(), &[0, 0, 1, 1, 1, 2, 2, 2, 2]);
        assert_eq!(sq.source_caps(), vec![2, 3, 4]);
    }

    #[test]
    fn unit_caps_duplication_is_identity() {
        let p = SemiAssignProblem::new(array![[1.0, 2.0], [3.0, 4.0]], vec![1, 1]).unwrap();
        let sq = duplicate_columns(&p);
        assert_eq!(sq.cost(), p.cost());
        assert_eq!(sq.col_origin(), &[0, 1]);
    }

    #[test]
    fn classic_two_by_two() {
        let p = SemiAssignProblem::new(array![[1.0, 2.0], [2.0, 1.0]], vec![1, 1]).unwrap();
        let report = hungarian_solve(&duplicate_columns(&p)).unwrap();
        assert_eq!(report.objective, 2.0);
    }

    #[test]
    fn duplicated_fixture_matches_brute_force() {
        let p = fixture();
        let report = hungarian_solve(&duplicate_columns(&p)).unwrap();
        let oracle = brute_force_solve(&p).unwrap();
        assert_eq!(report.objective, oracle.objective);
        assert_eq!(report.objective, 3.0);

        let cert = verify_certificate(
            report.dual.as_ref().unwrap(),
            &report.matching,
            &p.to_max_weight(),
            p.caps(),
        )
        .unwrap();
        assert!(cert.holds());
    }
}
