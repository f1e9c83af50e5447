//! Problem instances, pseudo-matchings, dual labelings and optimality
//! certificates shared by every solver in this crate.
//!
//! A semi-assignment instance asks for each of `m` rows to be assigned to
//! exactly one of `n` columns while column `j` receives exactly `caps[j]`
//! rows. The solvers work on the max-weight form produced by
//! [`SemiAssignProblem::to_max_weight`], and their output carries a dual
//! labeling that certifies optimality via [`verify_certificate`].

use std::time::Duration;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Dense instance of the semi-assignment problem: an `m x n` cost matrix
/// together with positive column capacities summing to `m`.
#[derive(Debug, Clone)]
pub struct SemiAssignProblem {
    cost: Array2<f64>,
    caps: Vec<usize>,
}

impl SemiAssignProblem {
    /// Validates and builds an instance.
    ///
    /// Rejects empty matrices, capacity lists of the wrong length, capacities
    /// that are zero or do not sum to the row count, and non-finite costs.
    pub fn new(cost: Array2<f64>, caps: Vec<usize>) -> Result<Self> {
        let (m, n) = cost.dim();
        if m == 0 || n == 0 {
            return Err(Error::EmptyProblem);
        }
        if caps.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} capacities for {} columns",
                caps.len(),
                n
            )));
        }
        if n > m {
            return Err(Error::DimensionMismatch(format!(
                "more columns ({}) than rows ({})",
                n, m
            )));
        }
        if caps.contains(&0) || caps.iter().sum::<usize>() != m {
            return Err(Error::CapacityMismatch {
                caps_total: caps.iter().sum(),
                rows: m,
            });
        }
        for ((i, j), &c) in cost.indexed_iter() {
            if !c.is_finite() {
                return Err(Error::InvalidEntry { row: i, col: j });
            }
        }
        Ok(Self { cost, caps })
    }

    pub fn m(&self) -> usize {
        self.cost.nrows()
    }

    pub fn n(&self) -> usize {
        self.cost.ncols()
    }

    pub fn cost(&self) -> &Array2<f64> {
        &self.cost
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    /// Converts the min-cost instance into the equivalent max-weight form:
    /// `w[i][j] = max(C) - C[i][j]`, all entries nonnegative.
    ///
    /// The recorded offset converts objectives back exactly:
    /// `min cost = m * offset - max weight`.
    pub fn to_max_weight(&self) -> WeightMatrix {
        let offset = self.cost.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w = self.cost.mapv(|c| offset - c);
        WeightMatrix { w, offset }
    }

    /// Returns a copy with every cost shifted by the constant `delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        Self::new(self.cost.mapv(|c| c + delta), self.caps.clone())
    }
}

/// Nonnegative weight matrix obtained by subtracting every cost from the
/// global maximum.
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    pub(crate) w: Array2<f64>,
    pub(crate) offset: f64,
}

impl WeightMatrix {
    pub fn m(&self) -> usize {
        self.w.nrows()
    }

    pub fn n(&self) -> usize {
        self.w.ncols()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.w[(row, col)]
    }

    /// Default tolerance for equality-graph membership: costs are real-valued,
    /// so tightness is only meaningful up to floating-point noise at the
    /// weight scale.
    pub fn default_tight_eps(&self) -> f64 {
        let max_abs = self.w.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        1e-9 * max_abs.max(1.0)
    }
}

/// Partial assignment of rows to columns with per-column usage counts.
///
/// Every row meets at most one column; column `j` may be used up to `caps[j]`
/// times with respect to the owning problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoMatching {
    pub(crate) row_to_col: Vec<Option<usize>>,
    pub(crate) col_usage: Vec<usize>,
}

impl PseudoMatching {
    pub fn empty(m: usize, n: usize) -> Self {
        Self {
            row_to_col: vec![None; m],
            col_usage: vec![0; n],
        }
    }

    /// Builds a matching from an explicit row assignment, recomputing usage
    /// counts. Column indices must be in range; capacity violations are
    /// representable (they simply make the matching imperfect/infeasible).
    pub fn from_assignment(row_to_col: Vec<Option<usize>>, n: usize) -> Result<Self> {
        let mut col_usage = vec![0usize; n];
        for (i, assigned) in row_to_col.iter().enumerate() {
            if let Some(j) = assigned {
                if *j >= n {
                    return Err(Error::DimensionMismatch(format!(
                        "row {} assigned to column {} of {}",
                        i, j, n
                    )));
                }
                col_usage[*j] += 1;
            }
        }
        Ok(Self {
            row_to_col,
            col_usage,
        })
    }

    pub fn m(&self) -> usize {
        self.row_to_col.len()
    }

    pub fn n(&self) -> usize {
        self.col_usage.len()
    }

    pub fn row_to_col(&self) -> &[Option<usize>] {
        &self.row_to_col
    }

    pub fn col_usage(&self) -> &[usize] {
        &self.col_usage
    }

    pub fn assigned_count(&self) -> usize {
        self.row_to_col.iter().filter(|c| c.is_some()).count()
    }

    pub(crate) fn assign(&mut self, row: usize, col: usize) {
        debug_assert!(self.row_to_col[row].is_none());
        self.row_to_col[row] = Some(col);
        self.col_usage[col] += 1;
    }

    pub(crate) fn unassign(&mut self, row: usize) {
        if let Some(col) = self.row_to_col[row].take() {
            self.col_usage[col] -= 1;
        }
    }

    pub(crate) fn is_perfect_unchecked(&self, caps: &[usize]) -> bool {
        self.row_to_col.iter().all(|c| c.is_some()) && self.col_usage == caps
    }

    /// True iff every row is assigned and every column is used to exactly its
    /// capacity.
    pub fn is_perfect(&self, problem: &SemiAssignProblem) -> Result<bool> {
        if self.m() != problem.m() || self.n() != problem.n() {
            return Err(Error::DimensionMismatch(format!(
                "matching is {}x{} but problem is {}x{}",
                self.m(),
                self.n(),
                problem.m(),
                problem.n()
            )));
        }
        Ok(self.is_perfect_unchecked(problem.caps()))
    }

    /// Unscaled cost of a perfect matching: the sum of the chosen cost
    /// entries.
    pub fn total_cost(&self, problem: &SemiAssignProblem) -> Result<f64> {
        if !self.is_perfect(problem)? {
            return Err(Error::NotPerfect);
        }
        Ok(self
            .row_to_col
            .iter()
            .enumerate()
            .map(|(i, j)| problem.cost()[(i, j.expect("perfect"))])
            .sum())
    }

    /// Total weight of the matched edges under `weights` (partial matchings
    /// allowed).
    pub fn total_weight(&self, weights: &WeightMatrix) -> f64 {
        self.row_to_col
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| weights.get(i, j)))
            .sum()
    }
}

/// Dual potentials on both node sets with a tightness tolerance.
///
/// Feasible when `row_labels[i] + col_labels[j] >= w[i][j] - tight_eps` for
/// every edge; the tight edges form the equality graph the solvers search.
#[derive(Debug, Clone)]
pub struct Labeling {
    pub(crate) row_labels: Vec<f64>,
    pub(crate) col_labels: Vec<f64>,
    pub(crate) tight_eps: f64,
}

impl Labeling {
    pub fn new(row_labels: Vec<f64>, col_labels: Vec<f64>, tight_eps: f64) -> Self {
        Self {
            row_labels,
            col_labels,
            tight_eps,
        }
    }

    pub fn row_labels(&self) -> &[f64] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[f64] {
        &self.col_labels
    }

    pub fn tight_eps(&self) -> f64 {
        self.tight_eps
    }

    /// Reduced cost of the edge `(row, col)`; nonnegative (up to the
    /// tolerance) under a feasible labeling, and ~0 on tight edges.
    #[inline]
    pub fn slack(&self, row: usize, col: usize, weights: &WeightMatrix) -> f64 {
        self.row_labels[row] + self.col_labels[col] - weights.get(row, col)
    }

    #[inline]
    pub fn is_tight(&self, row: usize, col: usize, weights: &WeightMatrix) -> bool {
        self.slack(row, col, weights) <= self.tight_eps
    }

    pub fn is_feasible(&self, weights: &WeightMatrix) -> bool {
        (0..weights.m())
            .all(|i| (0..weights.n()).all(|j| self.slack(i, j, weights) >= -self.tight_eps))
    }

    /// Rows joined to `col` by a tight edge (the equality-graph neighborhood
    /// of a single column).
    pub fn tight_rows(&self, col: usize, weights: &WeightMatrix) -> Vec<usize> {
        (0..weights.m())
            .filter(|&i| self.is_tight(i, col, weights))
            .collect()
    }

    /// Union of [`Labeling::tight_rows`] over a set of columns, deduplicated
    /// and sorted.
    pub fn tight_neighborhood(&self, cols: &[usize], weights: &WeightMatrix) -> Vec<usize> {
        let mut seen = vec![false; weights.m()];
        for &j in cols {
            for (i, hit) in seen.iter_mut().enumerate() {
                if !*hit && self.is_tight(i, j, weights) {
                    *hit = true;
                }
            }
        }
        (0..weights.m()).filter(|&i| seen[i]).collect()
    }
}

/// Outcome of checking a (labeling, matching) pair for optimality.
#[derive(Debug, Clone, Copy)]
pub struct CertificateReport {
    /// `l(i) + l(j) >= w[i][j] - tight_eps` on every edge.
    pub dual_feasible: bool,
    /// Every matched edge is tight within the tolerance.
    pub complementary_slack: bool,
    /// `|sum_i l(v1_i) + sum_j caps[j] * l(v2_j) - w(PM)|`.
    pub duality_gap: f64,
}

impl CertificateReport {
    pub fn holds(&self) -> bool {
        self.dual_feasible && self.complementary_slack
    }
}

/// Checks the optimality certificate for a perfect pseudo-matching: dual
/// feasibility, complementary slackness on matched edges, and the label-sum
/// identity. When both boolean conditions hold the gap is at most
/// `m * tight_eps`.
pub fn verify_certificate(
    labeling: &Labeling,
    matching: &PseudoMatching,
    weights: &WeightMatrix,
    caps: &[usize],
) -> Result<CertificateReport> {
    let (m, n) = (weights.m(), weights.n());
    if matching.m() != m || matching.n() != n || caps.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "certificate inputs disagree: matching {}x{}, weights {}x{}, {} capacities",
            matching.m(),
            matching.n(),
            m,
            n,
            caps.len()
        )));
    }
    if !matching.is_perfect_unchecked(caps) {
        return Err(Error::NotPerfect);
    }

    let eps = labeling.tight_eps;
    let dual_feasible = labeling.is_feasible(weights);
    let complementary_slack = matching
        .row_to_col
        .iter()
        .enumerate()
        .all(|(i, j)| labeling.slack(i, j.expect("perfect"), weights).abs() <= eps);

    let label_sum: f64 = labeling.row_labels.iter().sum::<f64>()
        + labeling
            .col_labels
            .iter()
            .zip(caps)
            .map(|(&l, &c)| l * c as f64)
            .sum::<f64>();
    let duality_gap = (label_sum - matching.total_weight(weights)).abs();

    Ok(CertificateReport {
        dual_feasible,
        complementary_slack,
        duality_gap,
    })
}

/// Result of an exact solve: the optimal matching, both objective scales, the
/// dual certificate (when the solver produces one) and effort counters.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Perfect pseudo-matching attaining the optimum.
    pub matching: PseudoMatching,
    /// Unscaled objective `sum_i C[i][sigma(i)]`.
    pub objective: f64,
    /// `objective / m`, the probability-scale value.
    pub scaled_objective: f64,
    /// Dual labeling certifying optimality; enumeration-based solvers do not
    /// produce one.
    pub dual: Option<Labeling>,
    /// Count of elementary numeric operations (weight reads, slack
    /// comparisons/updates, label updates) performed by the solver.
    pub op_count: u64,
    pub elapsed: Duration,
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    pub(crate) fn fixture() -> SemiAssignProblem {
        SemiAssignProblem::new(
            array![[1.0, 2.0], [3.0, 0.0], [2.0, 2.0], [0.0, 5.0]],
            vec![2, 2],
        )
        .unwrap()
    }

    #[test]
    fn accepts_figure_configuration() {
        let cost = Array2::zeros((9, 3));
        let p = SemiAssignProblem::new(cost, vec![2, 3, 4]).unwrap();
        assert_eq!(p.m(), 9);
        assert_eq!(p.n(), 3);
    }

    #[test]
    fn rejects_capacity_mismatch() {
        let cost = array![[0.0, 1.0], [1.0, 0.0]];
        match SemiAssignProblem::new(cost, vec![1, 2]) {
            Err(Error::CapacityMismatch { caps_total, rows }) => {
                assert_eq!((caps_total, rows), (3, 2));
            }
            other => panic!("expected CapacityMismatch, got {:?}", other),
        }
    }

    #[test]
    fn rejects_bad_entries_and_shapes() {
        assert!(matches!(
            SemiAssignProblem::new(Array2::zeros((0, 0)), vec![]),
            Err(Error::EmptyProblem)
        ));
        assert!(matches!(
            SemiAssignProblem::new(array![[f64::NAN]], vec![1]),
            Err(Error::InvalidEntry { row: 0, col: 0 })
        ));
        assert!(matches!(
            SemiAssignProblem::new(array![[1.0, f64::INFINITY]], vec![1, 1]),
            Err(Error::DimensionMismatch(_)) | Err(Error::CapacityMismatch { .. })
        ));
        // zero capacity
        assert!(matches!(
            SemiAssignProblem::new(array![[1.0], [2.0]], vec![0]),
            Err(Error::CapacityMismatch { .. })
        ));
    }

    #[test]
    fn fixture_is_valid() {
        let p = fixture();
        assert_eq!((p.m(), p.n()), (4, 2));
    }

    #[test]
    fn max_weight_transform() {
        let p = SemiAssignProblem::new(array![[3.0, 1.0], [2.0, 4.0]], vec![1, 1]).unwrap();
        let w = p.to_max_weight();
        assert_eq!(w.offset(), 4.0);
        assert_eq!(w.weights(), &array![[1.0, 3.0], [2.0, 0.0]]);

        let zeros = SemiAssignProblem::new(Array2::zeros((2, 2)), vec![1, 1]).unwrap();
        let wz = zeros.to_max_weight();
        assert_eq!(wz.offset(), 0.0);
        assert!(wz.weights().iter().all(|&v| v == 0.0));

        let wf = fixture().to_max_weight();
        assert_eq!(wf.offset(), 5.0);
        assert_eq!(
            wf.weights(),
            &array![[4.0, 3.0], [2.0, 5.0], [3.0, 3.0], [5.0, 0.0]]
        );
    }

    #[test]
    fn perfect_matching_checks() {
        let p = SemiAssignProblem::new(Array2::zeros((9, 3)), vec![2, 3, 4]).unwrap();
        let assignment: Vec<Option<usize>> = [0, 0, 1, 1, 1, 2, 2, 2, 2]
            .iter()
            .map(|&j| Some(j))
            .collect();
        let pm = PseudoMatching::from_assignment(assignment, 3).unwrap();
        assert!(pm.is_perfect(&p).unwrap());
        assert_eq!(pm.col_usage(), &[2, 3, 4]);

        let empty = PseudoMatching::empty(9, 3);
        assert!(!empty.is_perfect(&p).unwrap());

        // usage (3,2,4) against caps (2,3,4)
        let assignment: Vec<Option<usize>> = [0, 0, 0, 1, 1, 2, 2, 2, 2]
            .iter()
            .map(|&j| Some(j))
            .collect();
        let over = PseudoMatching::from_assignment(assignment, 3).unwrap();
        assert!(!over.is_perfect(&p).unwrap());

        let wrong_shape = PseudoMatching::empty(4, 2);
        assert!(wrong_shape.is_perfect(&p).is_err());
    }

    #[test]
    fn matching_cost_examples() {
        let diag = SemiAssignProblem::new(array![[0.0, 1.0], [1.0, 0.0]], vec![1, 1]).unwrap();
        let pm = PseudoMatching::from_assignment(vec![Some(0), Some(1)], 2).unwrap();
        assert_eq!(pm.total_cost(&diag).unwrap(), 0.0);

        let pm = PseudoMatching::from_assignment(vec![Some(0), Some(1), Some(1), Some(0)], 2)
            .unwrap();
        assert_eq!(pm.total_cost(&fixture()).unwrap(), 3.0);

        let single =
            SemiAssignProblem::new(array![[5.0], [2.0], [7.0]], vec![3]).unwrap();
        let pm = PseudoMatching::from_assignment(vec![Some(0); 3], 1).unwrap();
        assert_eq!(pm.total_cost(&single).unwrap(), 14.0);

        let not_perfect = PseudoMatching::empty(4, 2);
        assert!(matches!(
            not_perfect.total_cost(&fixture()),
            Err(Error::NotPerfect)
        ));
    }

    #[test]
    fn zero_weight_certificate_has_zero_gap() {
        let p = SemiAssignProblem::new(Array2::zeros((3, 2)), vec![2, 1]).unwrap();
        let w = p.to_max_weight();
        let pm =
            PseudoMatching::from_assignment(vec![Some(0), Some(0), Some(1)], 2).unwrap();
        let l = Labeling::new(vec![0.0; 3], vec![0.0; 2], 1e-9);
        let report = verify_certificate(&l, &pm, &w, p.caps()).unwrap();
        assert!(report.dual_feasible && report.complementary_slack);
        assert_eq!(report.duality_gap, 0.0);
    }

    #[test]
    fn core_types_transfer_between_threads() {
        fn assert_send<T: Send + 'static>() {}
        assert_send::<SemiAssignProblem>();
        assert_send::<WeightMatrix>();
        assert_send::<PseudoMatching>();
        assert_send::<Labeling>();
        assert_send::<SolveReport>();
    }

    #[test]
    fn certificate_requires_perfect_matching() {
        let p = fixture();
        let w = p.to_max_weight();
        let l = Labeling::new(vec![0.0; 4], vec![0.0; 2], 1e-9);
        let pm = PseudoMatching::empty(4, 2);
        assert!(matches!(
            verify_certificate(&l, &pm, &w, p.caps()),
            Err(Error::NotPerfect)
        ));
    }
}
