//! Exact semi-assignment solver: a capacity-aware Hungarian method that
//! searches for a perfect pseudo-matching on equality graphs.
//!
//! The search tree is rooted at a free column. `S` holds the columns of the
//! tree, `T` the rows. For every row outside `T` we track
//! `slack[i] = min_{j in S} (l(i) + l(j) - w[i][j])` together with the column
//! attaining it, so each dual adjustment and each tree extension costs O(m)
//! rather than O(mn). One outer loop grows the matching by exactly one edge,
//! giving O(m^2 n) overall.
//!
//! Operation counting: `op_count` increments once per weight read, per slack
//! comparison, per slack write and per label update, from labeling
//! initialization onward. The classic-Hungarian baseline runs this same core
//! (with unit capacities), so operation counts of the two solvers are
//! directly comparable.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{Labeling, PseudoMatching, SemiAssignProblem, SolveReport, WeightMatrix};

const UNSET: usize = usize::MAX;

/// Options for [`solve`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Equality-graph tolerance; defaults to `1e-9 * max(1, max |w|)`.
    pub tight_eps: Option<f64>,
    /// Disable to skip operation counting (the counter itself is cheap; this
    /// exists so reports can state that a count was intentionally omitted).
    pub count_ops: bool,
    /// Re-derive dual feasibility and matched-edge tightness from scratch
    /// after every label update. O(mn) per update; meant for tests.
    pub check_invariants: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tight_eps: None,
            count_ops: true,
            check_invariants: false,
        }
    }
}

/// Counter for the solver's elementary numeric operations.
#[derive(Debug, Clone)]
pub struct OpCounter {
    enabled: bool,
    count: u64,
}

impl OpCounter {
    pub fn new(enabled: bool) -> Self {
        Self { enabled, count: 0 }
    }

    #[inline]
    pub fn add(&mut self, k: u64) {
        if self.enabled {
            self.count += k;
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// Per-phase search tree: tree membership, tracked slacks and the parent
/// links used to reconstruct the augmenting path.
#[derive(Debug)]
pub struct SearchState {
    /// Columns currently in the tree (`S`).
    in_s: Vec<bool>,
    s_cols: Vec<usize>,
    /// Rows currently in the tree (`T`).
    in_t: Vec<bool>,
    t_rows: Vec<usize>,
    /// For each row outside `T`: min reduced cost against the columns of `S`.
    slack: Vec<f64>,
    /// Column attaining each tracked slack.
    slack_arg: Vec<usize>,
    /// For each row in the tree, the column whose tight edge reached it.
    prev_col: Vec<usize>,
    /// For each non-root column in `S`, the matched row it was reached from.
    prev_row: Vec<usize>,
}

impl SearchState {
    pub fn new(m: usize, n: usize) -> Self {
        Self {
            in_s: vec![false; n],
            s_cols: Vec::with_capacity(n),
            in_t: vec![false; m],
            t_rows: Vec::with_capacity(m),
            slack: vec![f64::INFINITY; m],
            slack_arg: vec![UNSET; m],
            prev_col: vec![UNSET; m],
            prev_row: vec![UNSET; n],
        }
    }

    fn reset(&mut self) {
        for &j in &self.s_cols {
            self.in_s[j] = false;
            self.prev_row[j] = UNSET;
        }
        self.s_cols.clear();
        for &i in &self.t_rows {
            self.in_t[i] = false;
        }
        self.t_rows.clear();
        for i in 0..self.slack.len() {
            self.slack[i] = f64::INFINITY;
            self.slack_arg[i] = UNSET;
            self.prev_col[i] = UNSET;
        }
    }

    pub fn tree_cols(&self) -> &[usize] {
        &self.s_cols
    }

    pub fn tree_rows(&self) -> &[usize] {
        &self.t_rows
    }
}

/// What one outer loop accomplished.
#[derive(Debug, Clone, Copy)]
pub struct AugmentOutcome {
    /// Free column the tree was rooted at.
    pub root_col: usize,
    /// Previously free row that became matched.
    pub augmented_row: usize,
    /// Number of dual adjustments performed in this loop.
    pub label_updates: usize,
    /// Number of columns the tree reached (including the root).
    pub tree_size: usize,
}

/// Initial feasible labeling: column labels zero, each row label the maximum
/// weight in its row.
pub fn init_labeling(weights: &WeightMatrix, tight_eps: f64, ops: &mut OpCounter) -> Labeling {
    let (m, n) = (weights.m(), weights.n());
    let mut row_labels = vec![0.0; m];
    for (i, label) in row_labels.iter_mut().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for j in 0..n {
            ops.add(2); // weight read + comparison
            best = best.max(weights.get(i, j));
        }
        *label = best;
    }
    Labeling::new(row_labels, vec![0.0; n], tight_eps)
}

/// Greedy starting matching inside the equality graph: rows in ascending
/// order take the lowest-index tight column that still has capacity.
pub fn greedy_init_matching(
    weights: &WeightMatrix,
    labeling: &Labeling,
    caps: &[usize],
    ops: &mut OpCounter,
) -> PseudoMatching {
    let (m, n) = (weights.m(), weights.n());
    let mut matching = PseudoMatching::empty(m, n);
    for i in 0..m {
        for (j, &cap) in caps.iter().enumerate() {
            ops.add(2); // weight read + tightness test
            if matching.col_usage()[j] < cap && labeling.is_tight(i, j, weights) {
                matching.assign(i, j);
                break;
            }
        }
    }
    matching
}

/// Runs one outer loop: roots a tree at the lowest-index free column, grows
/// it through dual adjustments and tight edges until a free row is reached,
/// then flips the pseudo-augmenting path. Grows the matching by exactly one
/// edge.
pub fn grow_and_augment(
    weights: &WeightMatrix,
    labeling: &mut Labeling,
    matching: &mut PseudoMatching,
    state: &mut SearchState,
    caps: &[usize],
    ops: &mut OpCounter,
    check_invariants: bool,
) -> Result<AugmentOutcome> {
    let (m, n) = (weights.m(), weights.n());
    let eps = labeling.tight_eps();

    let root = (0..n)
        .find(|&j| matching.col_usage()[j] < caps[j])
        .ok_or_else(|| Error::Stalled("no free column although the matching is imperfect".into()))?;

    state.reset();
    state.in_s[root] = true;
    state.s_cols.push(root);
    for i in 0..m {
        if matching.row_to_col()[i] == Some(root) {
            state.in_t[i] = true;
            state.t_rows.push(i);
        }
    }
    for i in 0..m {
        if !state.in_t[i] {
            ops.add(2); // weight read + slack write
            state.slack[i] = labeling.slack(i, root, weights);
            state.slack_arg[i] = root;
        }
    }

    let mut label_updates = 0usize;
    loop {
        // Scan the tracked slacks once: the minimum drives the dual update,
        // the lowest-index tight row drives the tree step.
        let mut alpha = f64::INFINITY;
        let mut tight_row = None;
        for i in 0..m {
            if state.in_t[i] {
                continue;
            }
            ops.add(1); // slack comparison
            let s = state.slack[i];
            if s < alpha {
                alpha = s;
            }
            if tight_row.is_none() && s <= eps {
                tight_row = Some(i);
            }
        }

        let v1 = match tight_row {
            Some(v1) => v1,
            None => {
                // Dual adjustment: lower S, raise T, shrink every tracked
                // slack by the same amount. At least one slack becomes ~0.
                if !alpha.is_finite() {
                    return Err(Error::Stalled(
                        "no finite dual adjustment available".into(),
                    ));
                }
                debug_assert!(alpha > eps);
                for &j in &state.s_cols {
                    ops.add(1);
                    labeling.col_labels[j] -= alpha;
                }
                for &i in &state.t_rows {
                    ops.add(1);
                    labeling.row_labels[i] += alpha;
                }
                let mut next = None;
                for i in 0..m {
                    if state.in_t[i] {
                        continue;
                    }
                    ops.add(1); // slack update
                    state.slack[i] -= alpha;
                    if next.is_none() && state.slack[i] <= eps {
                        next = Some(i);
                    }
                }
                label_updates += 1;
                if check_invariants {
                    assert_search_invariants(weights, labeling, matching, state);
                }
                next.ok_or_else(|| {
                    Error::Stalled("dual adjustment produced no tight edge".into())
                })?
            }
        };

        state.prev_col[v1] = state.slack_arg[v1];
        match matching.row_to_col()[v1] {
            None => {
                // Free row: flip the path root -> ... -> v1.
                augment_path(matching, state, v1, root);
                return Ok(AugmentOutcome {
                    root_col: root,
                    augmented_row: v1,
                    label_updates,
                    tree_size: state.s_cols.len(),
                });
            }
            Some(z) => {
                // Matched row: pull its column into the tree together with
                // every row currently matched to it.
                debug_assert!(!state.in_s[z]);
                state.in_s[z] = true;
                state.s_cols.push(z);
                state.prev_row[z] = v1;
                for i in 0..m {
                    if matching.row_to_col()[i] == Some(z) && !state.in_t[i] {
                        state.in_t[i] = true;
                        state.t_rows.push(i);
                    }
                }
                for i in 0..m {
                    if state.in_t[i] {
                        continue;
                    }
                    ops.add(2); // weight read + slack comparison
                    let s = labeling.slack(i, z, weights);
                    if s < state.slack[i] {
                        ops.add(1); // slack write
                        state.slack[i] = s;
                        state.slack_arg[i] = z;
                    }
                }
            }
        }
    }
}

/// Flips edge membership along the pseudo-augmenting path ending at the free
/// row `v1`, walking parent links back to the root column.
fn augment_path(matching: &mut PseudoMatching, state: &SearchState, v1: usize, root: usize) {
    let mut row = v1;
    loop {
        let col = state.prev_col[row];
        debug_assert_ne!(col, UNSET);
        matching.assign(row, col);
        if col == root {
            break;
        }
        let prev = state.prev_row[col];
        debug_assert_ne!(prev, UNSET);
        matching.unassign(prev);
        row = prev;
    }
}

fn assert_search_invariants(
    weights: &WeightMatrix,
    labeling: &Labeling,
    matching: &PseudoMatching,
    state: &SearchState,
) {
    assert!(
        labeling.is_feasible(weights),
        "dual feasibility lost after a label update"
    );
    for (i, assigned) in matching.row_to_col().iter().enumerate() {
        if let Some(j) = assigned {
            assert!(
                labeling.slack(i, *j, weights).abs() <= labeling.tight_eps(),
                "matched edge ({}, {}) left the equality graph",
                i,
                j
            );
        }
    }
    for i in 0..weights.m() {
        if !state.in_t[i] {
            assert!(
                state.slack[i] >= -labeling.tight_eps(),
                "negative tracked slack at row {}",
                i
            );
        }
    }
}

/// Solves the semi-assignment instance exactly, returning the optimal
/// matching with its dual certificate.
pub fn solve(problem: &SemiAssignProblem, opts: &SolveOptions) -> Result<SolveReport> {
    if let Some(eps) = opts.tight_eps {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidOptions(format!(
                "tight_eps must be a finite nonnegative number, got {}",
                eps
            )));
        }
    }
    let weights = problem.to_max_weight();
    let start = Instant::now();
    let mut ops = OpCounter::new(opts.count_ops);
    let (matching, labeling) = solve_weights(
        &weights,
        problem.caps(),
        opts.tight_eps.unwrap_or_else(|| weights.default_tight_eps()),
        &mut ops,
        opts.check_invariants,
    )?;
    let objective = matching.total_cost(problem)?;
    Ok(SolveReport {
        scaled_objective: objective / problem.m() as f64,
        objective,
        matching,
        dual: Some(labeling),
        op_count: ops.count(),
        elapsed: start.elapsed(),
    })
}

/// Core search shared with the classic-Hungarian baseline: maximizes total
/// weight over perfect pseudo-matchings for the given capacities.
pub(crate) fn solve_weights(
    weights: &WeightMatrix,
    caps: &[usize],
    tight_eps: f64,
    ops: &mut OpCounter,
    check_invariants: bool,
) -> Result<(PseudoMatching, Labeling)> {
    let mut labeling = init_labeling(weights, tight_eps, ops);
    let mut matching = greedy_init_matching(weights, &labeling, caps, ops);
    let mut state = SearchState::new(weights.m(), weights.n());
    while !matching.is_perfect_unchecked(caps) {
        grow_and_augment(
            weights,
            &mut labeling,
            &mut matching,
            &mut state,
            caps,
            ops,
            check_invariants,
        )?;
    }
    Ok((matching, labeling))
}
