//! Shared helpers for the integration suites: seeded instance generators and
//! independent enumeration oracles. Everything here stays away from the
//! library's solver paths so oracle comparisons are meaningful.

#![allow(dead_code)]

use ndarray::Array2;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiassign::builders::GeneralOTSpec;
use semiassign::SemiAssignProblem;

pub struct TestRng(pub ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        low + (high - low) * u
    }

    /// Uniform integer in `[low, high]` inclusive.
    pub fn int(&mut self, low: usize, high: usize) -> usize {
        low + (self.0.next_u64() % (high - low + 1) as u64) as usize
    }
}

/// Random composition of `total` into `parts` positive integers.
pub fn random_composition(rng: &mut TestRng, total: usize, parts: usize) -> Vec<usize> {
    assert!(parts >= 1 && total >= parts);
    let mut caps = vec![1usize; parts];
    for _ in 0..total - parts {
        let k = rng.int(0, parts - 1);
        caps[k] += 1;
    }
    caps
}

pub fn random_cost(rng: &mut TestRng, m: usize, n: usize, low: f64, high: f64) -> Array2<f64> {
    Array2::from_shape_fn((m, n), |_| rng.uniform(low, high))
}

/// Random instance with `m` in `m_range`, `n` in `n_range` (clamped to `m`),
/// positive capacities summing to `m`, and i.i.d. Unif(low, high) costs.
pub fn random_problem(
    rng: &mut TestRng,
    m_range: (usize, usize),
    n_range: (usize, usize),
    cost_range: (f64, f64),
) -> SemiAssignProblem {
    let m = rng.int(m_range.0, m_range.1);
    let n = rng.int(n_range.0, n_range.1).min(m);
    let caps = random_composition(rng, m, n);
    let cost = random_cost(rng, m, n, cost_range.0, cost_range.1);
    SemiAssignProblem::new(cost, caps).expect("generated instance is valid")
}

/// Random integer-mass transport spec with total mass `total` split over a
/// random number of rows and `n` columns.
pub fn random_general_spec(rng: &mut TestRng, max_mass: usize, max_cols: usize) -> GeneralOTSpec {
    let n = rng.int(1, max_cols);
    let total = rng.int(n.max(2), max_mass);
    let rows = rng.int(1, total);
    let row_masses = random_composition(rng, total, rows);
    let col_masses = random_composition(rng, total, n);
    let cost = random_cost(rng, rows, n, -1.0, 1.0);
    GeneralOTSpec::new(cost, row_masses, col_masses).expect("generated spec is valid")
}

/// Minimum of `<X, C>` over nonnegative integer matrices with exact row sums
/// `row_masses` and column sums `col_masses`. Independent oracle for the
/// row-duplication route (vertices of the transportation polytope with
/// integer marginals are integral).
pub fn integer_plan_min_cost(
    cost: &Array2<f64>,
    row_masses: &[usize],
    col_masses: &[usize],
) -> f64 {
    let mut best = f64::INFINITY;
    let mut remaining: Vec<usize> = col_masses.to_vec();
    recurse_min(cost, row_masses, &mut remaining, 0, 0.0, &mut best);
    best
}

fn recurse_min(
    cost: &Array2<f64>,
    row_masses: &[usize],
    remaining: &mut [usize],
    row: usize,
    acc: f64,
    best: &mut f64,
) {
    if row == row_masses.len() {
        if acc < *best {
            *best = acc;
        }
        return;
    }
    let n = remaining.len();
    let mut counts = vec![0usize; n];
    fill_row_min(
        cost, row_masses, remaining, row, row_masses[row], 0, &mut counts, acc, best,
    );
}

#[allow(clippy::too_many_arguments)]
fn fill_row_min(
    cost: &Array2<f64>,
    row_masses: &[usize],
    remaining: &mut [usize],
    row: usize,
    left: usize,
    col: usize,
    counts: &mut [usize],
    acc: f64,
    best: &mut f64,
) {
    let n = remaining.len();
    if col == n {
        if left == 0 {
            recurse_min(cost, row_masses, remaining, row + 1, acc, best);
        }
        return;
    }
    let max_here = left.min(remaining[col]);
    for take in 0..=max_here {
        counts[col] = take;
        remaining[col] -= take;
        fill_row_min(
            cost,
            row_masses,
            remaining,
            row,
            left - take,
            col + 1,
            counts,
            acc + take as f64 * cost[(row, col)],
            best,
        );
        remaining[col] += take;
    }
    counts[col] = 0;
}

/// Maximum of `<X, P>` over nonnegative integer matrices with exact row sums
/// `row_sums` and column sums at most `col_caps`.
pub fn integer_plan_max_payoff(payoff: &Array2<f64>, row_sums: &[usize], col_caps: &[usize]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut remaining: Vec<usize> = col_caps.to_vec();
    recurse_max(payoff, row_sums, &mut remaining, 0, 0.0, &mut best);
    best
}

fn recurse_max(
    payoff: &Array2<f64>,
    row_sums: &[usize],
    remaining: &mut [usize],
    row: usize,
    acc: f64,
    best: &mut f64,
) {
    if row == row_sums.len() {
        if acc > *best {
            *best = acc;
        }
        return;
    }
    fill_row_max(payoff, row_sums, remaining, row, row_sums[row], 0, acc, best);
}

#[allow(clippy::too_many_arguments)]
fn fill_row_max(
    payoff: &Array2<f64>,
    row_sums: &[usize],
    remaining: &mut [usize],
    row: usize,
    left: usize,
    col: usize,
    acc: f64,
    best: &mut f64,
) {
    let n = remaining.len();
    if col == n {
        if left == 0 {
            recurse_max(payoff, row_sums, remaining, row + 1, acc, best);
        }
        return;
    }
    let max_here = left.min(remaining[col]);
    for take in 0..=max_here {
        remaining[col] -= take;
        fill_row_max(
            payoff,
            row_sums,
            remaining,
            row,
            left - take,
            col + 1,
            acc + take as f64 * payoff[(row, col)],
            best,
        );
        remaining[col] += take;
    }
}

/// Maximum total payoff over all ways to give role `j` exactly `roles[j]`
/// distinct players, each player filling at most one role. Players left over
/// stay unselected.
pub fn best_role_selection(payoff: &Array2<f64>, roles: &[usize]) -> f64 {
    let players = payoff.nrows();
    let slots: usize = roles.iter().sum();
    assert!(players >= slots);
    let mut remaining: Vec<usize> = roles.to_vec();
    let mut best = f64::NEG_INFINITY;
    select_players(payoff, &mut remaining, 0, slots, 0.0, &mut best);
    best
}

fn select_players(
    payoff: &Array2<f64>,
    remaining: &mut [usize],
    player: usize,
    slots_left: usize,
    acc: f64,
    best: &mut f64,
) {
    let players = payoff.nrows();
    if players - player < slots_left {
        return; // not enough players left to fill the remaining slots
    }
    if player == players {
        if acc > *best {
            *best = acc;
        }
        return;
    }
    // leave this player unselected
    select_players(payoff, remaining, player + 1, slots_left, acc, best);
    for j in 0..remaining.len() {
        if remaining[j] == 0 {
            continue;
        }
        remaining[j] -= 1;
        select_players(
            payoff,
            remaining,
            player + 1,
            slots_left - 1,
            acc + payoff[(player, j)],
            best,
        );
        remaining[j] += 1;
    }
}
