use thiserror::Error;

/// Errors produced by problem construction, solvers, builders and the
/// benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity mismatch: capacities sum to {caps_total} but the problem has {rows} rows")]
    CapacityMismatch { caps_total: usize, rows: usize },

    #[error("invalid cost entry at ({row}, {col}): entries must be finite")]
    InvalidEntry { row: usize, col: usize },

    #[error("empty problem: the cost matrix must have at least one row and one column")]
    EmptyProblem,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matching is not perfect")]
    NotPerfect,

    #[error("solver stalled: {0}")]
    Stalled(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("instance too large for exhaustive enumeration: {assignments} assignments exceed the limit of {limit}")]
    TooLarge { assignments: f64, limit: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid norm order {0}: p must be >= 1")]
    InvalidP(f64),

    #[error("sample set is empty")]
    EmptySamples,

    #[error("mass mismatch: row masses sum to {row_total} but column masses sum to {col_total}")]
    MassMismatch { row_total: usize, col_total: usize },

    #[error("duplication map mismatch: {0}")]
    MapMismatch(String),

    #[error("too few players: {players} players cannot fill {slots} role slots")]
    TooFewPlayers { players: usize, slots: usize },

    #[error("negative payoff at ({row}, {col}): payoffs must be nonnegative")]
    NegativePayoff { row: usize, col: usize },

    #[error("infeasible assignment: tasks require {required} agent slots but only {available} are available")]
    Infeasible { required: usize, available: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(
        "exact solvers disagree at n={n}, trial={trial}: {solver_a}={objective_a} vs {solver_b}={objective_b}"
    )]
    SolverDisagreement {
        n: usize,
        trial: usize,
        solver_a: &'static str,
        solver_b: &'static str,
        objective_a: f64,
        objective_b: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
