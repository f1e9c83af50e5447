//! Reference solvers used to cross-check and benchmark the capacity-aware
//! solver: the classic Hungarian algorithm on the column-duplicated square
//! instance, entropic Sinkhorn, and an exhaustive enumeration oracle for
//! small instances.

mod brute;
mod hungarian;
mod sinkhorn;

pub use brute::{brute_force_solve, feasible_assignment_count, BRUTE_FORCE_LIMIT};
pub use hungarian::{
    duplicate_columns, hungarian_solve, hungarian_solve_with, SquareAssignInstance,
};
pub use sinkhorn::{sinkhorn_solve, ApproxReport, SinkhornParams};
