//! Exact solvers for the semi-assignment problem: assign each of `m` rows to
//! one of `n` columns so that column `j` receives exactly `m_j` rows, at
//! minimum total cost.
//!
//! The primary solver is a capacity-aware Hungarian method over
//! pseudo-matchings with O(m^2 n) complexity; [`baselines`] carries the
//! classic Hungarian algorithm on the column-duplicated square instance, a
//! log-domain Sinkhorn approximation and a brute-force oracle. [`builders`]
//! maps applications onto instances (the Wasserstein independence statistic,
//! integer-mass transport, one-to-many and many-to-many assignment), and
//! [`bench`] measures solver scaling on synthetic families.

pub mod baselines;
pub mod bench;
pub mod builders;
pub mod error;
pub mod graph;
pub mod io;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{
    verify_certificate, CertificateReport, Labeling, PseudoMatching, SemiAssignProblem,
    SolveReport, WeightMatrix,
};
pub use solver::{solve, SolveOptions};
