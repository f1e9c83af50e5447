//! Synthetic paired samples for the independence-test benchmarks.
//!
//! The generator is pinned so outputs stay byte-identical across releases:
//! a ChaCha8 stream keyed with `seed_from_u64`, uniforms taken as
//! `(next_u64() >> 11) * 2^-53`, and normals via the Box-Muller cosine
//! branch with the open-interval uniform `((next_u64() >> 11) + 0.5) * 2^-53`.
//! Each sample draws its 10 normal coordinates first, then its 25 uniform
//! coordinates, in both cases.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builders::SampleSet;

/// Relationship between the two sample coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// `y = X`, `z = Y` with X and Y drawn independently.
    Independent,
    /// `y = X`, `z = X_1 + Y_1` (coordinate-wise sum of the first five
    /// coordinates of each).
    Dependent,
}

impl Case {
    pub fn as_str(&self) -> &'static str {
        match self {
            Case::Independent => "independent",
            Case::Dependent => "dependent",
        }
    }
}

pub const X_DIM: usize = 10;
pub const Y_DIM: usize = 25;
pub const X_MEAN: f64 = 5.0;
pub const X_VAR: f64 = 30.0;
pub const Y_LOW: f64 = 10.0;
pub const Y_HIGH: f64 = 20.0;

#[inline]
fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits in [0, 1)
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn uniform01_open(rng: &mut ChaCha8Rng) -> f64 {
    // (0, 1): safe under a logarithm
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = uniform01_open(rng);
    let u2 = uniform01(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Draws `n` paired samples: `X ~ N(5*1_10, 30*I_10)` and `Y` with 25
/// independent Unif(10, 20) coordinates. The independent case pairs X with
/// Y; the dependent case pairs X with `Z = X_1 + Y_1` built from the first
/// five coordinates of each. Deterministic given the seed.
pub fn gen_synthetic(n: usize, seed: u64, case: Case) -> SampleSet {
    assert!(n >= 1, "at least one sample required");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = X_VAR.sqrt();
    let mut ys = Vec::with_capacity(n);
    let mut zs = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..X_DIM)
            .map(|_| X_MEAN + std * standard_normal(&mut rng))
            .collect();
        let y: Vec<f64> = (0..Y_DIM)
            .map(|_| Y_LOW + (Y_HIGH - Y_LOW) * uniform01(&mut rng))
            .collect();
        let z = match case {
            Case::Independent => y,
            Case::Dependent => (0..5).map(|k| x[k] + y[k]).collect(),
        };
        ys.push(x);
        zs.push(z);
    }
    SampleSet::new(ys, zs).expect("generated samples are well-formed")
}
