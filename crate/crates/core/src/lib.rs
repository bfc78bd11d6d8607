//! Exact, deterministic simulation of Grover search on an n-qubit
//! register subject to probabilistic local unitary noise whose
//! occurrence may carry Markovian time-correlation.
//!
//! The crate provides:
//!
//! - an exact register representation ([`state`]) with low-rank
//!   application of the Grover operator ([`grover`]),
//! - the single-qubit noise model, its register-wide action, and the
//!   analytic classification of noise unitaries whose success
//!   probability is invariant in the number of noisy sites ([`noise`]),
//! - evolution under the correlated noise process, together with a
//!   brute-force trajectory oracle, a perfect-memory closed form, and a
//!   reduced three-dimensional simulator for bit-flip noise
//!   ([`markov`], [`trajectories`], [`closed_form`], [`reduced`]),
//! - trace post-processing: first-maximum detection, the
//!   quantum-vs-classical performance gate, and parameter-regime scans
//!   ([`analysis`], [`figures`]),
//! - self-verification suites callable from the CLI ([`verify`]).
//!
//! All production paths are deterministic: identical inputs produce
//! bit-identical outputs. Randomness appears only in seeded test
//! generators.

pub mod analysis;
pub mod closed_form;
pub mod dense;
pub mod error;
pub mod exact_sum;
pub mod figures;
pub mod grover;
pub mod markov;
pub mod noise;
pub mod reduced;
pub mod state;
pub mod trace;
pub mod trajectories;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Largest register for statevector operations.
pub const MAX_QUBITS_STATEVECTOR: usize = 24;

/// Largest register for density-matrix evolution (one matrix at n=12
/// already holds 2^24 complex entries).
pub const MAX_QUBITS_DENSITY: usize = 12;

/// Default number of iterations to simulate: three times the noiseless
/// first-maximum time, enough to show a full oscillation under noise.
pub fn default_t_max(n: usize) -> usize {
    let dim = (1usize << n) as f64;
    let quarter_period = (std::f64::consts::FRAC_PI_4 * dim.sqrt()).floor() as usize;
    (3 * quarter_period).max(3)
}
