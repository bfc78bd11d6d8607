//! Closed form for the perfect-memory bit-flip case.
//!
//! With perfect memory the walker freezes after the first step, so the
//! evolution is a two-term mixture: the noiseless series with weight
//! `1-p`, and the always-noisy series with weight `p`. For bit-flip
//! noise the always-noisy branch stays inside a three-dimensional real
//! subspace and admits the closed form
//!
//! `P'(t) = (tan(theta/2) sin(theta t) - cos(theta t))^2 / N`,
//! `theta = arccos(2/N)`,
//!
//! whose first maximum sits near `pi/theta - 1/2`.

use crate::error::{Error, Result};
use crate::grover::noiseless_success_probability;

/// Value of the perfect-memory closed form at one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfectMemoryValue {
    /// `P'(t)`: success probability of the always-noisy branch.
    pub noisy_branch: f64,
    /// `(1-p) P(t) + p P'(t)`: the full perfect-memory mixture.
    pub combined: f64,
    /// Continuous-time estimate of the noisy branch's first maximum,
    /// `pi/theta - 1/2` (about `3/2 + 8/(pi N)` for large N).
    pub first_max_estimate: f64,
}

/// Evaluate the closed form for an `n`-qubit register (`N = 2^n`,
/// `n >= 2`) at noise probability `p` and iteration count `t`.
pub fn perfect_memory_closed_form(n: usize, p: f64, t: usize) -> Result<PerfectMemoryValue> {
    if n < 2 || n > crate::MAX_QUBITS_STATEVECTOR {
        return Err(Error::Size {
            n,
            min: 2,
            max: crate::MAX_QUBITS_STATEVECTOR,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            what: "noise probability p",
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let dim = (1u64 << n) as f64;
    let theta = (2.0 / dim).acos();
    let tt = theta * t as f64;
    // (tan(theta/2) sin(theta t) - cos(theta t))^2 / N, written in the
    // form that stays finite where cos(theta t) vanishes.
    let amp = (theta / 2.0).tan() * tt.sin() - tt.cos();
    let noisy_branch = amp * amp / dim;
    let combined = (1.0 - p) * noiseless_success_probability(n, t) + p * noisy_branch;
    Ok(PerfectMemoryValue {
        noisy_branch,
        combined,
        first_max_estimate: std::f64::consts::PI / theta - 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_after_one_step_on_two_qubits() {
        // N=4: theta = pi/3 and the noisy branch misses the marked state
        // entirely at t=1.
        let v = perfect_memory_closed_form(2, 0.5, 1).unwrap();
        assert!(v.noisy_branch.abs() <= 1e-15);
        assert!((v.combined - 0.5).abs() <= 1e-12); // (1-p) * 1 + p * 0
    }

    #[test]
    fn first_max_estimate_approaches_large_n_expansion() {
        for n in [4usize, 6, 8, 10] {
            let dim = (1u64 << n) as f64;
            let estimate = perfect_memory_closed_form(n, 0.0, 1)
                .unwrap()
                .first_max_estimate;
            let expansion = 1.5 + 8.0 / (std::f64::consts::PI * dim);
            assert!(
                (estimate - expansion).abs() < 40.0 / (dim * dim),
                "n={n}: {estimate} vs {expansion}"
            );
        }
    }

    #[test]
    fn first_max_estimate_matches_discrete_argmax() {
        for n in 2..=10usize {
            let estimate = perfect_memory_closed_form(n, 0.0, 1)
                .unwrap()
                .first_max_estimate;
            // Discrete first maximum of P'(t) over a generous window.
            let series: Vec<f64> = (0..=8)
                .map(|t| {
                    perfect_memory_closed_form(n, 0.0, t)
                        .unwrap()
                        .noisy_branch
                })
                .collect();
            let mut t_star = 1;
            for t in 1..series.len() - 1 {
                if series[t] >= series[t - 1] && series[t] >= series[t + 1] {
                    t_star = t;
                    break;
                }
            }
            assert!(
                (t_star as f64 - estimate).abs() <= 1.0,
                "n={n}: discrete {t_star} vs estimate {estimate}"
            );
        }
    }

    #[test]
    fn rejects_single_qubit_and_bad_probability() {
        assert!(perfect_memory_closed_form(1, 0.0, 1).is_err());
        assert!(perfect_memory_closed_form(4, 1.2, 1).is_err());
    }
}
