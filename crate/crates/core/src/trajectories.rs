//! Brute-force oracle: explicit enumeration of every walker path.
//!
//! The walker branch sequence `l_1 ... l_t` has probability
//! `p_{l_1} p_{l_2|l_1} ... p_{l_t|l_{t-1}}`; each path evolves a pure
//! statevector (Grover step, then the noise operator on noisy steps).
//! Summing `weight * |<w|psi_path>|^2` over all `2^t` paths reproduces
//! the conditioned density recursion and serves as its independent
//! check.

use crate::error::{Error, Result};
use crate::exact_sum::ExactSum;
use crate::grover::GroverInstance;
use crate::markov::{conditional_probs, MarkovNoiseParams};
use crate::noise::{ChiAction, NoiseLayout, NoiseUnitary};
use crate::state::Statevector;

/// Hard cap on the enumeration depth (2^t paths).
pub const MAX_TRAJECTORY_STEPS: usize = 14;

/// Path-summed success probabilities plus bookkeeping for the
/// normalization invariant.
#[derive(Debug, Clone)]
pub struct TrajectoryOracleResult {
    /// `(t, P(t))` for `t = 0..=t_max`.
    pub series: Vec<(usize, f64)>,
    /// Sum of path weights reaching each depth; must be 1 at every t.
    pub weight_totals: Vec<f64>,
}

pub fn enumerate_trajectories(
    inst: &GroverInstance,
    u: &NoiseUnitary,
    layout: &NoiseLayout,
    params: &MarkovNoiseParams,
    t_max: usize,
) -> Result<TrajectoryOracleResult> {
    if t_max < 1 || t_max > MAX_TRAJECTORY_STEPS {
        return Err(Error::Resource(format!(
            "trajectory enumeration capped at {MAX_TRAJECTORY_STEPS} steps, got {t_max}"
        )));
    }
    if inst.n() != layout.n() {
        return Err(Error::Shape {
            left: inst.dim(),
            right: 1 << layout.n(),
        });
    }
    let chi = ChiAction::new(u, layout);
    let probs = conditional_probs(params).matrix;
    let (p_g, p_gp) = params.stationary();
    let w = inst.marked();

    let mut prob_acc: Vec<ExactSum> = (0..=t_max).map(|_| ExactSum::new()).collect();
    let mut weight_acc: Vec<ExactSum> = (0..=t_max).map(|_| ExactSum::new()).collect();
    prob_acc[0].add(1.0 / inst.dim() as f64);
    weight_acc[0].add(1.0);

    // Depth-first walk over branch sequences. `branch` is 0 for the
    // quiet walker state, 1 for the noisy one.
    struct Frame {
        state: Statevector,
        weight: f64,
        branch: usize,
        depth: usize,
    }
    let root = Statevector::uniform(inst.n())?;
    let mut stack: Vec<Frame> = Vec::new();
    for branch in [0usize, 1usize] {
        let weight = if branch == 0 { p_g } else { p_gp };
        if weight == 0.0 {
            continue;
        }
        let mut state = inst.apply(&root)?;
        if branch == 1 {
            state = chi.apply_statevector(&state)?;
        }
        stack.push(Frame {
            state,
            weight,
            branch,
            depth: 1,
        });
    }

    while let Some(frame) = stack.pop() {
        prob_acc[frame.depth].add(frame.weight * frame.state.probability_of(w)?);
        weight_acc[frame.depth].add(frame.weight);
        if frame.depth == t_max {
            continue;
        }
        for branch in [0usize, 1usize] {
            let weight = frame.weight * probs[branch][frame.branch];
            if weight == 0.0 {
                continue;
            }
            let mut state = inst.apply(&frame.state)?;
            if branch == 1 {
                state = chi.apply_statevector(&state)?;
            }
            stack.push(Frame {
                state,
                weight,
                branch,
                depth: frame.depth + 1,
            });
        }
    }

    Ok(TrajectoryOracleResult {
        series: prob_acc
            .iter()
            .enumerate()
            .map(|(t, acc)| (t, acc.total()))
            .collect(),
        weight_totals: weight_acc.iter().map(|acc| acc.total()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::noiseless_success_probability;
    use crate::markov::simulate;

    #[test]
    fn single_step_is_the_two_path_mixture() {
        let n = 3;
        let p = 0.4;
        let inst = GroverInstance::new(n, 5).unwrap();
        let layout = NoiseLayout::prefix(n, 2).unwrap();
        let u = NoiseUnitary::pauli_y();
        let result = enumerate_trajectories(
            &inst,
            &u,
            &layout,
            &MarkovNoiseParams::new(p, 0.6).unwrap(),
            1,
        )
        .unwrap();

        let g_s = inst.apply(&Statevector::uniform(n).unwrap()).unwrap();
        let noisy = ChiAction::new(&u, &layout).apply_statevector(&g_s).unwrap();
        let expect =
            (1.0 - p) * g_s.probability_of(5).unwrap() + p * noisy.probability_of(5).unwrap();
        assert!((result.series[1].1 - expect).abs() <= 1e-15);
    }

    #[test]
    fn weights_are_normalized_at_every_depth() {
        let inst = GroverInstance::new(2, 1).unwrap();
        let layout = NoiseLayout::prefix(2, 1).unwrap();
        let result = enumerate_trajectories(
            &inst,
            &NoiseUnitary::hadamard(),
            &layout,
            &MarkovNoiseParams::new(0.35, 0.45).unwrap(),
            10,
        )
        .unwrap();
        for (t, &total) in result.weight_totals.iter().enumerate() {
            assert!((total - 1.0).abs() <= 1e-12, "depth {t}");
        }
    }

    #[test]
    fn perfect_memory_leaves_only_constant_paths() {
        // mu = 1: the walker freezes, so P(t) is the two-term mixture of
        // the noiseless series and the always-noisy series.
        let n = 3;
        let p = 0.3;
        let inst = GroverInstance::new(n, 0).unwrap();
        let layout = NoiseLayout::prefix(n, 1).unwrap();
        let u = NoiseUnitary::pauli_x();
        let chi = ChiAction::new(&u, &layout);
        let result = enumerate_trajectories(
            &inst,
            &u,
            &layout,
            &MarkovNoiseParams::new(p, 1.0).unwrap(),
            8,
        )
        .unwrap();
        let mut noisy_state = Statevector::uniform(n).unwrap();
        for t in 1..=8usize {
            noisy_state = chi
                .apply_statevector(&inst.apply(&noisy_state).unwrap())
                .unwrap();
            let expect = (1.0 - p) * noiseless_success_probability(n, t)
                + p * noisy_state.probability_of(0).unwrap();
            assert!((result.series[t].1 - expect).abs() <= 1e-13, "t={t}");
        }
    }

    #[test]
    fn agrees_with_the_conditioned_recursion() {
        let n = 3;
        let inst = GroverInstance::new(n, 4).unwrap();
        let layout = NoiseLayout::new(n, &[0, 2]).unwrap();
        let u = NoiseUnitary::hadamard();
        let params = MarkovNoiseParams::new(0.35, 0.6).unwrap();
        let oracle = enumerate_trajectories(&inst, &u, &layout, &params, 8).unwrap();
        let fast = simulate(&inst, &u, &layout, &params, 8).unwrap();
        for (&(t, po), &(_, pf)) in oracle.series.iter().zip(&fast.series) {
            assert!((po - pf).abs() <= 1e-12, "t={t}: {po} vs {pf}");
        }
    }

    #[test]
    fn depth_cap_is_enforced() {
        let inst = GroverInstance::new(2, 0).unwrap();
        let layout = NoiseLayout::prefix(2, 1).unwrap();
        let err = enumerate_trajectories(
            &inst,
            &NoiseUnitary::pauli_x(),
            &layout,
            &MarkovNoiseParams::new(0.5, 0.5).unwrap(),
            15,
        );
        assert!(matches!(err, Err(Error::Resource(_))));
    }
}
