//! Numerical soundness of the good-noise classifier and the short-time
//! analytic cross-checks.

use groverns_core::grover::GroverInstance;
use groverns_core::markov::{simulate, MarkovNoiseParams};
use groverns_core::noise::{
    classify_good_noise, overlap_elements, ChiAction, Classification, NoiseLayout, NoiseUnitary,
};
use groverns_core::state::Statevector;
use groverns_core::trace::SimulationTrace;
use groverns_core::verify::random_unitary;
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GRID: [(f64, f64); 6] = [
    (0.1, 0.0),
    (0.4, 0.0),
    (0.1, 0.2),
    (0.4, 0.2),
    (0.1, 0.9),
    (0.4, 0.9),
];

fn traces_for_all_m(n: usize, u: &NoiseUnitary, p: f64, mu: f64) -> Vec<SimulationTrace> {
    let inst = GroverInstance::new(n, 0).unwrap();
    let params = MarkovNoiseParams::new(p, mu).unwrap();
    (1..=n)
        .map(|m| {
            simulate(
                &inst,
                u,
                &NoiseLayout::prefix(n, m).unwrap(),
                &params,
                30,
            )
            .unwrap()
        })
        .collect()
}

/// The classifier's verdict must match what direct simulation shows.
#[test]
fn classifier_agrees_with_direct_simulation() {
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let unitaries = vec![
        NoiseUnitary::pauli_x(),
        NoiseUnitary::pauli_y(),
        NoiseUnitary::pauli_z(),
        NoiseUnitary::identity(),
        random_unitary(&mut rng),
        random_unitary(&mut rng),
    ];
    for u in &unitaries {
        let class = classify_good_noise(u).classification;
        match class {
            Classification::IdentityLike | Classification::XLike | Classification::ZLike => {
                for &(p, mu) in &GRID {
                    let traces = traces_for_all_m(n, u, p, mu);
                    for t in &traces[1..] {
                        let gap = traces[0].max_difference(t).unwrap();
                        assert!(gap <= 1e-10, "{class}: gap {gap:.3e} at p={p} mu={mu}");
                    }
                }
            }
            Classification::YLike => {
                for &(p, mu) in &GRID {
                    let traces = traces_for_all_m(n, u, p, mu);
                    for m in 1..=n - 2 {
                        let gap = traces[m - 1].max_difference(&traces[m + 1]).unwrap();
                        assert!(gap <= 1e-10, "parity gap {gap:.3e} at p={p} mu={mu}");
                    }
                }
            }
            Classification::NotGood => {
                // One grid point suffices for the separation witness.
                let traces = traces_for_all_m(n, u, 0.4, 0.2);
                let mut best: f64 = 0.0;
                for i in 0..traces.len() {
                    for j in i + 1..traces.len() {
                        best = best.max(traces[i].max_difference(&traces[j]).unwrap());
                    }
                }
                assert!(best > 1e-3, "no separation for a NotGood unitary: {best:.3e}");
            }
        }
    }
}

/// Position independence: for Pauli noise at fixed m the trace is the
/// same for every placement of the sites.
#[test]
fn pauli_noise_is_position_independent() {
    let n = 7;
    let inst = GroverInstance::new(n, 0).unwrap();
    let placements: [&[usize]; 4] = [&[0, 1, 2], &[4, 5, 6], &[0, 3, 6], &[1, 2, 5]];
    for u in [
        NoiseUnitary::pauli_x(),
        NoiseUnitary::pauli_y(),
        NoiseUnitary::pauli_z(),
    ] {
        let params = MarkovNoiseParams::new(0.25, 0.6).unwrap();
        let reference = simulate(
            &inst,
            &u,
            &NoiseLayout::new(n, placements[0]).unwrap(),
            &params,
            21,
        )
        .unwrap();
        for sites in &placements[1..] {
            let trace = simulate(
                &inst,
                &u,
                &NoiseLayout::new(n, sites).unwrap(),
                &params,
                21,
            )
            .unwrap();
            let gap = reference.max_difference(&trace).unwrap();
            assert!(gap <= 1e-10, "placement {sites:?}: gap {gap:.3e}");
        }
    }
}

/// Simulated dynamics is invariant under a global phase of the noise
/// unitary, to full precision.
#[test]
fn global_phase_leaves_the_trace_unchanged() {
    let n = 5;
    let inst = GroverInstance::new(n, 3).unwrap();
    let layout = NoiseLayout::prefix(n, 2).unwrap();
    let params = MarkovNoiseParams::new(0.3, 0.5).unwrap();
    for u in [
        NoiseUnitary::pauli_y(),
        NoiseUnitary::hadamard(),
    ] {
        let base = simulate(&inst, &u, &layout, &params, 15).unwrap();
        for phi in [0.4, std::f64::consts::PI / 7.0, 5.1] {
            let phased = u.with_global_phase(phi).unwrap();
            assert_eq!(
                classify_good_noise(&phased).classification,
                classify_good_noise(&u).classification
            );
            let trace = simulate(&inst, &phased, &layout, &params, 15).unwrap();
            let gap = base.max_difference(&trace).unwrap();
            assert!(gap <= 1e-12, "phi={phi}: gap {gap:.3e}");
        }
    }
}

/// Two-step amplitudes from the simulator against their closed forms in
/// the overlap scalars (valid for Pauli noise, where chi^2 = 1).
#[test]
fn two_step_amplitudes_match_closed_forms() {
    for u in [
        NoiseUnitary::pauli_x(),
        NoiseUnitary::pauli_y(),
        NoiseUnitary::pauli_z(),
    ] {
        for n in 3..=6usize {
            let dim = (1usize << n) as f64;
            let inst = GroverInstance::new(n, 0).unwrap();
            for m in 1..=n {
                let layout = NoiseLayout::prefix(n, m).unwrap();
                let chi = ChiAction::new(&u, &layout);
                let o = overlap_elements(&u, &layout, &inst).unwrap();

                let s = Statevector::uniform(n).unwrap();
                let g_s = inst.apply(&s).unwrap();
                let gp_s = chi.apply_statevector(&g_s).unwrap();
                let g_gp_s = inst.apply(&gp_s).unwrap();
                let gp_g_s = chi.apply_statevector(&inst.apply(&g_s).unwrap()).unwrap();
                let gp2_s = chi
                    .apply_statevector(&inst.apply(&gp_s).unwrap())
                    .unwrap();

                let c = 1.0 - 4.0 / dim;
                let root = dim.sqrt();

                let f_g_gp = (c * c * o.w_chi_s
                    + c * (2.0 / root) * (o.w_chi_w + o.s_chi_s)
                    + (4.0 / dim) * o.s_chi_w)
                    .norm_sqr();
                let f_gp_g = (o.w_chi_s * (1.0 - (4.0 / dim) * (3.0 - 4.0 / dim))
                    + (4.0 / root) * o.w_chi_w * (1.0 - 2.0 / dim))
                    .norm_sqr();
                let f_gp2 = ((c
                    * ((2.0 * o.s_chi_s - (4.0 / root) * o.w_chi_s + 2.0 * o.w_chi_w)
                        * o.w_chi_s
                        - 1.0 / root))
                    + (2.0 / root)
                        * (2.0 * o.w_chi_s * o.s_chi_w - 1.0
                            - (4.0 / root) * o.w_chi_s * o.w_chi_w
                            + 2.0 * o.w_chi_w * o.w_chi_w))
                    .norm_sqr();

                for (label, state, expect) in [
                    ("G G'", &g_gp_s, f_g_gp),
                    ("G' G", &gp_g_s, f_gp_g),
                    ("G'^2", &gp2_s, f_gp2),
                ] {
                    let got = state.probability_of(0).unwrap();
                    assert!(
                        (got - expect).abs() <= 1e-10,
                        "{label} n={n} m={m}: {got} vs {expect}"
                    );
                }

                // Explicit parity-resolved values for the bit-phase flip.
                if u == NoiseUnitary::pauli_y() {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    let y_g_gp = (Complex64::new(c * c + (4.0 / dim) * sign, 0.0)).norm_sqr() / dim;
                    assert!((g_gp_s.probability_of(0).unwrap() - y_g_gp).abs() <= 1e-10);
                    let y_gp2 = (Complex64::new(
                        (4.0 / dim) * c * sign - 8.0 / dim + 3.0,
                        0.0,
                    ))
                    .norm_sqr()
                        / dim;
                    assert!((gp2_s.probability_of(0).unwrap() - y_gp2).abs() <= 1e-10);
                }
            }
        }
    }
}
