//! Reduced simulator for bit-flip noise.
//!
//! For `U = sigma_x` the register never leaves the three-dimensional
//! real subspace spanned by the marked state `|w>`, its bit-flipped
//! image `|w'>`, and the uniform remainder
//! `|s_bar> = (1/sqrt(N-2)) sum_{x != w, w'} |x>`. In that basis the
//! Grover operator and its noisy variant are fixed 3x3 matrices whose
//! entries depend only on `N`, so the full conditioned recursion runs
//! in a 9-entry density space. The basis vectors change with the noise
//! sites, but the matrix elements do not, which is why the success
//! probability cannot depend on the number or position of the sites.

use crate::error::{Error, Result};
use crate::markov::{conditional_probs, MarkovNoiseParams};
use crate::noise::UnitarySpec;
use crate::trace::{SimulationTrace, TraceMeta};

/// `|s>` expressed in the `{|s_bar>, |w>, |w'>}` basis.
pub fn reduced_uniform(n: usize) -> Result<[f64; 3]> {
    if n < 2 || n > crate::MAX_QUBITS_STATEVECTOR {
        return Err(Error::Size {
            n,
            min: 2,
            max: crate::MAX_QUBITS_STATEVECTOR,
        });
    }
    let dim = (1u64 << n) as f64;
    Ok([((dim - 2.0) / dim).sqrt(), 1.0 / dim.sqrt(), 1.0 / dim.sqrt()])
}

/// The Grover operator in the reduced basis.
pub fn reduced_grover_matrix(n: usize) -> Result<[[f64; 3]; 3]> {
    if n < 2 || n > crate::MAX_QUBITS_STATEVECTOR {
        return Err(Error::Size {
            n,
            min: 2,
            max: crate::MAX_QUBITS_STATEVECTOR,
        });
    }
    let dim = (1u64 << n) as f64;
    let root = (dim - 2.0).sqrt();
    Ok([
        [2.0 * (dim - 2.0) / dim - 1.0, -2.0 * root / dim, 2.0 * root / dim],
        [2.0 * root / dim, 1.0 - 2.0 / dim, 2.0 / dim],
        [2.0 * root / dim, -2.0 / dim, 2.0 / dim - 1.0],
    ])
}

/// The noisy Grover operator in the reduced basis: the bit-flip noise
/// swaps `|w>` and `|w'>` and fixes `|s_bar>`, i.e. it swaps the last
/// two rows of the Grover matrix.
pub fn reduced_noisy_grover_matrix(n: usize) -> Result<[[f64; 3]; 3]> {
    let g = reduced_grover_matrix(n)?;
    Ok([g[0], g[2], g[1]])
}

/// One pure-state step in the reduced basis: apply the ideal operator
/// (`noisy = false`) or the noisy one (`noisy = true`).
pub fn reduced_sigma_x_step(state: [f64; 3], n: usize, noisy: bool) -> Result<[f64; 3]> {
    let m = if noisy {
        reduced_noisy_grover_matrix(n)?
    } else {
        reduced_grover_matrix(n)?
    };
    Ok(mat3_vec(&m, &state))
}

fn mat3_vec(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0f64; 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

fn transpose3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

/// Full conditioned recursion for bit-flip noise, run in the reduced
/// space. Valid for any nonzero number of noisy sites; the trace
/// metadata records no sites because the result is independent of them.
pub fn simulate_reduced_sigma_x(
    n: usize,
    params: &MarkovNoiseParams,
    t_max: usize,
) -> Result<SimulationTrace> {
    if t_max < 1 {
        return Err(Error::Domain("t_max must be >= 1".into()));
    }
    let dim = 1u64 << n;
    let g = reduced_grover_matrix(n)?;
    let gt = transpose3(&g);
    let gp = reduced_noisy_grover_matrix(n)?;
    let gpt = transpose3(&gp);
    let probs = conditional_probs(params).matrix;
    let (p_g, p_gp) = params.stationary();

    let s = reduced_uniform(n)?;
    let mut rho0 = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            rho0[i][j] = s[i] * s[j];
        }
    }

    let phi0 = |rho: &[[f64; 3]; 3]| mat3_mul(&mat3_mul(&g, rho), &gt);
    let phi1 = |rho: &[[f64; 3]; 3]| mat3_mul(&mat3_mul(&gp, rho), &gpt);
    let scale = |rho: &[[f64; 3]; 3], c: f64| {
        let mut out = *rho;
        for row in &mut out {
            for v in row.iter_mut() {
                *v *= c;
            }
        }
        out
    };
    let add = |a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]| {
        let mut out = *a;
        for (row, brow) in out.iter_mut().zip(b) {
            for (v, bv) in row.iter_mut().zip(brow) {
                *v += bv;
            }
        }
        out
    };

    let mut sigma_g = scale(&phi0(&rho0), p_g);
    let mut sigma_gp = scale(&phi1(&rho0), p_gp);

    let mut series = Vec::with_capacity(t_max + 1);
    series.push((0usize, 1.0 / dim as f64));
    series.push((1usize, (sigma_g[1][1] + sigma_gp[1][1]).clamp(0.0, 1.0)));
    for t in 2..=t_max {
        let a = phi0(&sigma_g);
        let b = phi0(&sigma_gp);
        let next_g = add(&scale(&a, probs[0][0]), &scale(&b, probs[0][1]));
        let pre_noise = add(&scale(&a, probs[1][0]), &scale(&b, probs[1][1]));
        // The noise swaps basis elements 1 and 2 on both sides.
        let mut next_gp = [[0.0f64; 3]; 3];
        let perm = [0usize, 2, 1];
        for i in 0..3 {
            for j in 0..3 {
                next_gp[perm[i]][perm[j]] = pre_noise[i][j];
            }
        }
        sigma_g = next_g;
        sigma_gp = next_gp;
        series.push((t, (sigma_g[1][1] + sigma_gp[1][1]).clamp(0.0, 1.0)));
    }

    SimulationTrace::new(
        TraceMeta {
            n,
            w: 0,
            unitary: UnitarySpec::named("x"),
            sites: Vec::new(),
            p: params.p(),
            mu: params.mu(),
        },
        series,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::GroverInstance;
    use crate::markov::simulate;
    use crate::noise::{NoiseLayout, NoiseUnitary};

    #[test]
    fn reduced_uniform_components() {
        let s = reduced_uniform(3).unwrap();
        let dim = 8.0f64;
        assert_eq!(s[0], ((dim - 2.0) / dim).sqrt());
        assert_eq!(s[1], 1.0 / dim.sqrt());
        assert_eq!(s[2], 1.0 / dim.sqrt());
        let norm: f64 = s.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn reduced_matrices_are_orthogonal() {
        for n in 2..=10usize {
            for m in [reduced_grover_matrix(n).unwrap(), reduced_noisy_grover_matrix(n).unwrap()]
            {
                let prod = mat3_mul(&m, &transpose3(&m));
                for i in 0..3 {
                    for j in 0..3 {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!(
                            (prod[i][j] - expect).abs() <= 1e-12,
                            "n={n} ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pure_step_matches_full_register() {
        // Applying the reduced noisy operator t times reproduces the full
        // statevector success probability of the always-noisy branch.
        let n = 5;
        let inst = GroverInstance::new(n, 0).unwrap();
        let layout = NoiseLayout::prefix(n, 2).unwrap();
        let chi = crate::noise::ChiAction::new(&NoiseUnitary::pauli_x(), &layout);
        let mut full = crate::state::Statevector::uniform(n).unwrap();
        let mut red = reduced_uniform(n).unwrap();
        for t in 1..=12usize {
            full = chi.apply_statevector(&inst.apply(&full).unwrap()).unwrap();
            red = reduced_sigma_x_step(red, n, true).unwrap();
            let p_full = full.probability_of(0).unwrap();
            let p_red = red[1] * red[1];
            assert!((p_full - p_red).abs() <= 1e-12, "t={t}");
        }
    }

    #[test]
    fn reduced_recursion_matches_full_simulator() {
        for n in 3..=6usize {
            let inst = GroverInstance::new(n, 0).unwrap();
            for (p, mu) in [(0.2, 0.0), (0.35, 0.7), (1.0, 0.4)] {
                let params = MarkovNoiseParams::new(p, mu).unwrap();
                let reduced = simulate_reduced_sigma_x(n, &params, 15).unwrap();
                for m in [1usize, n / 2 + 1, n] {
                    let layout = NoiseLayout::prefix(n, m).unwrap();
                    let full = simulate(
                        &inst,
                        &NoiseUnitary::pauli_x(),
                        &layout,
                        &params,
                        15,
                    )
                    .unwrap();
                    assert!(
                        reduced.max_difference(&full).unwrap() <= 1e-10,
                        "n={n} m={m} p={p} mu={mu}"
                    );
                }
            }
        }
    }
}
