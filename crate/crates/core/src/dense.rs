//! Dense materializations used as verification oracles.
//!
//! Production paths never build a `2^n x 2^n` operator; these helpers
//! exist so small instances (n <= 6) can be checked against the
//! structure-exploiting kernels.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grover::GroverInstance;
use crate::noise::{NoiseLayout, NoiseUnitary};
use crate::state::{site_bit, DensityMatrix};

/// Largest register for which dense operators may be materialized.
pub const MAX_DENSE_QUBITS: usize = 6;

fn require_small(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Size {
            n,
            min: 1,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

/// Row-major dense Grover operator
/// `G = -I + 2|s><s| - (4/sqrt(N))|s><w| + 2|w><w|`.
pub fn dense_grover(inst: &GroverInstance) -> Vec<Complex64> {
    let dim = inst.dim();
    let w = inst.marked();
    let inv_n = 1.0 / dim as f64;
    let mut g = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut v = 2.0 * inv_n;
            if i == j {
                v -= 1.0;
            }
            if j == w {
                v -= 4.0 * inv_n;
                if i == w {
                    v += 2.0;
                }
            }
            g[i * dim + j] = Complex64::new(v, 0.0);
        }
    }
    g
}

/// Row-major dense noise operator: the tensor product with `u` on the
/// layout's sites and the identity elsewhere. Restricted to n <= 6.
pub fn dense_chi(u: &NoiseUnitary, layout: &NoiseLayout) -> Result<Vec<Complex64>> {
    require_small(layout.n())?;
    let n = layout.n();
    let dim = 1usize << n;
    let m = u.matrix().0;
    let eye = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    let mut chi = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (k, row) in chi.chunks_exact_mut(dim).enumerate() {
        for (l, out) in row.iter_mut().enumerate() {
            let mut v = Complex64::new(1.0, 0.0);
            for site in 0..n {
                let bit = site_bit(n, site);
                let rb = (k & bit != 0) as usize;
                let cb = (l & bit != 0) as usize;
                let factor = if layout.mask() & bit != 0 {
                    m[rb][cb]
                } else {
                    eye[rb][cb]
                };
                v *= factor;
                if v.norm_sqr() == 0.0 {
                    break;
                }
            }
            *out = v;
        }
    }
    Ok(chi)
}

/// Dense matrix-vector product.
pub fn mat_vec(mat: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let dim = v.len();
    assert_eq!(mat.len(), dim * dim);
    mat.chunks_exact(dim)
        .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
        .collect()
}

/// Dense matrix product.
pub fn mat_mul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    assert_eq!(a.len(), dim * dim);
    assert_eq!(b.len(), dim * dim);
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

/// Smallest eigenvalue of a Hermitian density matrix, via cyclic Jacobi
/// rotations. Intended for positivity spot checks on small instances.
pub fn min_eigenvalue_hermitian(rho: &DensityMatrix) -> Result<f64> {
    require_small(rho.n())?;
    let dim = rho.dim();
    let mut a: Vec<Complex64> = rho.entries().to_vec();
    // Symmetrize first so the sweep only chases real off-diagonal mass.
    for i in 0..dim {
        for j in 0..dim {
            let h = 0.5 * (a[i * dim + j] + a[j * dim + i].conj());
            a[i * dim + j] = h;
        }
    }
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..dim {
            for j in i + 1..dim {
                off = off.max(a[i * dim + j].norm());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = a[p * dim + p].re;
                let aqq = a[q * dim + q].re;
                // Phase so the pivot becomes real, then a real Jacobi angle.
                let phase = apq / apq.norm();
                let g = apq.norm();
                let theta = 0.5 * (2.0 * g).atan2(aqq - app);
                let (sin_t, cos_t) = theta.sin_cos();
                let c = Complex64::new(cos_t, 0.0);
                let s = phase * sin_t;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s.conj() * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s.conj() * apk + c * aqk;
                }
            }
        }
    }
    let mut min = f64::INFINITY;
    for i in 0..dim {
        min = min.min(a[i * dim + i].re);
    }
    Ok(min)
}
