//! The Grover iteration applied without materializing the operator.
//!
//! One iteration is `G = -I + 2|s><s| - (4/sqrt(N))|s><w| + 2|w><w|`,
//! a rank-2 perturbation of the negated identity. Applying it to a
//! vector therefore costs two reductions and one streaming update, and
//! conjugating a density matrix costs one pass over the columns followed
//! by one pass over the rows.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact_sum::{ExactSumC, ExactSumLanes};
use crate::state::{DensityMatrix, Statevector};

/// Column-tile width for the column-sum pass; keeps the live exact
/// accumulators inside L2 while streaming the matrix row-major.
const COL_TILE: usize = 64;

/// One Grover search instance: register size and marked element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroverInstance {
    n: usize,
    w: usize,
}

impl GroverInstance {
    pub fn new(n: usize, w: usize) -> Result<Self> {
        if n < 1 || n > crate::MAX_QUBITS_STATEVECTOR {
            return Err(Error::Size {
                n,
                min: 1,
                max: crate::MAX_QUBITS_STATEVECTOR,
            });
        }
        let dim = 1usize << n;
        if w >= dim {
            return Err(Error::IndexOutOfRange { index: w, dim });
        }
        Ok(GroverInstance { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marked(&self) -> usize {
        self.w
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// `G |state>`.
    pub fn apply(&self, state: &Statevector) -> Result<Statevector> {
        if state.n() != self.n {
            return Err(Error::Shape {
                left: state.dim(),
                right: self.dim(),
            });
        }
        let mut out = state.clone();
        apply_grover_vec(out.amplitudes_mut(), self.n, self.w);
        Ok(out)
    }

    /// `G rho G^dagger`.
    pub fn apply_dm(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n() != self.n {
            return Err(Error::Shape {
                left: rho.dim(),
                right: self.dim(),
            });
        }
        let mut out = rho.clone();
        grover_conjugate_dm(out.entries_mut(), self.n, self.w);
        Ok(out)
    }
}

/// In-place `v <- G v`.
///
/// With `alpha = <s|v>` and `beta = v[w]`:
/// `G v = -v + (2 alpha - 4 beta / sqrt(N)) |s> + 2 beta |w>`.
pub(crate) fn apply_grover_vec(amps: &mut [Complex64], n: usize, w: usize) {
    let dim = 1usize << n;
    debug_assert_eq!(amps.len(), dim);
    let s_val = 1.0 / (dim as f64).sqrt();
    let mut sum = ExactSumC::new();
    for a in amps.iter() {
        sum.add(*a);
    }
    let alpha = s_val * sum.total();
    let beta = amps[w];
    let k = s_val * (2.0 * alpha - 4.0 * s_val * beta);
    for a in amps.iter_mut() {
        *a = k - *a;
    }
    amps[w] += 2.0 * beta;
}

/// In-place `rho <- G rho G^dagger` on a row-major `2^n x 2^n` buffer.
///
/// The left factor updates columns; because `G` is real, the right
/// factor is the same kernel applied to each row. The column pass is
/// executed as a tiled column-sum reduction followed by one row-major
/// sweep that also accumulates the row sums the row pass needs.
pub(crate) fn grover_conjugate_dm(data: &mut [Complex64], n: usize, w: usize) {
    let dim = 1usize << n;
    debug_assert_eq!(data.len(), dim * dim);
    let s_val = 1.0 / (dim as f64).sqrt();

    // Column sums of the current matrix, exact and order-insensitive.
    let mut col_sums = vec![Complex64::new(0.0, 0.0); dim];
    {
        let mut accs: Vec<ExactSumC> = (0..COL_TILE.min(dim)).map(|_| ExactSumC::new()).collect();
        let mut j0 = 0;
        while j0 < dim {
            let width = COL_TILE.min(dim - j0);
            for row in data.chunks_exact(dim) {
                for (acc, v) in accs[..width].iter_mut().zip(&row[j0..j0 + width]) {
                    acc.add(*v);
                }
            }
            for (jj, acc) in accs[..width].iter_mut().enumerate() {
                col_sums[j0 + jj] = acc.total();
                acc.reset();
            }
            j0 += width;
        }
    }

    // Per-column update constants for the left factor.
    let old_row_w: Vec<Complex64> = data[w * dim..(w + 1) * dim].to_vec();
    let mut k_col = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        let alpha = s_val * col_sums[j];
        k_col[j] = s_val * (2.0 * alpha - 4.0 * s_val * old_row_w[j]);
    }

    // Fused sweep: write (G rho) row by row, then immediately apply the
    // right factor to the finished row using its exact row sum.
    let mut row_sum = ExactSumLanes::new();
    for (i, row) in data.chunks_exact_mut(dim).enumerate() {
        if i == w {
            for j in 0..dim {
                let v = k_col[j] - row[j] + 2.0 * old_row_w[j];
                row[j] = v;
                row_sum.add(j, v);
            }
        } else {
            for j in 0..dim {
                let v = k_col[j] - row[j];
                row[j] = v;
                row_sum.add(j, v);
            }
        }
        let alpha = s_val * row_sum.total_and_reset();
        let beta = row[w];
        let k = s_val * (2.0 * alpha - 4.0 * s_val * beta);
        for v in row.iter_mut() {
            *v = k - *v;
        }
        row[w] += 2.0 * beta;
    }
}

/// Success probability of the noiseless algorithm after `t` iterations:
/// `sin^2((2t+1) asin(1/sqrt(N)))`.
pub fn noiseless_success_probability(n: usize, t: usize) -> f64 {
    let dim = (1u64 << n) as f64;
    let theta = (1.0 / dim.sqrt()).asin();
    ((2 * t + 1) as f64 * theta).sin().powi(2)
}
