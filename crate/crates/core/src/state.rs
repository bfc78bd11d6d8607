//! Exact register states: pure statevectors and dense density matrices.
//!
//! Basis convention: computational basis indices are 0-indexed and qubit
//! 0 is the most significant bit of the index, so site `j` of an
//! `n`-qubit register corresponds to bit `n-1-j`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact_sum::{ExactSum, ExactSumC};
use crate::{MAX_QUBITS_DENSITY, MAX_QUBITS_STATEVECTOR};

/// Tolerance for structural invariants (normalization, hermiticity).
pub const STRUCT_TOL: f64 = 1e-12;

/// Bit mask of qubit `site` in an `n`-qubit register.
#[inline]
pub fn site_bit(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

/// A 2x2 complex matrix, the single-qubit operator type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
    }

    /// Maximum entry deviation of `self * self^dagger` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let m = &self.0;
        let mut err: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    acc += m[i][k] * m[j][k].conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((acc - target).norm());
            }
        }
        err
    }

    pub fn require_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_error();
        if deviation > STRUCT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[0][1].conj()],
            [m[1][0].conj(), m[1][1].conj()],
        ])
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let m = &self.0;
        Mat2([[c * m[0][0], c * m[0][1]], [c * m[1][0], c * m[1][1]]])
    }
}

fn check_sites(n: usize, sites: &[usize]) -> Result<()> {
    let mut seen = 0usize;
    for &site in sites {
        if site >= n {
            return Err(Error::SiteOutOfRange { site, n });
        }
        let bit = site_bit(n, site);
        if seen & bit != 0 {
            return Err(Error::DuplicateSite { site });
        }
        seen |= bit;
    }
    Ok(())
}

/// Pure state of an n-qubit register: 2^n complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The uniform superposition over all 2^n basis states.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 1 || n > MAX_QUBITS_STATEVECTOR {
            return Err(Error::Size {
                n,
                min: 1,
                max: MAX_QUBITS_STATEVECTOR,
            });
        }
        let dim = 1usize << n;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Statevector {
            n,
            amps: vec![amp; dim],
        })
    }

    /// The computational basis state `|x>`.
    pub fn basis(n: usize, x: usize) -> Result<Self> {
        if n < 1 || n > MAX_QUBITS_STATEVECTOR {
            return Err(Error::Size {
                n,
                min: 1,
                max: MAX_QUBITS_STATEVECTOR,
            });
        }
        let dim = 1usize << n;
        if x >= dim {
            return Err(Error::IndexOutOfRange { index: x, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[x] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n, amps })
    }

    /// Build from explicit amplitudes; must be normalized within 1e-12.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        if amps.len() != dim {
            return Err(Error::Shape {
                left: amps.len(),
                right: dim,
            });
        }
        let state = Statevector { n, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > STRUCT_TOL {
            return Err(Error::OutOfRange {
                what: "statevector norm^2",
                value: norm,
                lo: 1.0 - STRUCT_TOL,
                hi: 1.0 + STRUCT_TOL,
            });
        }
        Ok(state)
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Statevector { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = ExactSum::new();
        for a in &self.amps {
            acc.add(a.norm_sqr());
        }
        acc.total()
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &Statevector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let mut acc = ExactSumC::new();
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc.add(a.conj() * b);
        }
        Ok(acc.total())
    }

    /// Probability of measuring basis state `x`.
    pub fn probability_of(&self, x: usize) -> Result<f64> {
        if x >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: x,
                dim: self.dim(),
            });
        }
        Ok(self.amps[x].norm_sqr())
    }

    /// Apply a single-qubit unitary to each of the listed sites.
    pub fn apply_local_unitary(&self, u: &Mat2, sites: &[usize]) -> Result<Statevector> {
        u.require_unitary()?;
        check_sites(self.n, sites)?;
        let mut out = self.clone();
        for &site in sites {
            apply_single_qubit_vec(out.amps.as_mut_slice(), self.n, u, site);
        }
        Ok(out)
    }

    /// Outer product `|self><self|`.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_pure(self)
    }
}

/// Apply `u` to one qubit of a statevector, in place.
pub(crate) fn apply_single_qubit_vec(amps: &mut [Complex64], n: usize, u: &Mat2, site: usize) {
    let bit = site_bit(n, site);
    let m = &u.0;
    for base in 0..amps.len() {
        if base & bit != 0 {
            continue;
        }
        let i0 = base;
        let i1 = base | bit;
        let a0 = amps[i0];
        let a1 = amps[i1];
        amps[i0] = m[0][0] * a0 + m[0][1] * a1;
        amps[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
}

/// Dense density matrix of an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n < 1 || n > MAX_QUBITS_DENSITY {
            return Err(Error::Size {
                n,
                min: 1,
                max: MAX_QUBITS_DENSITY,
            });
        }
        let dim = 1usize << n;
        Ok(DensityMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn from_pure(state: &Statevector) -> Result<Self> {
        let mut dm = DensityMatrix::zeros(state.n())?;
        let dim = state.dim();
        for i in 0..dim {
            for j in 0..dim {
                dm.data[i * dim + j] = state.amps[i] * state.amps[j].conj();
            }
        }
        Ok(dm)
    }

    /// The maximally mixed state I/2^n.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let mut dm = DensityMatrix::zeros(n)?;
        let dim = dm.dim();
        let v = Complex64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            dm.data[i * dim + i] = v;
        }
        Ok(dm)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim() + j]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        let mut acc = ExactSumC::new();
        for i in 0..dim {
            acc.add(self.data[i * dim + i]);
        }
        acc.total()
    }

    /// Largest entry-wise deviation from `rho = rho^dagger`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut err: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                err = err.max((self.data[i * dim + j] - self.data[j * dim + i].conj()).norm());
            }
        }
        err
    }

    /// `<w|rho|w>`: the success probability of measuring basis state `w`.
    ///
    /// The diagonal entry must be real within 1e-12; the result is
    /// clipped to [0, 1] after a range check with the same margin.
    pub fn fidelity_with_basis(&self, w: usize) -> Result<f64> {
        let dim = self.dim();
        if w >= dim {
            return Err(Error::IndexOutOfRange { index: w, dim });
        }
        let v = self.data[w * dim + w];
        if v.im.abs() > STRUCT_TOL {
            return Err(Error::Consistency(format!(
                "diagonal entry has imaginary part {:e}",
                v.im
            )));
        }
        if v.re < -STRUCT_TOL || v.re > 1.0 + STRUCT_TOL {
            return Err(Error::Consistency(format!(
                "diagonal entry {:e} outside [0, 1]",
                v.re
            )));
        }
        Ok(v.re.clamp(0.0, 1.0))
    }

    /// Apply a single-qubit unitary to each listed site: `rho -> U rho U^dagger`.
    pub fn apply_local_unitary(&self, u: &Mat2, sites: &[usize]) -> Result<DensityMatrix> {
        u.require_unitary()?;
        check_sites(self.n, sites)?;
        let mut out = self.clone();
        for &site in sites {
            apply_single_qubit_dm(out.data.as_mut_slice(), self.n, u, site);
        }
        Ok(out)
    }

    /// out = c1 * a + c2 * b, entrywise.
    pub fn linear_combination(c1: f64, a: &DensityMatrix, c2: f64, b: &DensityMatrix) -> Result<DensityMatrix> {
        if a.n != b.n {
            return Err(Error::Shape {
                left: a.dim(),
                right: b.dim(),
            });
        }
        let mut out = DensityMatrix::zeros(a.n)?;
        for ((o, &x), &y) in out.data.iter_mut().zip(&a.data).zip(&b.data) {
            *o = c1 * x + c2 * y;
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> DensityMatrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = c * *v;
        }
        out
    }

    /// Largest entry-wise distance to another matrix.
    pub fn max_entry_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::Shape {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let mut err: f64 = 0.0;
        for (a, b) in self.data.iter().zip(&other.data) {
            err = err.max((a - b).norm());
        }
        Ok(err)
    }
}

/// Conjugate a density matrix by a single-qubit unitary, in place:
/// rows get `u`, columns get `conj(u)`.
pub(crate) fn apply_single_qubit_dm(data: &mut [Complex64], n: usize, u: &Mat2, site: usize) {
    let dim = 1usize << n;
    let bit = site_bit(n, site);
    let m = &u.0;
    // Row mixing: rho <- (U x I) rho. Walk paired rows together.
    for i0 in 0..dim {
        if i0 & bit != 0 {
            continue;
        }
        let i1 = i0 | bit;
        let (lo, hi) = data.split_at_mut(i1 * dim);
        let row0 = &mut lo[i0 * dim..i0 * dim + dim];
        let row1 = &mut hi[..dim];
        for (r0, r1) in row0.iter_mut().zip(row1.iter_mut()) {
            let a0 = *r0;
            let a1 = *r1;
            *r0 = m[0][0] * a0 + m[0][1] * a1;
            *r1 = m[1][0] * a0 + m[1][1] * a1;
        }
    }
    // Column mixing: rho <- rho (U x I)^dagger, i.e. conj(u) pairs within each row.
    let c = [
        [m[0][0].conj(), m[0][1].conj()],
        [m[1][0].conj(), m[1][1].conj()],
    ];
    for row in data.chunks_exact_mut(dim) {
        for j0 in 0..dim {
            if j0 & bit != 0 {
                continue;
            }
            let j1 = j0 | bit;
            let a0 = row[j0];
            let a1 = row[j1];
            row[j0] = c[0][0] * a0 + c[0][1] * a1;
            row[j1] = c[1][0] * a0 + c[1][1] * a1;
        }
    }
}
