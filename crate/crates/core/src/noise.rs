//! The local noise model: a single-qubit unitary applied to a set of
//! noisy sites between Grover iterations, and the analytic
//! classification of the unitaries for which the success probability
//! does not depend on how many sites are noisy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_sum::ExactSumC;
use crate::grover::GroverInstance;
use crate::state::{site_bit, DensityMatrix, Mat2, Statevector};

/// Tolerance for the classifier's structural decisions: detecting
/// `|a| = 1` / `|b| = 1` (on the squared modulus) and distinguishing
/// coefficient values. Borderline unitaries classify as NotGood.
pub const CLASSIFY_TOL: f64 = 1e-10;

/// Iterative complex integer power. Products of exactly representable
/// factors stay exact, which `powi`'s polar form would not guarantee.
pub(crate) fn cpowu(z: Complex64, k: usize) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for _ in 0..k {
        out *= z;
    }
    out
}

/// The general single-qubit noise unitary
/// `e^{i phi} [[a, b], [-conj(b) e^{i theta}, conj(a) e^{i theta}]]`
/// with `|a|^2 + |b|^2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseUnitary {
    a: Complex64,
    b: Complex64,
    theta: f64,
    phi: f64,
    phase_theta: Complex64,
    phase_phi: Complex64,
    mat: Mat2,
}

impl NoiseUnitary {
    fn build(
        a: Complex64,
        b: Complex64,
        theta: f64,
        phi: f64,
        phase_theta: Complex64,
        phase_phi: Complex64,
    ) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                what: "|a|^2 + |b|^2",
                value: norm,
                lo: 1.0 - 1e-12,
                hi: 1.0 + 1e-12,
            });
        }
        let mat = Mat2([
            [phase_phi * a, phase_phi * b],
            [
                phase_phi * (-b.conj() * phase_theta),
                phase_phi * (a.conj() * phase_theta),
            ],
        ]);
        mat.require_unitary()?;
        Ok(NoiseUnitary {
            a,
            b,
            theta,
            phi,
            phase_theta,
            phase_phi,
            mat,
        })
    }

    /// General constructor from the defining parameters.
    pub fn from_params(a: Complex64, b: Complex64, theta: f64, phi: f64) -> Result<Self> {
        let phase_theta = Complex64::from_polar(1.0, theta);
        let phase_phi = if phi == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, phi)
        };
        Self::build(a, b, theta, phi, phase_theta, phase_phi)
    }

    /// Bit flip: a=0, b=1, theta=pi. Stored with exact entries.
    pub fn pauli_x() -> Self {
        Self::build(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            std::f64::consts::PI,
            0.0,
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .expect("exact construction")
    }

    /// Bit-phase flip: a=0, b=-i, theta=pi.
    pub fn pauli_y() -> Self {
        Self::build(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            std::f64::consts::PI,
            0.0,
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .expect("exact construction")
    }

    /// Phase flip: a=1, b=0, theta=pi.
    pub fn pauli_z() -> Self {
        Self::build(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            std::f64::consts::PI,
            0.0,
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .expect("exact construction")
    }

    /// Identity: a=1, b=0, theta=0.
    pub fn identity() -> Self {
        Self::build(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            0.0,
            0.0,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .expect("exact construction")
    }

    /// Hadamard: a = b = 1/sqrt(2), theta = pi.
    pub fn hadamard() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::build(
            Complex64::new(r, 0.0),
            Complex64::new(r, 0.0),
            std::f64::consts::PI,
            0.0,
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .expect("exact construction")
    }

    /// Multiply by an extra global phase.
    pub fn with_global_phase(&self, phi: f64) -> Result<Self> {
        Self::from_params(self.a, self.b, self.theta, self.phi + phi)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub(crate) fn phase_theta(&self) -> Complex64 {
        self.phase_theta
    }

    pub(crate) fn phase_phi(&self) -> Complex64 {
        self.phase_phi
    }

    /// The materialized 2x2 matrix, including the global phase.
    pub fn matrix(&self) -> Mat2 {
        self.mat
    }

    /// True when the matrix is exactly diagonal (b stored as exact zero).
    pub(crate) fn exactly_diagonal(&self) -> bool {
        self.b == Complex64::new(0.0, 0.0)
    }

    /// True when the matrix is exactly anti-diagonal.
    pub(crate) fn exactly_antidiagonal(&self) -> bool {
        self.a == Complex64::new(0.0, 0.0)
    }
}

/// External-interface form of a noise unitary: a named alias or the
/// explicit parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitarySpec {
    Named(String),
    Params {
        a_re: f64,
        a_im: f64,
        b_re: f64,
        b_im: f64,
        theta: f64,
        #[serde(default)]
        phi: f64,
    },
}

impl UnitarySpec {
    pub fn named(alias: &str) -> Self {
        UnitarySpec::Named(alias.to_string())
    }

    pub fn build(&self) -> Result<NoiseUnitary> {
        match self {
            UnitarySpec::Named(name) => match name.as_str() {
                "x" => Ok(NoiseUnitary::pauli_x()),
                "y" => Ok(NoiseUnitary::pauli_y()),
                "z" => Ok(NoiseUnitary::pauli_z()),
                "i" => Ok(NoiseUnitary::identity()),
                "h" => Ok(NoiseUnitary::hadamard()),
                other => Err(Error::Parse(format!(
                    "unknown unitary alias '{other}' (expected x, y, z, i, or h)"
                ))),
            },
            UnitarySpec::Params {
                a_re,
                a_im,
                b_re,
                b_im,
                theta,
                phi,
            } => NoiseUnitary::from_params(
                Complex64::new(*a_re, *a_im),
                Complex64::new(*b_re, *b_im),
                *theta,
                *phi,
            ),
        }
    }
}

impl std::fmt::Display for UnitarySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnitarySpec::Named(name) => write!(f, "{name}"),
            UnitarySpec::Params {
                a_re,
                a_im,
                b_re,
                b_im,
                theta,
                phi,
            } => write!(
                f,
                "a={a_re}{a_im:+}i b={b_re}{b_im:+}i theta={theta} phi={phi}"
            ),
        }
    }
}

/// Which qubits the noise acts on. `m = |sites|` is the noise strength.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseLayout {
    n: usize,
    sites: Vec<usize>,
    mask: usize,
}

impl NoiseLayout {
    pub fn new(n: usize, sites: &[usize]) -> Result<Self> {
        if n < 1 || n > crate::MAX_QUBITS_STATEVECTOR {
            return Err(Error::Size {
                n,
                min: 1,
                max: crate::MAX_QUBITS_STATEVECTOR,
            });
        }
        let mut mask = 0usize;
        let mut sorted: Vec<usize> = sites.to_vec();
        sorted.sort_unstable();
        for &site in &sorted {
            if site >= n {
                return Err(Error::SiteOutOfRange { site, n });
            }
            let bit = site_bit(n, site);
            if mask & bit != 0 {
                return Err(Error::DuplicateSite { site });
            }
            mask |= bit;
        }
        Ok(NoiseLayout {
            n,
            sites: sorted,
            mask,
        })
    }

    /// Sites `{0, 1, ..., m-1}`.
    pub fn prefix(n: usize, m: usize) -> Result<Self> {
        let sites: Vec<usize> = (0..m).collect();
        Self::new(n, &sites)
    }

    /// Sites `{n-m, ..., n-1}`.
    pub fn suffix(n: usize, m: usize) -> Result<Self> {
        if m > n {
            return Err(Error::SiteOutOfRange { site: m, n });
        }
        let sites: Vec<usize> = (n - m..n).collect();
        Self::new(n, &sites)
    }

    /// The first qubit plus the last `m-1` qubits (the placement the
    /// CLI exposes as "paper-eq7").
    pub fn split(n: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Self::new(n, &[]);
        }
        if m > n {
            return Err(Error::SiteOutOfRange { site: m, n });
        }
        let mut sites = vec![0usize];
        for site in n - (m - 1)..n {
            if site > 0 {
                sites.push(site);
            }
        }
        sites.dedup();
        Self::new(n, &sites)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    /// Bit mask with a 1 at each noisy site's bit position.
    pub fn mask(&self) -> usize {
        self.mask
    }

    /// Number of noisy sites at which basis index `x` has bit 1.
    #[inline]
    pub fn ones_at_sites(&self, x: usize) -> usize {
        (x & self.mask).count_ones() as usize
    }
}

/// Row-sum value of the register-wide noise operator for rows whose
/// index has `q` set bits among the noisy sites:
/// `e^{i m phi} e^{i q theta} (a+b)^{m-q} (conj(a)-conj(b))^q`.
pub fn psi_q(u: &NoiseUnitary, m: usize, q: usize) -> Result<Complex64> {
    if q > m {
        return Err(Error::Domain(format!("q={q} out of range 0..={m}")));
    }
    let base0 = u.a() + u.b();
    let base1 = u.phase_theta() * (u.a().conj() - u.b().conj());
    Ok(cpowu(u.phase_phi(), m) * cpowu(base0, m - q) * cpowu(base1, q))
}

/// How many rows share the value `psi_q`: `(N / 2^m) * C(m, q)`.
pub fn psi_multiplicity(n: usize, m: usize, q: usize) -> Result<u64> {
    if m > n || q > m {
        return Err(Error::Domain(format!(
            "invalid multiplicity arguments n={n} m={m} q={q}"
        )));
    }
    let mut binom = 1u64;
    for i in 0..q {
        binom = binom * (m - i) as u64 / (i + 1) as u64;
    }
    Ok((1u64 << (n - m)) * binom)
}

/// Invariance classes of noise unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Phase times the identity: trivial noise.
    IdentityLike,
    /// Phase times sigma_x: success probability independent of m.
    XLike,
    /// Phase times i sigma_y: success probability depends only on the
    /// parity of m.
    YLike,
    /// Phase times sigma_z: success probability independent of m.
    ZLike,
    /// Everything else: success probability varies with m.
    NotGood,
}

impl Classification {
    /// Human-readable invariance statement for reports.
    pub fn invariance_statement(&self) -> &'static str {
        match self {
            Classification::IdentityLike => "invariant for all m (noise acts trivially)",
            Classification::XLike | Classification::ZLike => "invariant for all m",
            Classification::YLike => "invariant for fixed parity of m",
            Classification::NotGood => "no invariance in m (not a good noise)",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::IdentityLike => "IdentityLike",
            Classification::XLike => "XLike",
            Classification::YLike => "YLike",
            Classification::ZLike => "ZLike",
            Classification::NotGood => "NotGood",
        };
        f.write_str(s)
    }
}

/// Result of classifying a noise unitary, optionally enriched with the
/// block decomposition of `chi|s>` for a concrete register.
#[derive(Debug, Clone)]
pub struct GoodNoiseAnalysis {
    pub classification: Classification,
    /// Number of distinct row-sum values for a single noisy site.
    pub distinct_count: usize,
    /// The distinct row-sum values, in order of first occurrence.
    pub coefficients: Vec<Complex64>,
    /// Dimensions of the equal-coefficient blocks spanned by basis
    /// states other than the marked state and its image. Filled by
    /// [`analyze_with_layout`].
    pub block_dimensions: Vec<usize>,
    /// Coefficient of the marked state in `chi|s>` (unit modulus for
    /// condition-1 unitaries). Filled by [`analyze_with_layout`].
    pub alpha: Option<Complex64>,
    /// Coefficient of the flipped marked state, present only on the
    /// anti-diagonal branch. Filled by [`analyze_with_layout`].
    pub beta: Option<Complex64>,
}

fn phase_fit_residual(u: &Mat2, target: &Mat2) -> f64 {
    // Best global phase aligning u with target, then max entry distance.
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            tr += target.0[i][j].conj() * u.0[i][j];
        }
    }
    if tr.norm() < 1e-300 {
        return f64::INFINITY;
    }
    let phase = tr / tr.norm();
    let mut err: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            err = err.max((u.0[i][j] - phase * target.0[i][j]).norm());
        }
    }
    err
}

/// Decide whether `u` is a good noise and of which kind.
///
/// The elimination runs in two stages: first the unitary must be
/// diagonal or anti-diagonal within tolerance (otherwise the row sums
/// of the register-wide operator change the t=1 success probability
/// with m); second, among those, only phase multiples of the identity,
/// sigma_z, sigma_x, and i sigma_y keep the number of distinct
/// coefficients stable for every m.
pub fn classify_good_noise(u: &NoiseUnitary) -> GoodNoiseAnalysis {
    let psi0 = psi_q(u, 1, 0).expect("q in range");
    let psi1 = psi_q(u, 1, 1).expect("q in range");
    let distinct = if (psi0 - psi1).norm() > CLASSIFY_TOL {
        2
    } else {
        1
    };
    let coefficients = if distinct == 2 {
        vec![psi0, psi1]
    } else {
        vec![psi0]
    };

    let a2 = u.a().norm_sqr();
    let b2 = u.b().norm_sqr();
    let mat = u.matrix();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    let classification = if (a2 - 1.0).abs() <= CLASSIFY_TOL {
        let ident = Mat2([[one, zero], [zero, one]]);
        let sigma_z = Mat2([[one, zero], [zero, -one]]);
        if phase_fit_residual(&mat, &ident) <= CLASSIFY_TOL {
            Classification::IdentityLike
        } else if phase_fit_residual(&mat, &sigma_z) <= CLASSIFY_TOL {
            Classification::ZLike
        } else {
            Classification::NotGood
        }
    } else if (b2 - 1.0).abs() <= CLASSIFY_TOL {
        let sigma_x = Mat2([[zero, one], [one, zero]]);
        let i_sigma_y = Mat2([[zero, one], [-one, zero]]);
        if phase_fit_residual(&mat, &sigma_x) <= CLASSIFY_TOL {
            Classification::XLike
        } else if phase_fit_residual(&mat, &i_sigma_y) <= CLASSIFY_TOL {
            Classification::YLike
        } else {
            Classification::NotGood
        }
    } else {
        Classification::NotGood
    };

    GoodNoiseAnalysis {
        classification,
        distinct_count: distinct,
        coefficients,
        block_dimensions: Vec::new(),
        alpha: None,
        beta: None,
    }
}

/// Classification plus the explicit block decomposition of `chi|s>` for
/// a concrete register and marked element.
///
/// Requires the diagonal/anti-diagonal condition, so that all
/// coefficients have unit modulus. The block dimensions satisfy
/// `sum(Delta_i) + (1 or 2) = N`, the extra terms being the marked
/// state and, on the anti-diagonal branch, its flipped image.
pub fn analyze_with_layout(
    u: &NoiseUnitary,
    layout: &NoiseLayout,
    w: usize,
) -> Result<GoodNoiseAnalysis> {
    let n = layout.n();
    if n > crate::MAX_QUBITS_DENSITY {
        return Err(Error::Size {
            n,
            min: 1,
            max: crate::MAX_QUBITS_DENSITY,
        });
    }
    let dim = 1usize << n;
    if w >= dim {
        return Err(Error::IndexOutOfRange { index: w, dim });
    }
    let a2 = u.a().norm_sqr();
    let b2 = u.b().norm_sqr();
    let diagonal_branch = (a2 - 1.0).abs() <= CLASSIFY_TOL || layout.m() == 0;
    if !diagonal_branch && (b2 - 1.0).abs() > CLASSIFY_TOL {
        return Err(Error::Domain(
            "block decomposition requires |a| = 1 or |b| = 1".into(),
        ));
    }
    let mut analysis = classify_good_noise(u);
    let m = layout.m();
    let w_image = if diagonal_branch { w } else { w ^ layout.mask() };

    let psi: Vec<Complex64> = (0..=m).map(|q| psi_q(u, m, q).unwrap()).collect();
    let mut coefficients: Vec<Complex64> = Vec::new();
    let mut blocks: Vec<usize> = Vec::new();
    for k in 0..dim {
        if k == w || k == w_image {
            continue;
        }
        let value = psi[layout.ones_at_sites(k)];
        match coefficients
            .iter()
            .position(|c| (c - value).norm() <= CLASSIFY_TOL)
        {
            Some(idx) => blocks[idx] += 1,
            None => {
                coefficients.push(value);
                blocks.push(1);
            }
        }
    }
    analysis.alpha = Some(psi[layout.ones_at_sites(w)]);
    analysis.beta = if w_image != w {
        Some(psi[layout.ones_at_sites(w_image)])
    } else {
        None
    };
    analysis.distinct_count = analysis.distinct_count.max(coefficients.len().min(2));
    analysis.coefficients = coefficients;
    analysis.block_dimensions = blocks;
    Ok(analysis)
}

/// Basis index the noise maps the marked state to: unchanged on the
/// diagonal branch, bitwise-flipped at every noisy site on the
/// anti-diagonal branch.
pub fn flipped_index(u: &NoiseUnitary, layout: &NoiseLayout, w: usize) -> Result<usize> {
    let dim = 1usize << layout.n();
    if w >= dim {
        return Err(Error::IndexOutOfRange { index: w, dim });
    }
    match classify_good_noise(u).classification {
        Classification::IdentityLike | Classification::ZLike => Ok(w),
        Classification::XLike | Classification::YLike => Ok(w ^ layout.mask()),
        Classification::NotGood => Err(Error::UnsupportedClassification),
    }
}

/// The four overlap scalars of the register-wide noise operator that
/// drive the short-time success probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiOverlaps {
    pub s_chi_s: Complex64,
    pub w_chi_s: Complex64,
    pub w_chi_w: Complex64,
    pub s_chi_w: Complex64,
}

/// Compute the overlaps both in closed form and by direct application;
/// error if the two routes disagree beyond 1e-12.
pub fn overlap_elements(
    u: &NoiseUnitary,
    layout: &NoiseLayout,
    inst: &GroverInstance,
) -> Result<ChiOverlaps> {
    if layout.n() != inst.n() {
        return Err(Error::Shape {
            left: 1 << layout.n(),
            right: inst.dim(),
        });
    }
    let n = layout.n();
    let m = layout.m();
    let dim = 1usize << n;
    let w = inst.marked();
    let root_n = (dim as f64).sqrt();
    let q_w = layout.ones_at_sites(w);
    let global = cpowu(u.phase_phi(), m);

    let a = u.a();
    let b = u.b();
    let et = u.phase_theta();

    // <s|chi|s> = (2^(n-m)/N) [(a+b) + e^{i theta}(conj a - conj b)]^m
    let s_chi_s = (1.0 / (1u64 << m) as f64)
        * global
        * cpowu(a + b + et * (a.conj() - b.conj()), m);
    // <w|chi|s> = psi_{q(w)} / sqrt(N)
    let w_chi_s = psi_q(u, m, q_w)? / root_n;
    // <w|chi|w> = diagonal entry of chi at w
    let w_chi_w = global * cpowu(a, m - q_w) * cpowu(a.conj() * et, q_w);
    // <s|chi|w> = column sum at w / sqrt(N)
    let s_chi_w =
        global * cpowu(a - b.conj() * et, m - q_w) * cpowu(b + a.conj() * et, q_w) / root_n;

    let closed = ChiOverlaps {
        s_chi_s,
        w_chi_s,
        w_chi_w,
        s_chi_w,
    };

    // Direct route via the applied operator.
    let chi = ChiAction::new(u, layout);
    let s = Statevector::uniform(n)?;
    let basis_w = Statevector::basis(n, w)?;
    let chi_s = chi.apply_statevector(&s)?;
    let chi_w = chi.apply_statevector(&basis_w)?;
    let direct = ChiOverlaps {
        s_chi_s: s.overlap(&chi_s)?,
        w_chi_s: basis_w.overlap(&chi_s)?,
        w_chi_w: basis_w.overlap(&chi_w)?,
        s_chi_w: s.overlap(&chi_w)?,
    };

    for (name, c, d) in [
        ("<s|chi|s>", closed.s_chi_s, direct.s_chi_s),
        ("<w|chi|s>", closed.w_chi_s, direct.w_chi_s),
        ("<w|chi|w>", closed.w_chi_w, direct.w_chi_w),
        ("<s|chi|w>", closed.s_chi_w, direct.s_chi_w),
    ] {
        if (c - d).norm() > 1e-12 {
            return Err(Error::Consistency(format!(
                "{name}: closed form {c} vs direct {d}"
            )));
        }
    }
    Ok(closed)
}

/// One line of a row-sum verification report.
#[derive(Debug, Clone, Serialize)]
pub struct RowSumEntry {
    pub q: usize,
    pub psi_re: f64,
    pub psi_im: f64,
    pub expected_multiplicity: u64,
    pub observed_multiplicity: u64,
    pub max_deviation: f64,
}

/// Report from checking the row-sum formula against a materialized
/// operator.
#[derive(Debug, Clone, Serialize)]
pub struct RowSumReport {
    pub n: usize,
    pub m: usize,
    pub passed: bool,
    pub max_deviation: f64,
    pub entries: Vec<RowSumEntry>,
}

/// Validate the row-sum formula and its multiplicities against a dense
/// materialization of the noise operator (n <= 6).
pub fn chi_row_sum_check(u: &NoiseUnitary, layout: &NoiseLayout) -> Result<RowSumReport> {
    let n = layout.n();
    let m = layout.m();
    let chi = crate::dense::dense_chi(u, layout)?;
    let dim = 1usize << n;

    let mut entries: Vec<RowSumEntry> = (0..=m)
        .map(|q| {
            let psi = psi_q(u, m, q).unwrap();
            RowSumEntry {
                q,
                psi_re: psi.re,
                psi_im: psi.im,
                expected_multiplicity: psi_multiplicity(n, m, q).unwrap(),
                observed_multiplicity: 0,
                max_deviation: 0.0,
            }
        })
        .collect();

    let mut max_deviation = 0.0f64;
    for k in 0..dim {
        let mut acc = ExactSumC::new();
        for v in &chi[k * dim..(k + 1) * dim] {
            acc.add(*v);
        }
        let row_sum = acc.total();
        let q = layout.ones_at_sites(k);
        let expect = Complex64::new(entries[q].psi_re, entries[q].psi_im);
        let dev = (row_sum - expect).norm();
        entries[q].observed_multiplicity += 1;
        entries[q].max_deviation = entries[q].max_deviation.max(dev);
        max_deviation = max_deviation.max(dev);
    }

    let counts_ok = entries
        .iter()
        .all(|e| e.observed_multiplicity == e.expected_multiplicity);
    Ok(RowSumReport {
        n,
        m,
        passed: max_deviation <= 1e-10 && counts_ok,
        max_deviation,
        entries,
    })
}

/// The register-wide noise operator in applied form.
///
/// Exactly diagonal or anti-diagonal unitaries act as a generalized
/// permutation: one index flip plus a phase that depends only on the
/// number of set bits among the noisy sites. Everything else falls back
/// to site-by-site application. The phase table is indexed by that bit
/// count, so registers related by a basis permutation see bit-identical
/// phases.
#[derive(Debug, Clone)]
pub enum ChiAction {
    GenPerm {
        n: usize,
        flip_mask: usize,
        site_mask: usize,
        phase_by_q: Vec<Complex64>,
    },
    Local {
        n: usize,
        mat: Mat2,
        sites: Vec<usize>,
    },
}

impl ChiAction {
    pub fn new(u: &NoiseUnitary, layout: &NoiseLayout) -> Self {
        let n = layout.n();
        let m = layout.m();
        let mat = u.matrix();
        if u.exactly_diagonal() || m == 0 {
            let phase_by_q: Vec<Complex64> = (0..=m)
                .map(|q| cpowu(mat.0[0][0], m - q) * cpowu(mat.0[1][1], q))
                .collect();
            ChiAction::GenPerm {
                n,
                flip_mask: 0,
                site_mask: layout.mask(),
                phase_by_q,
            }
        } else if u.exactly_antidiagonal() {
            // Bit 0 -> 1 picks up u10; bit 1 -> 0 picks up u01.
            let phase_by_q: Vec<Complex64> = (0..=m)
                .map(|q| cpowu(mat.0[1][0], m - q) * cpowu(mat.0[0][1], q))
                .collect();
            ChiAction::GenPerm {
                n,
                flip_mask: layout.mask(),
                site_mask: layout.mask(),
                phase_by_q,
            }
        } else {
            ChiAction::Local {
                n,
                mat,
                sites: layout.sites().to_vec(),
            }
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ChiAction::GenPerm { n, .. } => *n,
            ChiAction::Local { n, .. } => *n,
        }
    }

    /// `chi |psi>`.
    pub fn apply_statevector(&self, state: &Statevector) -> Result<Statevector> {
        if state.n() != self.n() {
            return Err(Error::Shape {
                left: state.dim(),
                right: 1 << self.n(),
            });
        }
        match self {
            ChiAction::GenPerm {
                flip_mask,
                site_mask,
                phase_by_q,
                ..
            } => {
                let dim = state.dim();
                let mut out = vec![Complex64::new(0.0, 0.0); dim];
                for (x, &amp) in state.amplitudes().iter().enumerate() {
                    let q = (x & site_mask).count_ones() as usize;
                    out[x ^ flip_mask] = phase_by_q[q] * amp;
                }
                Ok(Statevector::from_raw(state.n(), out))
            }
            ChiAction::Local { mat, sites, .. } => {
                let mut out = state.clone();
                for &site in sites {
                    crate::state::apply_single_qubit_vec(
                        out.amplitudes_mut(),
                        self.n(),
                        mat,
                        site,
                    );
                }
                Ok(out)
            }
        }
    }

    /// `chi rho chi^dagger`.
    pub fn conjugate_dm(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n() != self.n() {
            return Err(Error::Shape {
                left: rho.dim(),
                right: 1 << self.n(),
            });
        }
        let mut out = DensityMatrix::zeros(rho.n())?;
        self.conjugate_dm_into(rho.entries(), out.entries_mut());
        Ok(out)
    }

    /// Kernel form: `dst = chi src chi^dagger` on raw row-major buffers.
    pub(crate) fn conjugate_dm_into(&self, src: &[Complex64], dst: &mut [Complex64]) {
        let dim = 1usize << self.n();
        debug_assert_eq!(src.len(), dim * dim);
        debug_assert_eq!(dst.len(), dim * dim);
        match self {
            ChiAction::GenPerm {
                flip_mask,
                site_mask,
                phase_by_q,
                ..
            } => {
                let q_of = |x: usize| (x & site_mask).count_ones() as usize;
                for i in 0..dim {
                    let pi = phase_by_q[q_of(i)];
                    let ti = i ^ flip_mask;
                    let src_row = &src[i * dim..(i + 1) * dim];
                    let dst_row = &mut dst[ti * dim..(ti + 1) * dim];
                    for (j, &v) in src_row.iter().enumerate() {
                        let w = pi * phase_by_q[q_of(j)].conj() * v;
                        dst_row[j ^ flip_mask] = w;
                    }
                }
            }
            ChiAction::Local { mat, sites, .. } => {
                dst.copy_from_slice(src);
                for &site in sites {
                    crate::state::apply_single_qubit_dm(dst, self.n(), mat, site);
                }
            }
        }
    }
}
