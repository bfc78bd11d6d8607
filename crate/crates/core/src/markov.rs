//! Register evolution under the time-correlated noise process.
//!
//! A two-state walker decides at each iteration whether the noise
//! operator follows the Grover operator. The walker's transitions form
//! a dichotomous Markov chain with stationary noise probability `p` and
//! memory `mu`. The register is tracked as a pair of unnormalized
//! density matrices conditioned on the walker branch; walker coherences
//! never influence the register and are dropped from the start.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grover::{grover_conjugate_dm, GroverInstance};
use crate::noise::{ChiAction, NoiseLayout, NoiseUnitary, UnitarySpec};
use crate::state::{DensityMatrix, Statevector};
use crate::trace::{SimulationTrace, TraceMeta};
use crate::MAX_QUBITS_DENSITY;

/// Stationary noise probability and memory of the walker chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovNoiseParams {
    p: f64,
    mu: f64,
}

impl MarkovNoiseParams {
    pub fn new(p: f64, mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                what: "noise probability p",
                value: p,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::OutOfRange {
                what: "memory mu",
                value: mu,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(MarkovNoiseParams { p, mu })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Stationary probabilities `(p_g, p_g')` of the quiet and noisy
    /// branches.
    pub fn stationary(&self) -> (f64, f64) {
        (1.0 - self.p, self.p)
    }
}

/// Conditional transition probabilities `p_{k|l} = (1-mu) p_k + mu delta_{k,l}`.
///
/// `matrix[k][l]` is the probability of branch `k` given previous branch
/// `l`, with index 0 the quiet branch and 1 the noisy branch. Columns
/// sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalProbs {
    pub matrix: [[f64; 2]; 2],
}

pub fn conditional_probs(params: &MarkovNoiseParams) -> ConditionalProbs {
    let (p_g, p_gp) = params.stationary();
    let mu = params.mu();
    ConditionalProbs {
        matrix: [
            [(1.0 - mu) * p_g + mu, (1.0 - mu) * p_g],
            [(1.0 - mu) * p_gp, (1.0 - mu) * p_gp + mu],
        ],
    }
}

/// The pair of unnormalized register states conditioned on the walker
/// branch. Their sum is the register state; their traces sum to one.
#[derive(Debug, Clone)]
pub struct ConditionalEnsemble {
    pub sigma_g: DensityMatrix,
    pub sigma_gprime: DensityMatrix,
    pub t: usize,
}

impl ConditionalEnsemble {
    /// The register state: the partial trace over the walker.
    pub fn register_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::linear_combination(1.0, &self.sigma_g, 1.0, &self.sigma_gprime)
    }

    /// `<w| rho_t |w>` without materializing the sum.
    pub fn success_probability(&self, w: usize) -> Result<f64> {
        let dim = self.sigma_g.dim();
        if w >= dim {
            return Err(Error::IndexOutOfRange { index: w, dim });
        }
        let v = self.sigma_g.get(w, w) + self.sigma_gprime.get(w, w);
        if v.im.abs() > 1e-12 {
            return Err(Error::Consistency(format!(
                "success probability has imaginary part {:e}",
                v.im
            )));
        }
        Ok(v.re.clamp(0.0, 1.0))
    }

    pub fn total_trace(&self) -> Complex64 {
        self.sigma_g.trace() + self.sigma_gprime.trace()
    }
}

fn require_density_size(n: usize) -> Result<()> {
    if n < 1 || n > MAX_QUBITS_DENSITY {
        return Err(Error::Size {
            n,
            min: 1,
            max: MAX_QUBITS_DENSITY,
        });
    }
    Ok(())
}

fn check_consistent(inst: &GroverInstance, layout: &NoiseLayout) -> Result<()> {
    if inst.n() != layout.n() {
        return Err(Error::Shape {
            left: inst.dim(),
            right: 1 << layout.n(),
        });
    }
    Ok(())
}

/// State after the first iteration: the walker enters through its
/// stationary probabilities only.
///
/// `sigma_g(1) = (1-p) G rho_0 G^dagger`,
/// `sigma_g'(1) = p chi G rho_0 G^dagger chi^dagger`,
/// with `rho_0` the uniform projector.
pub fn initialize_ensemble(
    inst: &GroverInstance,
    u: &NoiseUnitary,
    layout: &NoiseLayout,
    params: &MarkovNoiseParams,
) -> Result<ConditionalEnsemble> {
    require_density_size(inst.n())?;
    check_consistent(inst, layout)?;
    let chi = ChiAction::new(u, layout);
    let (p_g, p_gp) = params.stationary();

    let mut quiet = Statevector::uniform(inst.n())?.density_matrix()?;
    grover_conjugate_dm(quiet.entries_mut(), inst.n(), inst.marked());
    let noisy = chi.conjugate_dm(&quiet)?;

    Ok(ConditionalEnsemble {
        sigma_g: quiet.scale(p_g),
        sigma_gprime: noisy.scale(p_gp),
        t: 1,
    })
}

/// One step of the conditioned recursion:
///
/// `sigma_g(t)  = p_gg  Phi0[sigma_g] + p_gg'  Phi0[sigma_g']`
/// `sigma_g'(t) = p_g'g Phi1[sigma_g] + p_g'g' Phi1[sigma_g']`
///
/// where `Phi0 = G . G^dagger` and `Phi1 = chi G . G^dagger chi^dagger`.
pub fn evolve_step(
    ens: ConditionalEnsemble,
    inst: &GroverInstance,
    u: &NoiseUnitary,
    layout: &NoiseLayout,
    params: &MarkovNoiseParams,
) -> Result<ConditionalEnsemble> {
    if ens.t < 1 {
        return Err(Error::Domain("ensemble step counter must be >= 1".into()));
    }
    check_consistent(inst, layout)?;
    if ens.sigma_g.n() != inst.n() {
        return Err(Error::Shape {
            left: ens.sigma_g.dim(),
            right: inst.dim(),
        });
    }
    let chi = ChiAction::new(u, layout);
    let probs = conditional_probs(params);
    let mut stepper = Stepper::new(inst, chi, probs, params.p());
    let mut state = EnsembleBuffers::from_ensemble(ens);
    stepper.advance(&mut state)?;
    Ok(state.into_ensemble())
}

/// Reusable buffers for the step pipeline.
struct EnsembleBuffers {
    sigma_g: DensityMatrix,
    sigma_gprime: DensityMatrix,
    scratch_g: DensityMatrix,
    scratch_gprime: DensityMatrix,
    t: usize,
}

impl EnsembleBuffers {
    fn from_ensemble(ens: ConditionalEnsemble) -> Self {
        let n = ens.sigma_g.n();
        EnsembleBuffers {
            scratch_g: DensityMatrix::zeros(n).expect("size validated"),
            scratch_gprime: DensityMatrix::zeros(n).expect("size validated"),
            sigma_g: ens.sigma_g,
            sigma_gprime: ens.sigma_gprime,
            t: ens.t,
        }
    }

    fn into_ensemble(self) -> ConditionalEnsemble {
        ConditionalEnsemble {
            sigma_g: self.sigma_g,
            sigma_gprime: self.sigma_gprime,
            t: self.t,
        }
    }

    fn success_probability(&self, w: usize) -> Result<f64> {
        let v = self.sigma_g.get(w, w) + self.sigma_gprime.get(w, w);
        if v.im.abs() > 1e-12 {
            return Err(Error::Consistency(format!(
                "success probability has imaginary part {:e}",
                v.im
            )));
        }
        Ok(v.re.clamp(0.0, 1.0))
    }
}

struct Stepper<'a> {
    inst: &'a GroverInstance,
    chi: ChiAction,
    probs: ConditionalProbs,
    p: f64,
}

impl<'a> Stepper<'a> {
    fn new(inst: &'a GroverInstance, chi: ChiAction, probs: ConditionalProbs, p: f64) -> Self {
        Stepper {
            inst,
            chi,
            probs,
            p,
        }
    }

    fn advance(&mut self, state: &mut EnsembleBuffers) -> Result<()> {
        let n = self.inst.n();
        let w = self.inst.marked();
        let m = self.probs.matrix;

        if self.p == 0.0 {
            // Quiet branch only.
            grover_conjugate_dm(state.sigma_g.entries_mut(), n, w);
            state.t += 1;
            return Ok(());
        }
        if self.p == 1.0 {
            // Noisy branch only.
            grover_conjugate_dm(state.sigma_gprime.entries_mut(), n, w);
            let src = std::mem::replace(
                &mut state.sigma_gprime,
                std::mem::replace(&mut state.scratch_gprime, DensityMatrix::zeros(n)?),
            );
            self.chi
                .conjugate_dm_into(src.entries(), state.sigma_gprime.entries_mut());
            state.scratch_gprime = src;
            state.t += 1;
            return Ok(());
        }

        // A = Phi0[sigma_g], B = Phi0[sigma_g'] in place.
        grover_conjugate_dm(state.sigma_g.entries_mut(), n, w);
        grover_conjugate_dm(state.sigma_gprime.entries_mut(), n, w);

        // scratch_g = p_gg A + p_gg' B;  scratch_g' = chi (p_g'g A + p_g'g' B) chi^dagger.
        {
            let a = state.sigma_g.entries();
            let b = state.sigma_gprime.entries();
            let out_g = state.scratch_g.entries_mut();
            for ((o, &x), &y) in out_g.iter_mut().zip(a).zip(b) {
                *o = m[0][0] * x + m[0][1] * y;
            }
        }
        {
            // Reuse sigma_g's buffer for the pre-noise noisy combination.
            let b = state.sigma_gprime.entries();
            let a = state.sigma_g.entries_mut();
            for (x, &y) in a.iter_mut().zip(b) {
                *x = m[1][0] * *x + m[1][1] * y;
            }
        }
        self.chi
            .conjugate_dm_into(state.sigma_g.entries(), state.scratch_gprime.entries_mut());

        std::mem::swap(&mut state.sigma_g, &mut state.scratch_g);
        std::mem::swap(&mut state.sigma_gprime, &mut state.scratch_gprime);
        state.t += 1;
        Ok(())
    }
}

fn trace_meta(
    inst: &GroverInstance,
    unitary: UnitarySpec,
    layout: &NoiseLayout,
    p: f64,
    mu: f64,
) -> TraceMeta {
    TraceMeta {
        n: inst.n(),
        w: inst.marked(),
        unitary,
        sites: layout.sites().to_vec(),
        p,
        mu,
    }
}

/// Simulate `P(t) = <w|rho_t|w>` for `t = 0..=t_max` under the
/// correlated noise process. Fully deterministic.
pub fn simulate(
    inst: &GroverInstance,
    u: &NoiseUnitary,
    layout: &NoiseLayout,
    params: &MarkovNoiseParams,
    t_max: usize,
) -> Result<SimulationTrace> {
    simulate_with_spec(inst, u, UnitarySpec::named("?"), layout, params, t_max)
}

/// As [`simulate`], recording the given spec in the trace metadata.
pub fn simulate_with_spec(
    inst: &GroverInstance,
    u: &NoiseUnitary,
    unitary_spec: UnitarySpec,
    layout: &NoiseLayout,
    params: &MarkovNoiseParams,
    t_max: usize,
) -> Result<SimulationTrace> {
    if t_max < 1 {
        return Err(Error::Domain("t_max must be >= 1".into()));
    }
    require_density_size(inst.n())?;
    check_consistent(inst, layout)?;

    let mut series = Vec::with_capacity(t_max + 1);
    series.push((0usize, 1.0 / inst.dim() as f64));

    let ens = initialize_ensemble(inst, u, layout, params)?;
    let chi = ChiAction::new(u, layout);
    let probs = conditional_probs(params);
    let mut stepper = Stepper::new(inst, chi, probs, params.p());
    let mut state = EnsembleBuffers::from_ensemble(ens);
    series.push((1, state.success_probability(inst.marked())?));
    for t in 2..=t_max {
        stepper.advance(&mut state)?;
        series.push((t, state.success_probability(inst.marked())?));
    }

    SimulationTrace::new(
        trace_meta(inst, unitary_spec, layout, params.p(), params.mu()),
        series,
    )
}

/// Memoryless special case via the two-operator Kraus map:
/// `rho_t = (1-p) G rho G^dagger + p chi G rho G^dagger chi^dagger`.
///
/// Must agree with `simulate` at `mu = 0` to full precision.
pub fn simulate_memoryless(
    inst: &GroverInstance,
    u: &NoiseUnitary,
    layout: &NoiseLayout,
    p: f64,
    t_max: usize,
) -> Result<SimulationTrace> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            what: "noise probability p",
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if t_max < 1 {
        return Err(Error::Domain("t_max must be >= 1".into()));
    }
    require_density_size(inst.n())?;
    check_consistent(inst, layout)?;

    let n = inst.n();
    let w = inst.marked();
    let chi = ChiAction::new(u, layout);
    let mut rho = Statevector::uniform(n)?.density_matrix()?;
    let mut noisy = DensityMatrix::zeros(n)?;
    let mut series = Vec::with_capacity(t_max + 1);
    series.push((0usize, 1.0 / inst.dim() as f64));
    for t in 1..=t_max {
        grover_conjugate_dm(rho.entries_mut(), n, w);
        if p > 0.0 {
            chi.conjugate_dm_into(rho.entries(), noisy.entries_mut());
            let nd = noisy.entries();
            for (r, &x) in rho.entries_mut().iter_mut().zip(nd) {
                *r = (1.0 - p) * *r + p * x;
            }
        }
        series.push((t, rho.fidelity_with_basis(w)?));
    }
    SimulationTrace::new(trace_meta(inst, UnitarySpec::named("?"), layout, p, 0.0), series)
}
