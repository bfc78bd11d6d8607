//! Named self-verification suites, exposed through the CLI.
//!
//! Each suite runs a set of property checks at CLI-friendly sizes and
//! returns a machine-readable report. An optional time budget skips
//! checks that no longer fit; skipped checks are reported but do not
//! fail the verdict.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{regime_scan, PlacementRule, RegimeScanConfig};
use crate::closed_form::perfect_memory_closed_form;
use crate::error::{Error, Result};
use crate::grover::GroverInstance;
use crate::markov::{simulate, simulate_memoryless, MarkovNoiseParams};
use crate::noise::{NoiseLayout, NoiseUnitary, UnitarySpec};
use crate::reduced::simulate_reduced_sigma_x;
use crate::trajectories::enumerate_trajectories;

pub const SUITE_NAMES: &[&str] = &["invariance", "oracle", "closed-form", "regime", "all"];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub skipped: Vec<String>,
    pub passed: bool,
}

struct SuiteRunner {
    started: Instant,
    budget_secs: Option<f64>,
    checks: Vec<CheckResult>,
    skipped: Vec<String>,
}

impl SuiteRunner {
    fn new(budget_secs: Option<f64>) -> Self {
        SuiteRunner {
            started: Instant::now(),
            budget_secs,
            checks: Vec::new(),
            skipped: Vec::new(),
        }
    }

    fn run<F: FnOnce() -> Result<(bool, String)>>(&mut self, name: &str, f: F) {
        if let Some(budget) = self.budget_secs {
            if self.started.elapsed().as_secs_f64() > budget {
                self.skipped.push(name.to_string());
                return;
            }
        }
        let (passed, detail) = match f() {
            Ok(pair) => pair,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    fn finish(self, suite: &str, seed: u64) -> SuiteReport {
        let passed = self.checks.iter().all(|c| c.passed);
        SuiteReport {
            suite: suite.to_string(),
            seed,
            checks: self.checks,
            skipped: self.skipped,
            passed,
        }
    }
}

/// A Haar-ish random unitary in the model's parameterization; used only
/// by verification checks, always through a seeded generator.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> NoiseUnitary {
    let half = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let alpha = rng.gen_range(0.0..std::f64::consts::TAU);
    let beta = rng.gen_range(0.0..std::f64::consts::TAU);
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let a = Complex64::from_polar(half.cos(), alpha);
    let b = Complex64::from_polar(half.sin(), beta);
    NoiseUnitary::from_params(a, b, theta, 0.0).expect("unit row by construction")
}

fn max_trace_gap(a: &crate::trace::SimulationTrace, b: &crate::trace::SimulationTrace) -> Result<f64> {
    a.max_difference(b)
}

fn check_invariance_all_m(u: &NoiseUnitary, n: usize) -> Result<(bool, String)> {
    let inst = GroverInstance::new(n, 0)?;
    let params = MarkovNoiseParams::new(0.2, 0.5)?;
    let t_max = crate::default_t_max(n);
    let reference = simulate(&inst, u, &NoiseLayout::prefix(n, 1)?, &params, t_max)?;
    let mut worst: f64 = 0.0;
    for m in 2..=n {
        let trace = simulate(&inst, u, &NoiseLayout::prefix(n, m)?, &params, t_max)?;
        worst = worst.max(max_trace_gap(&reference, &trace)?);
    }
    Ok((worst <= 1e-10, format!("max |P_m - P_1| = {worst:.3e}")))
}

fn check_parity_invariance(n: usize) -> Result<(bool, String)> {
    let u = NoiseUnitary::pauli_y();
    let inst = GroverInstance::new(n, 0)?;
    let params = MarkovNoiseParams::new(0.2, 0.5)?;
    let t_max = crate::default_t_max(n);
    let traces: Vec<_> = (1..=n)
        .map(|m| simulate(&inst, &u, &NoiseLayout::prefix(n, m).unwrap(), &params, t_max))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for m in 1..=n - 2 {
        worst = worst.max(max_trace_gap(&traces[m - 1], &traces[m + 1])?);
    }
    let cross = max_trace_gap(&traces[0], &traces[1])?;
    let passed = worst <= 1e-10 && cross > 1e-3;
    Ok((
        passed,
        format!("max |P_m - P_(m+2)| = {worst:.3e}, |P_1 - P_2| gap = {cross:.3e}"),
    ))
}

fn check_position_independence(n: usize) -> Result<(bool, String)> {
    let inst = GroverInstance::new(n, 0)?;
    let params = MarkovNoiseParams::new(0.25, 0.4)?;
    let t_max = crate::default_t_max(n);
    let placements = [vec![0usize, 1], vec![2, n - 1], vec![1, n - 2]];
    let mut worst: f64 = 0.0;
    for u in [
        NoiseUnitary::pauli_x(),
        NoiseUnitary::pauli_y(),
        NoiseUnitary::pauli_z(),
    ] {
        let reference = simulate(
            &inst,
            &u,
            &NoiseLayout::new(n, &placements[0])?,
            &params,
            t_max,
        )?;
        for sites in &placements[1..] {
            let trace = simulate(&inst, &u, &NoiseLayout::new(n, sites)?, &params, t_max)?;
            worst = worst.max(max_trace_gap(&reference, &trace)?);
        }
    }
    Ok((worst <= 1e-10, format!("max placement gap = {worst:.3e}")))
}

fn check_not_good_separation(u: &NoiseUnitary, label: &str, n: usize) -> Result<(bool, String)> {
    let inst = GroverInstance::new(n, 0)?;
    let params = MarkovNoiseParams::new(0.3, 0.0)?;
    let a = simulate(&inst, u, &NoiseLayout::prefix(n, 1)?, &params, 30)?;
    let b = simulate(&inst, u, &NoiseLayout::prefix(n, 3)?, &params, 30)?;
    let gap = max_trace_gap(&a, &b)?;
    Ok((gap > 1e-3, format!("{label}: max |P_1 - P_3| = {gap:.3e}")))
}

fn suite_invariance(runner: &mut SuiteRunner, rng: &mut ChaCha8Rng) {
    runner.run("bit-flip-all-m", || {
        check_invariance_all_m(&NoiseUnitary::pauli_x(), 6)
    });
    runner.run("phase-flip-all-m", || {
        check_invariance_all_m(&NoiseUnitary::pauli_z(), 6)
    });
    runner.run("bit-phase-flip-parity", || check_parity_invariance(6));
    runner.run("position-independence", || check_position_independence(6));
    runner.run("hadamard-separation", || {
        check_not_good_separation(&NoiseUnitary::hadamard(), "hadamard", 6)
    });
    let u = random_unitary(rng);
    runner.run("random-not-good-separation", || {
        use crate::noise::{classify_good_noise, Classification};
        if classify_good_noise(&u).classification != Classification::NotGood {
            // A random draw lands on the measure-zero good set only by
            // construction error; surface that instead of separating.
            return Ok((false, "random unitary unexpectedly classified good".into()));
        }
        check_not_good_separation(&u, "random", 5)
    });
}

fn suite_oracle(runner: &mut SuiteRunner, rng: &mut ChaCha8Rng) {
    let random = random_unitary(rng);
    let unitaries = [
        ("x", NoiseUnitary::pauli_x()),
        ("y", NoiseUnitary::pauli_y()),
        ("z", NoiseUnitary::pauli_z()),
        ("h", NoiseUnitary::hadamard()),
        ("random", random),
    ];
    for (label, u) in unitaries {
        let u = u.clone();
        runner.run(&format!("trajectory-vs-ensemble-{label}"), move || {
            let mut worst: f64 = 0.0;
            for n in [2usize, 3] {
                let inst = GroverInstance::new(n, (1 << n) - 1)?;
                for m in [1usize, n] {
                    let layout = NoiseLayout::prefix(n, m)?;
                    for p in [0.0, 0.25, 0.7, 1.0] {
                        for mu in [0.0, 0.3, 0.8, 1.0] {
                            let params = MarkovNoiseParams::new(p, mu)?;
                            let oracle = enumerate_trajectories(&inst, &u, &layout, &params, 8)?;
                            let fast = simulate(&inst, &u, &layout, &params, 8)?;
                            for (&(_, po), &(_, pf)) in
                                oracle.series.iter().zip(&fast.series)
                            {
                                worst = worst.max((po - pf).abs());
                            }
                        }
                    }
                }
            }
            Ok((worst <= 1e-12, format!("max gap = {worst:.3e}")))
        });
    }
}

fn suite_closed_form(runner: &mut SuiteRunner) {
    runner.run("perfect-memory-mixture", || {
        let u = NoiseUnitary::pauli_x();
        let mut worst: f64 = 0.0;
        for n in [4usize, 5, 6] {
            let inst = GroverInstance::new(n, 0)?;
            let layout = NoiseLayout::prefix(n, 1)?;
            for p in [0.0, 0.3, 1.0] {
                let params = MarkovNoiseParams::new(p, 1.0)?;
                let trace = simulate(&inst, &u, &layout, &params, 40)?;
                for &(t, prob) in &trace.series[1..] {
                    let expect = perfect_memory_closed_form(n, p, t)?.combined;
                    worst = worst.max((prob - expect).abs());
                }
            }
        }
        Ok((worst <= 1e-9, format!("max gap = {worst:.3e}")))
    });
    runner.run("reduced-vs-full", || {
        let u = NoiseUnitary::pauli_x();
        let mut worst: f64 = 0.0;
        for n in [3usize, 5, 7] {
            let inst = GroverInstance::new(n, 0)?;
            let params = MarkovNoiseParams::new(0.3, 0.6)?;
            let t_max = crate::default_t_max(n);
            let reduced = simulate_reduced_sigma_x(n, &params, t_max)?;
            for m in [1usize, n] {
                let full = simulate(&inst, &u, &NoiseLayout::prefix(n, m)?, &params, t_max)?;
                worst = worst.max(reduced.max_difference(&full)?);
            }
        }
        Ok((worst <= 1e-10, format!("max gap = {worst:.3e}")))
    });
    runner.run("memoryless-kraus-consistency", || {
        let mut worst: f64 = 0.0;
        for (u, m) in [
            (NoiseUnitary::pauli_x(), 2usize),
            (NoiseUnitary::hadamard(), 3),
        ] {
            let n = 6;
            let inst = GroverInstance::new(n, 0)?;
            let layout = NoiseLayout::prefix(n, m)?;
            for p in [0.05, 0.4] {
                let a = simulate(&inst, &u, &layout, &MarkovNoiseParams::new(p, 0.0)?, 20)?;
                let b = simulate_memoryless(&inst, &u, &layout, p, 20)?;
                worst = worst.max(a.max_difference(&b)?);
            }
        }
        Ok((worst <= 1e-12, format!("max gap = {worst:.3e}")))
    });
}

fn suite_regime(runner: &mut SuiteRunner) {
    runner.run("regime-monotonicity", || {
        // Boundary monotonicity needs the stated 0.02 grid resolution: a
        // coarser grid can bridge the non-contiguous advantage islands
        // that appear at N = 16.
        let config = RegimeScanConfig {
            n_list: vec![4, 5, 6],
            p_grid: (0..=25).map(|i| i as f64 * 0.02).collect(),
            mu_grid: vec![0.0, 0.5, 0.9],
            unitary: UnitarySpec::named("x"),
            m: 1,
            placement: PlacementRule::Prefix,
            t_max: None,
        };
        let map = regime_scan(&config)?;
        let zero_pass = map
            .rows
            .iter()
            .all(|row| row.points.first().map(|pt| pt.report.advantage) == Some(true));
        let passed = zero_pass && map.monotone_in_mu && map.monotone_in_n;
        Ok((
            passed,
            format!(
                "p=0 pass: {zero_pass}, monotone in mu: {}, monotone in N: {}",
                map.monotone_in_mu, map.monotone_in_n
            ),
        ))
    });
}

/// Run one named suite within an optional time budget (seconds).
pub fn run_suite(name: &str, budget_secs: Option<f64>, seed: u64) -> Result<SuiteReport> {
    if !SUITE_NAMES.contains(&name) {
        return Err(Error::UnknownSuite(name.to_string()));
    }
    let mut runner = SuiteRunner::new(budget_secs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match name {
        "invariance" => suite_invariance(&mut runner, &mut rng),
        "oracle" => suite_oracle(&mut runner, &mut rng),
        "closed-form" => suite_closed_form(&mut runner),
        "regime" => suite_regime(&mut runner),
        "all" => {
            suite_invariance(&mut runner, &mut rng);
            suite_oracle(&mut runner, &mut rng);
            suite_closed_form(&mut runner);
            suite_regime(&mut runner);
        }
        _ => unreachable!(),
    }
    Ok(runner.finish(name, seed))
}
