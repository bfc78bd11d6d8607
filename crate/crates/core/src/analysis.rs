//! Derived quantities: first-maximum detection, the
//! quantum-vs-classical performance gate, and parameter-regime scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grover::GroverInstance;
use crate::markov::{simulate_with_spec, MarkovNoiseParams};
use crate::noise::{NoiseLayout, UnitarySpec};
use crate::trace::{fmt_sig12, SimulationTrace};

/// Confidence level the repeated noisy search must reach to count as
/// at least as good as a classical scan.
pub const CONFIDENCE_BOUND: f64 = 0.95;

/// Earliest local maximum of a trace.
///
/// Returns the smallest `t >= 1` with `P(t) >= P(t-1)` and
/// `P(t) >= P(t+1)` (ties resolve to the earliest index). A trace that
/// is monotonically non-increasing from `t = 1` has no interior
/// maximum and yields `T = 1`; a trace still rising at the end yields
/// the final point.
pub fn first_maximum(trace: &SimulationTrace) -> Result<(usize, f64)> {
    // At least three points beyond t = 0.
    if trace.series.len() < 4 {
        return Err(Error::TraceTooShort {
            len: trace.series.len(),
            min: 4,
        });
    }
    let s = &trace.series;
    for k in 1..s.len() - 1 {
        if s[k].1 >= s[k - 1].1 && s[k].1 >= s[k + 1].1 {
            return Ok((s[k].0, s[k].1));
        }
    }
    // No interior maximum: pick the earliest argmax over t >= 1.
    let mut best = &s[1];
    for point in &s[2..] {
        if point.1 > best.1 {
            best = point;
        }
    }
    Ok((best.0, best.1))
}

/// Verdict of comparing the noisy search against a classical scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    /// First-maximum time T.
    pub first_max_time: usize,
    /// P(T).
    pub peak_probability: f64,
    /// `floor(N / 2T)`: how many repetitions fit into the classical
    /// average search time.
    pub speedup: u64,
    /// `1 - (1-P)^q`: probability at least one repetition succeeds.
    pub confidence: f64,
    /// True iff `T < N/2` and the confidence reaches 0.95.
    pub advantage: bool,
}

/// Evaluate the performance gate for a search space of size `dim`.
pub fn performance_gate(dim: usize, first_max_time: usize, peak: f64) -> Result<PerformanceReport> {
    if first_max_time < 1 {
        return Err(Error::Domain("first-maximum time must be >= 1".into()));
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&peak) {
        return Err(Error::OutOfRange {
            what: "peak probability",
            value: peak,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let peak = peak.clamp(0.0, 1.0);
    let speedup = (dim as u64) / (2 * first_max_time as u64);
    let confidence = if speedup == 0 {
        0.0
    } else {
        1.0 - (1.0 - peak).powi(speedup as i32)
    };
    let fast_enough = (first_max_time as f64) < dim as f64 / 2.0;
    Ok(PerformanceReport {
        first_max_time,
        peak_probability: peak,
        speedup,
        confidence,
        advantage: fast_enough && confidence >= CONFIDENCE_BOUND,
    })
}

/// Site placement rules accepted by scans and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementRule {
    Prefix,
    Suffix,
    /// First qubit plus last m-1 qubits.
    PaperEq7,
}

impl PlacementRule {
    pub fn layout(&self, n: usize, m: usize) -> Result<NoiseLayout> {
        match self {
            PlacementRule::Prefix => NoiseLayout::prefix(n, m),
            PlacementRule::Suffix => NoiseLayout::suffix(n, m),
            PlacementRule::PaperEq7 => NoiseLayout::split(n, m),
        }
    }
}

impl std::str::FromStr for PlacementRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(PlacementRule::Prefix),
            "suffix" => Ok(PlacementRule::Suffix),
            "paper-eq7" => Ok(PlacementRule::PaperEq7),
            other => Err(Error::Parse(format!("unknown placement rule '{other}'"))),
        }
    }
}

/// Configuration of a regime scan over `(N, mu, p)`.
#[derive(Debug, Clone)]
pub struct RegimeScanConfig {
    pub n_list: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub mu_grid: Vec<f64>,
    pub unitary: UnitarySpec,
    pub m: usize,
    pub placement: PlacementRule,
    /// Iterations per trace; defaults to `default_t_max(n)` when None.
    pub t_max: Option<usize>,
}

impl Default for RegimeScanConfig {
    fn default() -> Self {
        RegimeScanConfig {
            n_list: vec![4, 5, 6, 7],
            p_grid: (0..=25).map(|i| i as f64 * 0.02).collect(),
            mu_grid: vec![0.0, 0.25, 0.5, 0.75, 0.9],
            unitary: UnitarySpec::named("x"),
            m: 1,
            placement: PlacementRule::Prefix,
            t_max: None,
        }
    }
}

/// Gate outcome for one grid point.
#[derive(Debug, Clone, Serialize)]
pub struct RegimePoint {
    pub p: f64,
    pub report: PerformanceReport,
}

/// All gate outcomes for one `(n, mu)` pair, plus two boundary
/// summaries of the advantage region.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeRow {
    pub n: usize,
    pub mu: f64,
    pub points: Vec<RegimePoint>,
    /// Largest grid p with advantage, if any. At small N the advantage
    /// region can be non-contiguous (the integer speedup floor jumps
    /// when the first maximum shifts), so this can exceed `p_boundary`.
    pub p_star: Option<f64>,
    /// Largest grid p such that every smaller grid p also passes: the
    /// edge of the contiguous advantage region starting at p = 0.
    pub p_boundary: Option<f64>,
}

/// Scan result with monotonicity diagnostics of the contiguous
/// boundary.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeMap {
    pub rows: Vec<RegimeRow>,
    /// For every n: p_boundary non-decreasing along the mu grid.
    pub monotone_in_mu: bool,
    /// For every mu: p_boundary non-decreasing along the n list.
    pub monotone_in_n: bool,
}

impl RegimeMap {
    /// Boundary table as CSV: one row per (N, mu).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# regime scan: largest noise probability with quantum advantage\n");
        out.push_str(&format!("# monotone_in_mu: {}\n", self.monotone_in_mu));
        out.push_str(&format!("# monotone_in_n: {}\n", self.monotone_in_n));
        out.push_str("N,mu,p_boundary,p_star\n");
        for row in &self.rows {
            let fmt = |v: Option<f64>| v.map(fmt_sig12).unwrap_or_else(|| "none".to_string());
            out.push_str(&format!(
                "{},{},{},{}\n",
                1usize << row.n,
                row.mu,
                fmt(row.p_boundary),
                fmt(row.p_star)
            ));
        }
        out
    }
}

/// Run the scan. Grid points fan out over the rayon pool; results merge
/// in grid order, so the output is deterministic regardless of
/// scheduling.
pub fn regime_scan(config: &RegimeScanConfig) -> Result<RegimeMap> {
    if config.n_list.is_empty() || config.p_grid.is_empty() || config.mu_grid.is_empty() {
        return Err(Error::Domain("regime scan grids must be non-empty".into()));
    }
    let unitary = config.unitary.build()?;

    let mut tasks: Vec<(usize, f64, f64)> = Vec::new();
    for &n in &config.n_list {
        for &mu in &config.mu_grid {
            for &p in &config.p_grid {
                tasks.push((n, mu, p));
            }
        }
    }

    let reports: Vec<Result<PerformanceReport>> = tasks
        .par_iter()
        .map(|&(n, mu, p)| {
            let inst = GroverInstance::new(n, 0)?;
            let layout = config.placement.layout(n, config.m.min(n))?;
            let params = MarkovNoiseParams::new(p, mu)?;
            let t_max = config.t_max.unwrap_or_else(|| crate::default_t_max(n));
            let trace = simulate_with_spec(
                &inst,
                &unitary,
                config.unitary.clone(),
                &layout,
                &params,
                t_max,
            )?;
            let (t_star, peak) = first_maximum(&trace)?;
            performance_gate(1usize << n, t_star, peak)
        })
        .collect();

    let mut rows = Vec::new();
    let mut idx = 0;
    for &n in &config.n_list {
        for &mu in &config.mu_grid {
            let mut points = Vec::with_capacity(config.p_grid.len());
            for &p in &config.p_grid {
                let report = match &reports[idx] {
                    Ok(r) => *r,
                    Err(e) => return Err(Error::Domain(e.to_string())),
                };
                points.push(RegimePoint { p, report });
                idx += 1;
            }
            let p_star = points
                .iter()
                .filter(|pt| pt.report.advantage)
                .map(|pt| pt.p)
                .fold(None, |acc: Option<f64>, p| {
                    Some(acc.map_or(p, |a| a.max(p)))
                });
            let p_boundary = points
                .iter()
                .take_while(|pt| pt.report.advantage)
                .last()
                .map(|pt| pt.p);
            rows.push(RegimeRow {
                n,
                mu,
                points,
                p_star,
                p_boundary,
            });
        }
    }

    // Monotonicity of the contiguous boundary along mu (fixed n) and n
    // (fixed mu).
    let star = |n: usize, mu: f64| -> Option<f64> {
        rows.iter()
            .find(|r| r.n == n && r.mu == mu)
            .and_then(|r| r.p_boundary)
    };
    let non_decreasing = |values: Vec<Option<f64>>| -> bool {
        values.windows(2).all(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => b >= a - 1e-12,
            (Some(_), None) => false,
            _ => true,
        })
    };
    let monotone_in_mu = config.n_list.iter().all(|&n| {
        non_decreasing(config.mu_grid.iter().map(|&mu| star(n, mu)).collect())
    });
    let monotone_in_n = config.mu_grid.iter().all(|&mu| {
        non_decreasing(config.n_list.iter().map(|&n| star(n, mu)).collect())
    });

    Ok(RegimeMap {
        rows,
        monotone_in_mu,
        monotone_in_n,
    })
}
