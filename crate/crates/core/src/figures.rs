//! Deterministic preset datasets for the CLI `figure` command.
//!
//! Each preset produces one or more CSV files with all parameters
//! recorded in `#` comment headers. Identical invocations produce
//! byte-identical files.

use crate::analysis::{first_maximum, regime_scan, PlacementRule, RegimeScanConfig};
use crate::error::{Error, Result};
use crate::grover::GroverInstance;
use crate::markov::{simulate_with_spec, MarkovNoiseParams};
use crate::noise::{NoiseLayout, NoiseUnitary, UnitarySpec};
use crate::trace::{fmt_sig12, SimulationTrace};

/// Options shared by all figure presets.
#[derive(Debug, Clone, Default)]
pub struct FigureOptions {
    /// Override the preset's iteration count.
    pub t_max: Option<usize>,
}

/// One emitted file.
#[derive(Debug, Clone)]
pub struct NamedDataset {
    pub filename: String,
    pub csv: String,
}

/// Known preset identifiers.
pub const FIGURE_IDS: &[&str] = &["fig2", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9-comparison"];

/// Build the datasets for one preset.
pub fn figure_data(figure_id: &str, options: &FigureOptions) -> Result<Vec<NamedDataset>> {
    match figure_id {
        "fig2" => fig2(options),
        "fig4" => fig4(),
        "fig5" => fig5(options),
        "fig6" => fig6(options),
        "fig7" => fig7(options),
        "fig8" => fig8(),
        "fig9-comparison" => fig9(options),
        other => Err(Error::UnknownFigure(other.to_string())),
    }
}

/// Multi-column success-probability table over a shared time grid.
struct CurveSet {
    comments: Vec<String>,
    names: Vec<String>,
    t_max: usize,
    curves: Vec<SimulationTrace>,
}

impl CurveSet {
    fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str(&format!("# {c}\n"));
        }
        out.push('t');
        for name in &self.names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for t in 0..=self.t_max {
            out.push_str(&t.to_string());
            for curve in &self.curves {
                out.push(',');
                out.push_str(&fmt_sig12(curve.value_at(t).expect("shared grid")));
            }
            out.push('\n');
        }
        out
    }
}

struct CurveSpec {
    name: String,
    unitary: UnitarySpec,
    layout: NoiseLayout,
    p: f64,
    mu: f64,
}

fn run_curves(n: usize, t_max: usize, specs: Vec<CurveSpec>, comments: Vec<String>) -> Result<CurveSet> {
    let inst = GroverInstance::new(n, 0)?;
    let mut names = Vec::new();
    let mut curves = Vec::new();
    for spec in specs {
        let u = spec.unitary.build()?;
        let params = MarkovNoiseParams::new(spec.p, spec.mu)?;
        let trace = simulate_with_spec(&inst, &u, spec.unitary, &spec.layout, &params, t_max)?;
        names.push(spec.name);
        curves.push(trace);
    }
    Ok(CurveSet {
        comments,
        names,
        t_max,
        curves,
    })
}

fn fig2(options: &FigureOptions) -> Result<Vec<NamedDataset>> {
    let n = 5;
    let t_max = options.t_max.unwrap_or(10);
    let set = run_curves(
        n,
        t_max,
        vec![CurveSpec {
            name: "P".into(),
            unitary: UnitarySpec::named("i"),
            layout: NoiseLayout::prefix(n, 0)?,
            p: 0.0,
            mu: 0.0,
        }],
        vec![
            "dataset: fig2 (noiseless search)".into(),
            format!("n: {n}"),
            "w: 0".into(),
            "p: 0".into(),
        ],
    )?;
    Ok(vec![NamedDataset {
        filename: "fig2.csv".into(),
        csv: set.to_csv(),
    }])
}

fn fig4() -> Result<Vec<NamedDataset>> {
    let config = RegimeScanConfig {
        n_list: vec![4, 5, 6, 7],
        p_grid: (0..=25).map(|i| i as f64 * 0.02).collect(),
        mu_grid: vec![0.0, 0.25, 0.5, 0.75, 0.9],
        unitary: UnitarySpec::named("x"),
        m: 1,
        placement: PlacementRule::Prefix,
        t_max: None,
    };
    let map = regime_scan(&config)?;
    Ok(vec![NamedDataset {
        filename: "fig4.csv".into(),
        csv: map.to_csv(),
    }])
}

fn fig5(options: &FigureOptions) -> Result<Vec<NamedDataset>> {
    let n = 10;
    let t_max = options.t_max.unwrap_or_else(|| crate::default_t_max(n));
    let mut specs = Vec::new();
    for (u_name, unitary) in [("x", UnitarySpec::named("x")), ("h", UnitarySpec::named("h"))] {
        for m in [1usize, 5] {
            for p in [0.05, 0.1] {
                specs.push(CurveSpec {
                    name: format!("P_{u_name}_m{m}_p{p}"),
                    unitary: unitary.clone(),
                    layout: NoiseLayout::prefix(n, m)?,
                    p,
                    mu: 0.0,
                });
            }
        }
    }
    let set = run_curves(
        n,
        t_max,
        specs,
        vec![
            "dataset: fig5 (memoryless noise, bit flip vs hadamard)".into(),
            format!("n: {n}"),
            "w: 0".into(),
            "mu: 0".into(),
            "sites: first m qubits".into(),
        ],
    )?;
    Ok(vec![NamedDataset {
        filename: "fig5.csv".into(),
        csv: set.to_csv(),
    }])
}

fn fig6(options: &FigureOptions) -> Result<Vec<NamedDataset>> {
    let n = 8;
    let t_max = options.t_max.unwrap_or_else(|| crate::default_t_max(n));
    let mut specs = Vec::new();
    for m in [1usize, 2, 4, 5] {
        for p in [0.05, 0.1] {
            specs.push(CurveSpec {
                name: format!("P_m{m}_p{p}"),
                unitary: UnitarySpec::named("y"),
                layout: NoiseLayout::prefix(n, m)?,
                p,
                mu: 0.0,
            });
        }
    }
    let set = run_curves(
        n,
        t_max,
        specs,
        vec![
            "dataset: fig6 (memoryless bit-phase flip, parity pairing)".into(),
            format!("n: {n}"),
            "w: 0".into(),
            "unitary: y".into(),
            "mu: 0".into(),
            "sites: first m qubits".into(),
        ],
    )?;
    Ok(vec![NamedDataset {
        filename: "fig6.csv".into(),
        csv: set.to_csv(),
    }])
}

/// The mixed unitary (sigma_y + sigma_z)/sqrt(2): a = 1/sqrt(2),
/// b = -i/sqrt(2), theta = pi.
fn yz_mix_spec() -> UnitarySpec {
    UnitarySpec::Params {
        a_re: std::f64::consts::FRAC_1_SQRT_2,
        a_im: 0.0,
        b_re: 0.0,
        b_im: -std::f64::consts::FRAC_1_SQRT_2,
        theta: std::f64::consts::PI,
        phi: 0.0,
    }
}

fn fig7(options: &FigureOptions) -> Result<Vec<NamedDataset>> {
    let n = 8;
    let t_max = options.t_max.unwrap_or_else(|| crate::default_t_max(n));
    let pairs = [(0.1, 0.2), (0.1, 0.9), (0.4, 0.2), (0.4, 0.9)];
    let mut files = Vec::new();
    for (panel, u_name, unitary, m) in [
        ("a", "x", UnitarySpec::named("x"), 1usize),
        ("b", "x", UnitarySpec::named("x"), 4),
        ("c", "yz-mix", yz_mix_spec(), 1),
        ("d", "yz-mix", yz_mix_spec(), 4),
    ] {
        let mut specs = Vec::new();
        for &(p, mu) in &pairs {
            specs.push(CurveSpec {
                name: format!("P_p{p}_mu{mu}"),
                unitary: unitary.clone(),
                layout: NoiseLayout::prefix(n, m)?,
                p,
                mu,
            });
        }
        let set = run_curves(
            n,
            t_max,
            specs,
            vec![
                format!("dataset: fig7 panel {panel} (correlated noise)"),
                format!("n: {n}"),
                "w: 0".into(),
                format!("unitary: {u_name}"),
                format!("m: {m} (first m qubits)"),
            ],
        )?;
        files.push(NamedDataset {
            filename: format!("fig7{panel}.csv"),
            csv: set.to_csv(),
        });
    }
    Ok(files)
}

fn fig8() -> Result<Vec<NamedDataset>> {
    let mu_grid = [0.0, 0.5, 0.9];
    let p_grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.02).collect();
    let mut files = Vec::new();
    for n in [6usize, 8] {
        let inst = GroverInstance::new(n, 0)?;
        let layout = NoiseLayout::prefix(n, 1)?;
        let u = NoiseUnitary::pauli_x();
        let t_max = crate::default_t_max(n);
        let mut out = String::new();
        out.push_str("# dataset: fig8 (peak success probability vs noise probability)\n");
        out.push_str(&format!("# n: {n}\n"));
        out.push_str("# w: 0\n# unitary: x\n# m: 1\n");
        out.push('p');
        for mu in mu_grid {
            out.push_str(&format!(",Pstar_mu{mu}"));
        }
        out.push('\n');
        for &p in &p_grid {
            out.push_str(&format!("{p}"));
            for mu in mu_grid {
                let params = MarkovNoiseParams::new(p, mu)?;
                let trace = simulate_with_spec(
                    &inst,
                    &u,
                    UnitarySpec::named("x"),
                    &layout,
                    &params,
                    t_max,
                )?;
                let (_, peak) = first_maximum(&trace)?;
                out.push_str(&format!(",{}", fmt_sig12(peak)));
            }
            out.push('\n');
        }
        files.push(NamedDataset {
            filename: format!("fig8_n{n}.csv"),
            csv: out,
        });
    }
    Ok(files)
}

fn fig9(options: &FigureOptions) -> Result<Vec<NamedDataset>> {
    let n = 10;
    let t_max = options.t_max.unwrap_or_else(|| crate::default_t_max(n));
    let mu = 0.9;
    let layouts: [(&str, Vec<usize>); 3] = [
        ("a_m3_first", vec![0, 1, 2]),
        ("b_m10_all", (0..10).collect()),
        ("c_m3_spread", vec![3, 6, 9]),
    ];
    let mut files = Vec::new();
    for (tag, sites) in layouts {
        let mut specs = Vec::new();
        for u_name in ["x", "y", "z"] {
            for p in [0.05, 0.2] {
                specs.push(CurveSpec {
                    name: format!("P_{u_name}_p{p}"),
                    unitary: UnitarySpec::named(u_name),
                    layout: NoiseLayout::new(n, &sites)?,
                    p,
                    mu,
                });
            }
        }
        let set = run_curves(
            n,
            t_max,
            specs,
            vec![
                "dataset: fig9 (good noises on different site sets)".into(),
                format!("n: {n}"),
                "w: 0".into(),
                format!("mu: {mu}"),
                format!(
                    "sites: {}",
                    sites
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            ],
        )?;
        files.push(NamedDataset {
            filename: format!("fig9_{tag}.csv"),
            csv: set.to_csv(),
        });
    }
    Ok(files)
}

/// Extract one named column of a curve-set CSV (test support).
pub fn csv_column(csv: &str, column: &str) -> Result<Vec<String>> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty csv".into()))?;
    let idx = header
        .split(',')
        .position(|h| h == column)
        .ok_or_else(|| Error::Parse(format!("no column '{column}'")))?;
    Ok(lines
        .map(|l| l.split(',').nth(idx).unwrap_or_default().to_string())
        .collect())
}
