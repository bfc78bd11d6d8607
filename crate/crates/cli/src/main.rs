//! Command-line interface: simulate, classify, verify, figure, scan.
//!
//! Exit codes: 0 success, 2 usage or invalid configuration, 3 resource
//! cap exceeded. `GROVERNS_MAX_QUBITS` (default 14) caps the register
//! size accepted by any subcommand.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use groverns_core::analysis::{regime_scan, PlacementRule, RegimeScanConfig};
use groverns_core::figures::{figure_data, FigureOptions, FIGURE_IDS};
use groverns_core::grover::GroverInstance;
use groverns_core::markov::{simulate_with_spec, MarkovNoiseParams};
use groverns_core::noise::{classify_good_noise, NoiseLayout, UnitarySpec};
use groverns_core::trace::fmt_sig12;
use groverns_core::verify::run_suite;

use config::{
    max_qubits, parse_grid, parse_sites, parse_unitary_arg, parse_unitary_value, FileConfig,
    OutputFormat, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "groverns",
    version,
    about = "Exact simulation of Grover search under correlated local unital noise"
)]
struct Cli {
    /// Size of the worker pool for scans and figures (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one noisy search and write the P(t) trace.
    Simulate(SimulateArgs),
    /// Classify a noise unitary and report its invariance class.
    Classify(ClassifyArgs),
    /// Run a named self-verification suite.
    Verify(VerifyArgs),
    /// Emit a named preset dataset.
    Figure(FigureArgs),
    /// Scan the performance gate over a (p, mu) grid.
    Scan(ScanArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of qubits.
    #[arg(long)]
    n: Option<usize>,
    /// Marked basis index (0-indexed; default 0).
    #[arg(long)]
    w: Option<usize>,
    /// Noise unitary: x, y, z, i, h, or a JSON parameter object.
    #[arg(long)]
    unitary: Option<String>,
    /// Number of noisy sites (used with --placement).
    #[arg(long)]
    m: Option<usize>,
    /// Explicit comma-separated noisy sites (overrides --m).
    #[arg(long)]
    sites: Option<String>,
    /// Site placement rule: prefix, suffix, or paper-eq7.
    #[arg(long)]
    placement: Option<String>,
    /// Noise probability.
    #[arg(long)]
    p: Option<f64>,
    /// Memory parameter.
    #[arg(long)]
    mu: Option<f64>,
    /// Number of Grover iterations (default 3*floor(pi/4*sqrt(N))).
    #[arg(long = "t-max")]
    t_max: Option<usize>,
    /// Output file (default stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Noise unitary: x, y, z, i, h, or a JSON parameter object.
    unitary: String,
    /// Output format: text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: invariance, oracle, closed-form, regime, or all.
    suite: String,
    /// Soft time budget in seconds; checks that no longer fit are
    /// skipped and reported.
    #[arg(long)]
    budget: Option<f64>,
    /// Seed for the suite's random-unitary generators.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct FigureArgs {
    /// Preset id: fig2, fig4, fig5, fig6, fig7, fig8, or fig9-comparison.
    id: String,
    /// Directory the CSV files are written to.
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// Number of qubits.
    #[arg(long)]
    n: usize,
    /// Noise probability grid: start:end:step or a comma list.
    #[arg(long)]
    p: String,
    /// Memory grid: start:end:step or a comma list.
    #[arg(long)]
    mu: String,
    /// Noise unitary (default x).
    #[arg(long, default_value = "x")]
    unitary: String,
    /// Number of noisy sites (default 1).
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Site placement rule.
    #[arg(long, default_value = "prefix")]
    placement: String,
    /// Iterations per trace (default 3*floor(pi/4*sqrt(N))).
    #[arg(long = "t-max")]
    t_max: Option<usize>,
    /// Output file (default stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore the error if a pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Scan(args) => cmd_scan(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let resource = err
                .downcast_ref::<groverns_core::Error>()
                .map(|e| e.is_resource())
                .unwrap_or(false);
            if resource {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn check_register_cap(n: usize) -> Result<()> {
    let cap = max_qubits();
    if n > cap {
        return Err(groverns_core::Error::Resource(format!(
            "n={n} exceeds GROVERNS_MAX_QUBITS={cap}"
        ))
        .into());
    }
    Ok(())
}

fn resolve_run_config(args: SimulateArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let n = args
        .n
        .or(file.n)
        .context("missing required parameter --n")?;
    check_register_cap(n)?;
    let w = args.w.or(file.w).unwrap_or(0);
    let unitary = match (&args.unitary, &file.unitary) {
        (Some(arg), _) => parse_unitary_arg(arg)?,
        (None, Some(value)) => parse_unitary_value(value)?,
        (None, None) => UnitarySpec::named("x"),
    };
    let sites: Option<Vec<usize>> = match (&args.sites, &file.sites) {
        (Some(arg), _) => Some(parse_sites(arg)?),
        (None, Some(list)) => Some(list.clone()),
        (None, None) => None,
    };
    let placement: PlacementRule = args
        .placement
        .or(file.placement)
        .as_deref()
        .unwrap_or("prefix")
        .parse()
        .map_err(|e: groverns_core::Error| anyhow::anyhow!(e))?;
    let layout = match sites {
        Some(sites) => NoiseLayout::new(n, &sites)?,
        None => placement.layout(n, args.m.or(file.m).unwrap_or(1))?,
    };
    let p = args.p.or(file.p).unwrap_or(0.0);
    let mu = args.mu.or(file.mu).unwrap_or(0.0);
    let t_max = args
        .t_max
        .or(file.t_max)
        .unwrap_or_else(|| groverns_core::default_t_max(n));
    let format = args
        .format
        .or(file.format)
        .as_deref()
        .unwrap_or("csv")
        .parse()?;
    Ok(RunConfig {
        n,
        w,
        unitary,
        layout,
        p,
        mu,
        t_max,
        output: args.output.or(file.output),
        format,
    })
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(path) => {
            std::fs::write(path, content)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let config = resolve_run_config(args)?;
    let inst = GroverInstance::new(config.n, config.w)?;
    let u = config.unitary.build()?;
    let params = MarkovNoiseParams::new(config.p, config.mu)?;
    let trace = simulate_with_spec(
        &inst,
        &u,
        config.unitary.clone(),
        &config.layout,
        &params,
        config.t_max,
    )?;
    let content = match config.format {
        OutputFormat::Csv => trace.to_csv(),
        OutputFormat::Json => trace.to_json(),
    };
    write_output(&config.output, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(args: ClassifyArgs) -> Result<ExitCode> {
    let spec = parse_unitary_arg(&args.unitary)?;
    let u = spec.build()?;
    let analysis = classify_good_noise(&u);
    match args.format.as_str() {
        "text" => {
            println!("unitary: {spec}");
            println!("classification: {}", analysis.classification);
            println!("distinct coefficients (m=1): {}", analysis.distinct_count);
            println!("invariance: {}", analysis.classification.invariance_statement());
        }
        "json" => {
            let coefficients: Vec<[f64; 2]> = analysis
                .coefficients
                .iter()
                .map(|c| [c.re, c.im])
                .collect();
            let report = serde_json::json!({
                "unitary": spec,
                "classification": analysis.classification,
                "distinct_count": analysis.distinct_count,
                "coefficients": coefficients,
                "invariance": analysis.classification.invariance_statement(),
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        other => bail!("unknown format '{other}' (expected text or json)"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let report = run_suite(&args.suite, args.budget, args.seed)?;
    for check in &report.checks {
        eprintln!(
            "{}: {} ({})",
            check.name,
            if check.passed { "PASS" } else { "FAIL" },
            check.detail
        );
    }
    for name in &report.skipped {
        eprintln!("{name}: SKIPPED (budget)");
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_figure(args: FigureArgs) -> Result<ExitCode> {
    if !FIGURE_IDS.contains(&args.id.as_str()) {
        bail!(
            "unknown figure id '{}' (known: {})",
            args.id,
            FIGURE_IDS.join(", ")
        );
    }
    let datasets = figure_data(&args.id, &FigureOptions::default())?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    for dataset in &datasets {
        let path = args.out_dir.join(&dataset.filename);
        std::fs::write(&path, &dataset.csv)
            .with_context(|| format!("cannot write {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_scan(args: ScanArgs) -> Result<ExitCode> {
    check_register_cap(args.n)?;
    let p_grid = parse_grid(&args.p)?;
    let mu_grid = parse_grid(&args.mu)?;
    let unitary = parse_unitary_arg(&args.unitary)?;
    let placement: PlacementRule = args
        .placement
        .parse()
        .map_err(|e: groverns_core::Error| anyhow::anyhow!(e))?;
    let config = RegimeScanConfig {
        n_list: vec![args.n],
        p_grid: p_grid.clone(),
        mu_grid: mu_grid.clone(),
        unitary,
        m: args.m,
        placement,
        t_max: args.t_max,
    };
    let map = regime_scan(&config)?;

    let mut out = String::new();
    out.push_str("# performance gate scan\n");
    out.push_str(&format!("# n: {} (N = {})\n", args.n, 1usize << args.n));
    out.push_str(&format!("# unitary: {}\n# m: {}\n", args.unitary, args.m));
    out.push_str("n,p,mu,T,P,q,P_tilde,advantage\n");
    for row in &map.rows {
        for point in &row.points {
            let r = &point.report;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                args.n,
                point.p,
                row.mu,
                r.first_max_time,
                fmt_sig12(r.peak_probability),
                r.speedup,
                fmt_sig12(r.confidence),
                r.advantage
            ));
        }
    }
    write_output(&args.output, &out)?;
    Ok(ExitCode::SUCCESS)
}
