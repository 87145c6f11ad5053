use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use frac_ldg::harness::config::{ConfigFile, RunConfig, SolveSetup};
use frac_ldg::harness::csv::{emit_convergence, emit_soliton};
use frac_ldg::harness::{
    experiment, parse_levels, run_convergence, run_soliton, verify_ops, ExperimentId, Overrides, SolitonBundle,
    SolitonOptions,
};
use frac_ldg::Error;

#[derive(Parser)]
#[command(name = "frac-ldg", version, about = "LDG solver for fractional Schrödinger equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spatial convergence study of a manufactured-solution experiment.
    Convergence(ConvergenceArgs),
    /// Unforced soliton run with mass history and modulus snapshots.
    Soliton(SolitonArgs),
    /// Check the fractional operators against closed forms and the quadrature oracle.
    VerifyOps(VerifyArgs),
    /// Run a free-form problem described by a config file.
    Solve(SolveArgs),
}

#[derive(Args)]
struct ConvergenceArgs {
    #[arg(long)]
    example: Option<String>,
    /// Resolutions as `N:K1,K2,...;N:K1,...`.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Courant constant; defaults to the stability-capped value.
    #[arg(long)]
    courant: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolitonArgs {
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Cross-coupling constant of `strong_coupled`.
    #[arg(long)]
    varpi1: Option<f64>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long)]
    final_time: Option<f64>,
    #[arg(long)]
    courant: Option<f64>,
    /// Comma-separated snapshot times.
    #[arg(long)]
    snapshots: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated fractional integral orders `mu = 2 - alpha`.
    #[arg(long, default_value = "0.2,0.5,0.8")]
    mu: String,
    /// Comma-separated element counts.
    #[arg(long, default_value = "5")]
    elements: String,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Config(_)
        | Error::InvalidCfl(_)
        | Error::InvalidOrder(_)
        | Error::InvalidDegree(_)
        | Error::InvalidDomain { .. }
        | Error::TooFewElements(_)
        | Error::TimeGrid(_) => 2,
        Error::NonFinite { .. } => 3,
        Error::Verification(_) => 4,
        _ => 1,
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("bad {what} `{s}`"))))
        .collect()
}

fn load_run(path: Option<&Path>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => {
            let cfg = ConfigFile::load(p)?;
            if cfg.problem.is_some() || !cfg.initial.is_empty() {
                return Err(Error::Config(format!(
                    "{}: [problem] and [[initial]] are only read by `solve`",
                    p.display()
                )));
            }
            Ok(cfg.run)
        }
        None => Ok(RunConfig::default()),
    }
}

fn pick_example(cli: Option<String>, run: &RunConfig) -> Result<ExperimentId, Error> {
    cli.or_else(|| run.example.clone())
        .ok_or_else(|| Error::Config("no experiment given (use --example)".into()))?
        .parse()
}

fn fmt_order(p: Option<f64>) -> String {
    p.map_or_else(|| "-".into(), |v| format!("{v:.2}"))
}

fn convergence(args: ConvergenceArgs) -> Result<(), Error> {
    let run = load_run(args.config.as_deref())?;
    let id = pick_example(args.example, &run)?;
    let spec = experiment(id, Overrides::default())?;
    let levels = match args.levels.or(run.levels) {
        Some(text) => parse_levels(&text)?,
        None => spec.default_resolutions.clone(),
    };
    let rows = run_convergence(&spec, &levels, args.courant.or(run.courant))?;
    let comps = spec.problem.components();
    println!("{id}: alpha = {}, T = {}", spec.problem.alpha(), spec.final_time);
    for r in &rows {
        print!("N={} K={:<4} error={:.4e} order={}", r.degree, r.elements, r.l2_error, fmt_order(r.observed_order));
        if comps > 1 {
            for (i, (e, p)) in r.component_errors.iter().zip(&r.component_orders).enumerate() {
                print!("  u{}: {:.4e} ({})", i + 1, e, fmt_order(*p));
            }
        }
        println!();
    }
    if let Some(dir) = args.out.or(run.out) {
        for p in emit_convergence(&dir, &rows, comps)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn report_bundle(bundle: &SolitonBundle, out: Option<PathBuf>) -> Result<(), Error> {
    println!("dt = {:.6e}, {} mass samples", bundle.dt, bundle.mass.len());
    for (i, d) in bundle.max_relative_drift().iter().enumerate() {
        println!("u{}: max relative mass drift {:.3e}", i + 1, d);
    }
    for (t, errs) in &bundle.errors {
        let parts: Vec<String> = errs.iter().enumerate().map(|(i, e)| format!("u{}: {e:.3e}", i + 1)).collect();
        println!("t = {t}: relative L2 error {}", parts.join(", "));
    }
    if let Some(dir) = out {
        for p in emit_soliton(&dir, bundle)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn soliton(args: SolitonArgs) -> Result<(), Error> {
    let run = load_run(args.config.as_deref())?;
    let id = pick_example(args.example, &run)?;
    if id.is_manufactured() {
        return Err(Error::Config(format!("{id} is a convergence experiment, not a soliton run")));
    }
    let overrides = Overrides {
        alpha: args.alpha.or(run.alpha),
        beta: args.beta.or(run.beta),
        varpi1: args.varpi1.or(run.varpi1),
    };
    let spec = experiment(id, overrides)?;
    let mut opts = SolitonOptions::defaults(&spec);
    opts.degree = args.degree.or(run.degree).unwrap_or(opts.degree);
    opts.elements = args.elements.or(run.elements).unwrap_or(opts.elements);
    opts.final_time = args.final_time.or(run.final_time).unwrap_or(opts.final_time);
    opts.courant = args.courant.or(run.courant);
    opts.mass_every = run.mass_every.unwrap_or(opts.mass_every);
    opts.snapshot_times = match (args.snapshots, run.snapshot_times) {
        (Some(text), _) => parse_list(&text, "snapshot time")?,
        (None, Some(v)) => v,
        (None, None) => opts.snapshot_times.into_iter().filter(|&t| t <= opts.final_time).collect(),
    };
    opts.error_times = match run.error_times {
        Some(v) => v,
        None if spec.problem.exact().is_some() => vec![opts.final_time.min(5.0)],
        None => Vec::new(),
    };
    println!(
        "{id}: alpha = {}, N = {}, K = {}, T = {}",
        spec.problem.alpha(),
        opts.degree,
        opts.elements,
        opts.final_time
    );
    let bundle = run_soliton(&spec, &opts)?;
    report_bundle(&bundle, args.out.or(run.out))
}

fn verify(args: VerifyArgs) -> Result<(), Error> {
    let mus: Vec<f64> = parse_list(&args.mu, "mu")?;
    let elements: Vec<usize> = parse_list(&args.elements, "element count")?;
    let start = std::time::Instant::now();
    let report = verify_ops(&mus, &elements)?;
    for c in &report.checks {
        let status = if c.passed { "ok  " } else { "FAIL" };
        println!("{status} {} (achieved {:.3e}, tolerance {:.1e})", c.name, c.achieved, c.tolerance);
    }
    println!("{} checks in {:.2?}", report.checks.len(), start.elapsed());
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(failed.join("; ")))
    }
}

fn solve(args: SolveArgs) -> Result<(), Error> {
    let cfg = ConfigFile::load(&args.config)?;
    let setup = SolveSetup::from_config(&cfg)?;
    println!(
        "custom problem: alpha = {}, N = {}, K = {}, T = {}",
        setup.spec.problem.alpha(),
        setup.options.degree,
        setup.options.elements,
        setup.options.final_time
    );
    let bundle = run_soliton(&setup.spec, &setup.options)?;
    report_bundle(&bundle, args.out.or(setup.out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convergence(a) => convergence(a),
        Command::Soliton(a) => soliton(a),
        Command::VerifyOps(a) => verify(a),
        Command::Solve(a) => solve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
