mod configs;
mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bandrec::conditions::{check_interpolator, regularity_sweep, series_bound_check, series_threshold};
use bandrec::experiments::{run_sweep, summarize, write_report, RowStatus, SweepConfig};
use bandrec::interpolation::{solver_tolerance, CollocationSystem};
use bandrec::{separation, synthesize, ConvexBody, Kernel};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use configs::{InterpolateConfig, KernelCheckConfig, NodesConfig, RatiosConfig};
use output::Staged;

#[derive(Parser)]
#[command(name = "bandrec", version, about = "Kernel reconstruction of bandlimited functions from nonuniform samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the interpolator conditions of a kernel on a body
    #[command(after_help = configs::check_kernel_help())]
    CheckKernel(Common),
    /// Generate a node set
    #[command(after_help = configs::nodes_help())]
    Nodes(Common),
    /// Interpolate a bandlimited function from its samples
    #[command(after_help = configs::interpolate_help())]
    Interpolate(Common),
    /// Run a convergence sweep and fit the error rate
    #[command(after_help = configs::sweep_help())]
    Sweep(Common),
    /// Tabulate regularity ratios over a shape grid
    #[command(after_help = configs::ratios_help())]
    Ratios(Common),
    /// Evaluate the dyadic series bound
    #[command(after_help = configs::series_help())]
    SeriesCheck(SeriesArgs),
}

#[derive(Args)]
struct Common {
    /// JSON config file
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "bandrec-out")]
    out: PathBuf,
    /// Override the seeds in the config
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Print nothing on success
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct SeriesArgs {
    /// Growth base D > 1
    #[arg(long = "D", value_name = "D")]
    d: f64,
    /// Decay rate a > 0 (default: the threshold for D)
    #[arg(long, value_name = "A")]
    a: Option<f64>,
    /// Also write series.json under this directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<bandrec::Error> for Failure {
    fn from(e: bandrec::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(format!("{e:#}"))
    }
}

/// Whether the run's check passed.
type Verdict = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::CheckKernel(c) => check_kernel(c),
        Command::Nodes(c) => nodes(c),
        Command::Interpolate(c) => interpolate(c),
        Command::Sweep(c) => sweep(c),
        Command::Ratios(c) => ratios(c),
        Command::SeriesCheck(s) => series(s),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("bandrec: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("bandrec: numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn finish(staged: Staged, pass: bool, quiet: bool) -> Verdict {
    let dir = staged.commit(pass)?;
    if !quiet {
        eprintln!("{}: {}", if pass { "pass" } else { "FAIL" }, dir.display());
    }
    Ok(pass)
}

fn check_kernel(args: &Common) -> Verdict {
    let cfg: KernelCheckConfig = load(&args.config)?;
    let body = ConvexBody::from_spec(&cfg.body)?;
    let kernel = Kernel::from_spec(&cfg.kernel)?;
    let report = check_interpolator(&kernel, &body)?;
    let pass = report.pass();
    let text = to_json(&json!({ "pass": pass, "report": report }));
    if !args.quiet {
        print!("{text}");
    }
    let mut staged = Staged::new(&args.out, "check-kernel", &serde_json::to_string(&cfg).unwrap());
    staged.add("report.json", text);
    finish(staged, pass, args.quiet)
}

fn nodes(args: &Common) -> Verdict {
    let mut cfg: NodesConfig = load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.nodes = cfg.nodes.with_seed(seed);
    }
    let set = cfg.nodes.generate()?;
    let q = separation(&set)?;
    let mut csv = Vec::new();
    set.write_csv(&mut csv)?;
    let summary = json!({ "dim": set.dim(), "count": set.len(), "separation": q, "hull": set.hull(), "nodes": cfg.nodes });
    if !args.quiet {
        println!("{} nodes in d = {}, separation {q:.6e}", set.len(), set.dim());
    }
    let mut staged = Staged::new(&args.out, "nodes", &serde_json::to_string(&cfg).unwrap());
    staged.add("nodes.csv", csv);
    staged.add("summary.json", to_json(&summary));
    finish(staged, true, args.quiet)
}

fn interpolate(args: &Common) -> Verdict {
    let mut cfg: InterpolateConfig = load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.nodes = cfg.nodes.with_seed(seed);
        cfg.function.seed = seed;
    }
    let set = cfg.nodes.generate()?;
    if set.dim() != cfg.kernel.dim {
        return Err(Failure::Usage(format!("node dimension {} differs from kernel dimension {}", set.dim(), cfg.kernel.dim)));
    }
    if let Some(p) = cfg.eval.iter().find(|p| p.len() != set.dim()) {
        return Err(Failure::Usage(format!("eval point {p:?} does not have dimension {}", set.dim())));
    }
    let kernel = Kernel::from_spec_with_range(&cfg.kernel, 1.01 * set.diameter().max(1.0))?;
    let f = synthesize(&cfg.function, set.dim())?;
    let samples = f.sample(&set)?;
    let interpolant = CollocationSystem::assemble(&kernel, &set)?.solve(&samples)?;
    let tolerance = solver_tolerance(&samples);
    let pass = interpolant.residual() <= tolerance;
    let eval = cfg
        .eval
        .iter()
        .map(|x| {
            let (s, t) = (interpolant.evaluate(x)?, f.eval(x)?);
            Ok(json!({ "x": x, "interpolant": s, "target": t, "error": (s - t).abs() }))
        })
        .collect::<bandrec::Result<Vec<_>>>()?;
    let summary = json!({
        "pass": pass,
        "nodes": set.len(),
        "separation": separation(&set)?,
        "residual": interpolant.residual(),
        "tolerance": tolerance,
        "condition": interpolant.condition(),
        "jitter": interpolant.jitter(),
        "eval": eval,
    });
    if !args.quiet {
        println!("{} nodes, residual {:.3e} (tolerance {tolerance:.3e})", set.len(), interpolant.residual());
    }
    let mut csv = Vec::new();
    interpolant.write_csv(&mut csv)?;
    let mut staged = Staged::new(&args.out, "interpolate", &serde_json::to_string(&cfg).unwrap());
    staged.add("coefficients.csv", csv);
    staged.add("summary.json", to_json(&summary));
    finish(staged, pass, args.quiet)
}

fn sweep(args: &Common) -> Verdict {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", args.config.display())))?;
    let mut cfg = SweepConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        cfg.nodes = cfg.nodes.with_seed(seed);
        cfg.function.seed = seed;
    }
    let report = run_sweep(&cfg)?;
    let summary = summarize(&report);
    if !args.quiet {
        for r in &report.rows {
            println!("alpha {:>8} sup {:.3e} l2 {:.3e} {:?}", r.alpha, r.sup_error, r.l2_error, r.status);
        }
        if let Some(fit) = &summary.fit {
            println!("slope {:.4} (bound {:.4})", fit.slope, fit.theoretical.value);
        }
    }
    let mut csv = Vec::new();
    write_report(&report, &mut csv)?;
    let mut staged = Staged::new(&args.out, "sweep", &cfg.to_json());
    staged.add("report.csv", csv);
    staged.add("summary.json", to_json(&summary));
    let pass = finish(staged, summary.pass, args.quiet)?;
    if !pass {
        if let Some(row) = report.rows.iter().find(|r| r.status == RowStatus::Failed) {
            return Err(Failure::Numerical(format!("row alpha = {}: {}", row.alpha, row.note)));
        }
    }
    Ok(pass)
}

fn ratios(args: &Common) -> Verdict {
    let cfg: RatiosConfig = load(&args.config)?;
    let body = ConvexBody::from_spec(&cfg.body)?;
    let report = regularity_sweep(&cfg.kernel, &body, cfg.beta, &cfg.grid)?;
    let pass = report.pass();
    let mut csv = String::from("alpha,m_alpha,m_beta,gamma,s_alpha,ratio_r1,ratio_r2,ln_ratio_r2\n");
    for r in &report.rows {
        writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.alpha, r.m_alpha, r.m_beta, r.gamma, r.s_alpha, r.ratio_r1, r.ratio_r2, r.ln_ratio_r2
        )
        .unwrap();
    }
    if !args.quiet {
        print!("{csv}");
    }
    let mut staged = Staged::new(&args.out, "ratios", &serde_json::to_string(&cfg).unwrap());
    staged.add("ratios.csv", csv);
    staged.add("report.json", to_json(&json!({ "pass": pass, "report": report })));
    finish(staged, pass, args.quiet)
}

fn series(args: &SeriesArgs) -> Verdict {
    if !(args.d > 1.0 && args.d.is_finite()) {
        return Err(Failure::Usage(format!("--D must exceed 1, got {}", args.d)));
    }
    let a = args.a.unwrap_or_else(|| series_threshold(args.d));
    let check = series_bound_check(args.d, a)?;
    if !args.quiet {
        println!("sum      {:.10e}", check.sum);
        println!("exp(-a)  {:.10e}", check.exp_neg_a);
        println!("ratio    {:.6}", check.ratio);
        println!("threshold {:.6} ({})", check.threshold, if check.admissible { "admissible" } else { "below threshold" });
    }
    match &args.out {
        Some(out) => {
            let mut staged = Staged::new(out, "series-check", &json!({ "D": args.d, "a": a }).to_string());
            staged.add("series.json", to_json(&check));
            finish(staged, check.admissible, args.quiet)
        }
        None => Ok(check.admissible),
    }
}
